#include "mdlab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mdlab {

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw ParameterError("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
    if (!f) throw ParameterError("cannot open for reading: " + path);
    return f;
}

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw ParameterError("truncated binary file");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

// --- trajectory -------------------------------------------------------------

void write_trajectory_csv(const std::string& path, const TrajectoryTensor& traj) {
    auto f = open_out(path);
    f << "# model_tag=" << traj.model_tag << " truth_direction_deg=" << fmt_g(traj.truth_direction_deg)
      << " timestep_s=" << fmt_g(traj.timestep_s()) << "\n";
    f << csv_schema::trajectory << '\n';
    for (std::size_t t = 0; t < traj.steps(); ++t) {
        const std::string time = fmt_g(static_cast<double>(t) * traj.timestep_s());
        for (std::size_t q = 0; q < traj.scatterers(); ++q) {
            const auto p = traj.position(t, q);
            const auto v = traj.velocity(t, q);
            const cdouble r = traj.reflectivity(t, q);
            f << time << ',' << q << ',' << fmt_g(p.x()) << ',' << fmt_g(p.y()) << ',' << fmt_g(p.z()) << ','
              << fmt_g(v.x()) << ',' << fmt_g(v.y()) << ',' << fmt_g(v.z()) << ',' << fmt_g(r.real()) << ','
              << fmt_g(r.imag()) << '\n';
        }
    }
}

TrajectoryTensor read_trajectory_csv(const std::string& path) {
    auto f = open_in(path);
    std::string line;
    std::string tag;
    double truth = 0.0, dt = 0.0;
    std::getline(f, line);
    {
        std::istringstream ss(line.substr(line.rfind('#', 0) == 0 ? 1 : 0));
        std::string kv;
        while (ss >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
            if (k == "model_tag") tag = v;
            else if (k == "truth_direction_deg") truth = std::stod(v);
            else if (k == "timestep_s") dt = std::stod(v);
        }
    }
    require(dt > 0.0, "trajectory file lacks a timestep");
    std::getline(f, line);
    std::vector<std::array<double, 9>> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 10) throw ParameterError("malformed trajectory row: " + line);
        std::array<double, 9> r{};
        for (int k = 0; k < 8; ++k) r[static_cast<std::size_t>(k)] = std::stod(c[static_cast<std::size_t>(k + 2)]);
        r[8] = 0.0;
        rows.push_back(r);
    }
    require(!rows.empty() && rows.size() % kBodyPoints == 0, "trajectory row count must be a multiple of 17");
    TrajectoryTensor traj(rows.size() / kBodyPoints, dt);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t t = k / kBodyPoints, q = k % kBodyPoints;
        const auto& r = rows[k];
        traj.position(t, q) = Vec3(r[0], r[1], r[2]);
        traj.velocity(t, q) = Vec3(r[3], r[4], r[5]);
        traj.reflectivity(t, q) = cdouble(r[6], r[7]);
    }
    traj.model_tag = tag;
    traj.truth_direction_deg = truth;
    return traj;
}

// --- cube -------------------------------------------------------------------

void write_cube(const std::string& path, const SlowTimeCube& cube) {
    auto f = open_out(path, true);
    f.write("MDCUBE01", 8);
    put<std::uint64_t>(f, static_cast<std::uint64_t>(cube.cells()));
    put<std::uint64_t>(f, static_cast<std::uint64_t>(cube.pulses()));
    put<double>(f, cube.pri_s);
    put<double>(f, cube.noise_var);
    put<double>(f, cube.truth_direction_deg);
    for (Eigen::Index i = 0; i < cube.cells(); ++i)
        for (Eigen::Index p = 0; p < cube.pulses(); ++p) {
            put<float>(f, static_cast<float>(cube.data(i, p).real()));
            put<float>(f, static_cast<float>(cube.data(i, p).imag()));
        }
}

SlowTimeCube read_cube(const std::string& path) {
    auto f = open_in(path, true);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, "MDCUBE01", 8) != 0) throw ParameterError("not a cube file: " + path);
    const auto n = static_cast<Eigen::Index>(get<std::uint64_t>(f));
    const auto x = static_cast<Eigen::Index>(get<std::uint64_t>(f));
    SlowTimeCube c;
    c.pri_s = get<double>(f);
    c.noise_var = get<double>(f);
    c.truth_direction_deg = get<double>(f);
    c.data.resize(n, x);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index p = 0; p < x; ++p) {
            const float re = get<float>(f);
            const float im = get<float>(f);
            c.data(i, p) = cdouble(re, im);
        }
    return c;
}

// --- dictionary -------------------------------------------------------------

void write_dictionary(const std::string& path, const Dictionary& d) {
    json h;
    h["rows"] = d.atoms.rows();
    h["atoms"] = d.atoms.cols();
    h["atoms_per_block"] = d.atoms_per_block;
    h["xi"] = d.xi;
    h["seed"] = d.seed;
    h["block_labels"] = d.block_labels;
    h["basic_directions_deg"] = d.basic_directions_deg;
    const std::string header = h.dump();
    auto f = open_out(path, true);
    f.write("MDDICT01", 8);
    put<std::uint64_t>(f, header.size());
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (Eigen::Index j = 0; j < d.atoms.cols(); ++j)
        for (Eigen::Index r = 0; r < d.atoms.rows(); ++r) put<float>(f, static_cast<float>(d.atoms(r, j)));
}

Dictionary read_dictionary(const std::string& path) {
    auto f = open_in(path, true);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, "MDDICT01", 8) != 0) throw ParameterError("not a dictionary file: " + path);
    const auto len = get<std::uint64_t>(f);
    std::string header(len, '\0');
    f.read(header.data(), static_cast<std::streamsize>(len));
    const json h = json::parse(header);
    Dictionary d;
    const auto rows = h.at("rows").get<Eigen::Index>();
    const auto cols = h.at("atoms").get<Eigen::Index>();
    d.atoms_per_block = h.at("atoms_per_block").get<int>();
    d.xi = h.at("xi").get<double>();
    d.seed = h.at("seed").get<std::uint64_t>();
    d.block_labels = h.at("block_labels").get<std::vector<int>>();
    d.basic_directions_deg = h.at("basic_directions_deg").get<std::vector<double>>();
    d.atoms.resize(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index r = 0; r < rows; ++r) d.atoms(r, j) = get<float>(f);
        const double n = d.atoms.col(j).norm();
        if (n > 1.0) d.atoms.col(j) /= n;
    }
    return d;
}

// --- features ---------------------------------------------------------------

void write_features_csv(const std::string& path, const std::vector<FeatureRow>& rows) {
    auto f = open_out(path);
    const Eigen::Index C = rows.empty() ? 0 : rows.front().beta.size();
    f << "direction_deg,frame_block_id";
    for (Eigen::Index c = 0; c < C; ++c) f << ",beta_" << (c + 1);
    f << '\n';
    for (const FeatureRow& r : rows) {
        require(r.beta.size() == C, "feature rows have different lengths");
        f << fmt(r.direction_deg, 3) << ',' << r.frame_block_id;
        for (Eigen::Index c = 0; c < C; ++c) f << ',' << fmt_g(r.beta(c));
        f << '\n';
    }
}

std::vector<FeatureRow> read_features_csv(const std::string& path) {
    auto f = open_in(path);
    std::string line;
    std::getline(f, line);
    const auto head = split_csv(line);
    require(head.size() >= 3 && head[0] == "direction_deg" && head[1] == "frame_block_id", "not a features CSV");
    const auto C = static_cast<Eigen::Index>(head.size() - 2);
    std::vector<FeatureRow> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (static_cast<Eigen::Index>(c.size()) != C + 2) throw ParameterError("malformed features row: " + line);
        FeatureRow r;
        r.direction_deg = std::stod(c[0]);
        r.frame_block_id = std::stoi(c[1]);
        r.beta.resize(C);
        for (Eigen::Index k = 0; k < C; ++k) r.beta(k) = std::stod(c[static_cast<std::size_t>(k + 2)]);
        out.push_back(std::move(r));
    }
    return out;
}

RegressionDataset to_dataset(const std::vector<FeatureRow>& rows, const std::string& split_tag) {
    require(!rows.empty(), "no feature rows");
    RegressionDataset d;
    d.split_tag = split_tag;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), rows.front().beta.size());
    d.targets_deg.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d.features.row(static_cast<Eigen::Index>(i)) = rows[i].beta.transpose();
        d.targets_deg(static_cast<Eigen::Index>(i)) = wrap_degrees(rows[i].direction_deg);
    }
    return d;
}

void write_spectrogram_csv(const std::string& path, const Spectrogram& s) {
    auto f = open_out(path);
    f << csv_schema::spectrogram << '\n';
    for (std::size_t t = 0; t < s.time_s.size(); ++t)
        for (std::size_t k = 0; k < s.frequency_hz.size(); ++k) {
            const double p = s.power(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
            f << fmt(s.time_s[t], 4) << ',' << fmt(s.frequency_hz[k], 3) << ','
              << fmt(10.0 * std::log10(std::max(p, 1e-30)), 3) << '\n';
        }
}

std::string beam_pattern_csv(const BeamPattern& p) {
    std::ostringstream os;
    os << csv_schema::beam_pattern << '\n';
    for (std::size_t e = 0; e < p.elevation_deg.size(); ++e)
        for (std::size_t a = 0; a < p.azimuth_deg.size(); ++a)
            os << fmt(p.azimuth_deg[a], 4) << ',' << fmt(p.elevation_deg[e], 4) << ','
               << fmt(p.gain_db(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(a)), 4) << '\n';
    return os.str();
}

// --- scene ------------------------------------------------------------------

json to_json(const UraGeometry& g) {
    return {{"rows_z", g.rows_z}, {"cols_y", g.cols_y}, {"spacing_y", g.spacing_y}, {"spacing_z", g.spacing_z}};
}

namespace {

UraGeometry ura_from_json(const json& j) {
    UraGeometry g;
    g.rows_z = j.at("rows_z").get<int>();
    g.cols_y = j.at("cols_y").get<int>();
    g.spacing_y = j.at("spacing_y").get<double>();
    g.spacing_z = j.at("spacing_z").get<double>();
    return g;
}

}  // namespace

json to_json(const RadarScene& s) {
    json centers = json::array();
    for (const CellOffset& c : s.grid.centers) centers.push_back({c.range_m, c.azimuth_deg, c.elevation_deg});
    return {
        {"name", s.name},
        {"tx", to_json(s.tx)},
        {"rx", to_json(s.rx)},
        {"waveform",
         {{"kind", s.waveform.kind == WaveformKind::lfm ? "lfm" : "cw"},
          {"bandwidth_hz", s.waveform.bandwidth_hz},
          {"pulse_len_s", s.waveform.pulse_len_s}}},
        {"timing",
         {{"carrier_hz", s.timing.carrier_hz},
          {"pri_s", s.timing.pri_s},
          {"pulses_per_cpi", s.timing.pulses_per_cpi},
          {"total_pulses", s.timing.total_pulses}}},
        {"grid",
         {{"layout", to_string(s.grid.layout)},
          {"extents",
           {{"range_m", s.grid.extents.range_m},
            {"azimuth_deg", s.grid.extents.azimuth_deg},
            {"elevation_deg", s.grid.extents.elevation_deg}}},
          {"centers", centers}}},
        {"radar_position_m", {s.radar_position_m.x(), s.radar_position_m.y(), s.radar_position_m.z()}},
    };
}

RadarScene scene_from_json(const json& j) {
    GridLayout layout = GridLayout::full3d_8;
    if (j.contains("grid")) layout = parse_grid_layout(j["grid"].at("layout").get<std::string>());
    else if (j.contains("name")) layout = parse_grid_layout(j["name"].get<std::string>());
    RadarScene s = preset_scene(layout);
    if (j.contains("name")) s.name = j["name"].get<std::string>();
    if (j.contains("tx")) s.tx = ura_from_json(j["tx"]);
    if (j.contains("rx")) s.rx = ura_from_json(j["rx"]);
    if (j.contains("waveform")) {
        const json& w = j["waveform"];
        const std::string kind = w.value("kind", std::string("lfm"));
        if (kind != "lfm" && kind != "cw") throw ParameterError("unknown waveform kind: " + kind);
        s.waveform.kind = kind == "lfm" ? WaveformKind::lfm : WaveformKind::cw;
        s.waveform.bandwidth_hz = w.value("bandwidth_hz", s.waveform.bandwidth_hz);
        s.waveform.pulse_len_s = w.value("pulse_len_s", s.waveform.pulse_len_s);
    }
    if (j.contains("timing")) {
        const json& t = j["timing"];
        s.timing.carrier_hz = t.value("carrier_hz", s.timing.carrier_hz);
        s.timing.pri_s = t.value("pri_s", s.timing.pri_s);
        s.timing.pulses_per_cpi = t.value("pulses_per_cpi", s.timing.pulses_per_cpi);
        s.timing.total_pulses = t.value("total_pulses", s.timing.total_pulses);
    }
    if (j.contains("grid") && j["grid"].contains("extents")) {
        const json& e = j["grid"]["extents"];
        CellExtents ext;
        ext.range_m = e.value("range_m", ext.range_m);
        ext.azimuth_deg = e.value("azimuth_deg", ext.azimuth_deg);
        ext.elevation_deg = e.value("elevation_deg", ext.elevation_deg);
        s.grid = build_grid(layout, ext);
    }
    if (j.contains("radar_position_m")) {
        const auto p = j["radar_position_m"].get<std::vector<double>>();
        require(p.size() == 3, "radar position needs three coordinates");
        s.radar_position_m = Vec3(p[0], p[1], p[2]);
    }
    s.validate();
    return s;
}

// --- models -----------------------------------------------------------------

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat_json(const Eigen::MatrixXd& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"col_major", vec_json(m.reshaped())}};
}

Eigen::MatrixXd json_mat(const json& j) {
    const Eigen::VectorXd v = json_vec(j.at("col_major"));
    const auto r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
    require(v.size() == r * c, "matrix payload has the wrong size");
    return v.reshaped(r, c);
}

json scaling_json(const FeatureScaling& s) { return {{"mean", vec_json(s.mean)}, {"scale", vec_json(s.scale)}}; }

FeatureScaling json_scaling(const json& j) { return {json_vec(j.at("mean")), json_vec(j.at("scale"))}; }

}  // namespace

json to_json(const RegressorSpec& s) {
    json j;
    j["kind"] = s.kind == RegressorKind::svr ? "svr" : "mlp";
    j["head"] = to_string(s.head);
    if (s.kind == RegressorKind::svr) {
        j["box_c"] = s.svr.box_c;
        j["tube_eps"] = s.svr.tube_eps;
        j["kernel"] = s.svr.kernel == KernelKind::rbf ? "rbf" : "linear";
        j["gamma"] = s.svr.gamma;
        j["tol"] = s.svr.tol;
    } else {
        j["hidden"] = s.mlp.hidden;
        j["learning_rate"] = s.mlp.learning_rate;
        j["momentum"] = s.mlp.momentum;
        j["epochs"] = s.mlp.epochs;
    }
    return j;
}

RegressorSpec regressor_spec_from_json(const json& j) {
    RegressorSpec s;
    const std::string kind = j.value("kind", std::string("svr"));
    if (kind != "svr" && kind != "mlp") throw ParameterError("unknown regressor kind: " + kind);
    s.kind = kind == "svr" ? RegressorKind::svr : RegressorKind::mlp;
    s.head = parse_target_head(j.value("head", std::string("degrees")));
    s.svr.box_c = j.value("box_c", s.svr.box_c);
    s.svr.tube_eps = j.value("tube_eps", s.svr.tube_eps);
    const std::string kernel = j.value("kernel", std::string("rbf"));
    if (kernel != "rbf" && kernel != "linear") throw ParameterError("unknown kernel: " + kernel);
    s.svr.kernel = kernel == "rbf" ? KernelKind::rbf : KernelKind::linear;
    s.svr.gamma = j.value("gamma", s.svr.gamma);
    s.svr.tol = j.value("tol", s.svr.tol);
    if (j.contains("hidden")) s.mlp.hidden = j["hidden"].get<std::vector<int>>();
    s.mlp.learning_rate = j.value("learning_rate", s.mlp.learning_rate);
    s.mlp.momentum = j.value("momentum", s.mlp.momentum);
    s.mlp.epochs = j.value("epochs", s.mlp.epochs);
    return s;
}

json to_json(const Regressor& m) {
    json j;
    j["spec"] = to_json(m.spec);
    j["feature_dim"] = m.feature_dim;
    if (m.spec.kind == RegressorKind::svr) {
        json arr = json::array();
        for (const SvrModel& s : m.svr)
            arr.push_back({{"scaling", scaling_json(s.scaling)},
                           {"support_vectors", mat_json(s.support_vectors)},
                           {"dual_coeffs", vec_json(s.dual_coeffs)},
                           {"bias", s.bias},
                           {"dual_objective", s.dual_objective}});
        j["svr"] = arr;
    } else {
        json w = json::array(), b = json::array();
        for (const auto& x : m.mlp.weights) w.push_back(mat_json(x));
        for (const auto& x : m.mlp.biases) b.push_back(vec_json(x));
        j["mlp"] = {{"layer_sizes", m.mlp.layer_sizes},
                    {"weights", w},
                    {"biases", b},
                    {"input_scaling", scaling_json(m.mlp.input_scaling)},
                    {"target_scaling", scaling_json(m.mlp.target_scaling)}};
    }
    return j;
}

Regressor regressor_from_json(const json& j) {
    Regressor m;
    m.spec = regressor_spec_from_json(j.at("spec"));
    m.feature_dim = j.at("feature_dim").get<Eigen::Index>();
    if (m.spec.kind == RegressorKind::svr) {
        for (const json& s : j.at("svr")) {
            SvrModel x;
            x.hyper = m.spec.svr;
            x.scaling = json_scaling(s.at("scaling"));
            x.support_vectors = json_mat(s.at("support_vectors"));
            x.dual_coeffs = json_vec(s.at("dual_coeffs"));
            x.bias = s.at("bias").get<double>();
            x.dual_objective = s.value("dual_objective", 0.0);
            m.svr.push_back(std::move(x));
        }
    } else {
        const json& p = j.at("mlp");
        m.mlp.layer_sizes = p.at("layer_sizes").get<std::vector<int>>();
        for (const json& w : p.at("weights")) m.mlp.weights.push_back(json_mat(w));
        for (const json& b : p.at("biases")) m.mlp.biases.push_back(json_vec(b));
        m.mlp.input_scaling = json_scaling(p.at("input_scaling"));
        m.mlp.target_scaling = json_scaling(p.at("target_scaling"));
    }
    return m;
}

json read_json_file(const std::string& path) {
    auto f = open_in(path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw ParameterError("invalid JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    auto f = open_out(path);
    f << j.dump(2) << '\n';
}

void write_text_file(const std::string& path, const std::string& text) {
    auto f = open_out(path);
    f << text;
}

}  // namespace mdlab
