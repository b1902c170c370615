#include "mdlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace mdlab {

namespace fs = std::filesystem;

// --- direction sets ---------------------------------------------------------

DirectionSets DirectionSets::full_scale() {
    DirectionSets d;
    d.basic_deg = {0, 40, 75, 90, 105, 140, 180, 220, 255, 270, 285, 320};
    d.train_deg = {0, 20, 40, 60, 75, 90, 105, 120, 140, 160, 180, 200, 220, 240, 255, 270, 285, 300, 320, 340};
    for (int k = 0; k < 36; ++k) d.test_deg.push_back(10.0 * k);
    return d;
}

DirectionSets DirectionSets::desk_scale() {
    DirectionSets d;
    d.basic_deg = {0, 45, 90, 135, 180, 225, 270, 315};
    for (int k = 0; k < 24; ++k) d.train_deg.push_back(15.0 * k);
    for (int k = 0; k < 36; ++k) d.test_deg.push_back(10.0 * k);
    return d;
}

void DirectionSets::validate() const {
    require(!basic_deg.empty(), "at least one basic direction is required");
    require(!train_deg.empty() && !test_deg.empty(), "training and test direction sets must be nonempty");
    for (const auto* set : {&basic_deg, &train_deg, &test_deg})
        for (double d : *set) require(d >= 0.0 && d < 360.0, "directions must lie in [0, 360)");
    const std::set<double> train(train_deg.begin(), train_deg.end());
    for (double b : basic_deg)
        require(train.count(b) == 1, "every basic direction must also be a regression-training direction");
}

// --- config -----------------------------------------------------------------

std::vector<RegressorSpec> default_regressor_grid() {
    std::vector<RegressorSpec> grid;
    for (double c : {1.0, 10.0, 100.0})
        for (double g : {0.1, 0.5}) {
            RegressorSpec s;
            s.kind = RegressorKind::svr;
            s.head = TargetHead::angle_pair;
            s.svr.box_c = c;
            s.svr.gamma = g;
            s.svr.tube_eps = 0.01;
            grid.push_back(s);
        }
    return grid;
}

void ExperimentConfig::validate() const {
    directions.validate();
    require(total_time_s > 0.0, "T_tot must be positive");
    require(!frame_time_s.empty() && !snr_db.empty(), "T_F and SNR grids must be nonempty");
    for (double tf : frame_time_s) {
        require(tf > 0.0 && tf <= total_time_s, "T_F must lie in (0, T_tot]");
        const double blocks = total_time_s / tf;
        require(std::abs(blocks - std::round(blocks)) < 1e-9, "T_F must divide T_tot");
    }
    for (double s : snr_db) require(!std::isnan(s) && s != -std::numeric_limits<double>::infinity(), "invalid SNR");
    require(features.frame_len >= 1 && features.atoms >= 1, "frame length and atom count must be positive");
    require(features.xi > 0.0, "xi must be positive");
    require(features.overlap >= 0.0 && features.overlap < 1.0, "overlap must be in [0, 1)");
    require(!regressors.empty(), "regressor grid must be nonempty");
    require(height_m > 0.0 && speed_mps > 0.0 && range_m > 0.0, "height, speed and range must be positive");
}

namespace {

json snr_json(double s) { return std::isinf(s) ? json("inf") : json(s); }

double snr_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kNoNoise;
        throw ParameterError("invalid SNR value: " + s);
    }
    return j.get<double>();
}

/// Expands array-valued hyperparameters of one regressor entry into a product.
std::vector<RegressorSpec> expand_regressor(const json& j) {
    std::vector<json> out{j};
    for (const char* key : {"box_c", "tube_eps", "gamma", "learning_rate", "epochs", "hidden"}) {
        if (!j.contains(key)) continue;
        const json& v = j[key];
        const bool grid = std::string(key) == "hidden" ? (v.is_array() && !v.empty() && v[0].is_array()) : v.is_array();
        if (!grid) continue;
        std::vector<json> next;
        for (const json& base : out)
            for (const json& value : v) {
                json e = base;
                e[key] = value;
                next.push_back(e);
            }
        out = std::move(next);
    }
    std::vector<RegressorSpec> specs;
    for (const json& e : out) specs.push_back(regressor_spec_from_json(e));
    return specs;
}

json distortion_json(const DistortionParams& d) {
    return {{"enabled", d.enabled},
            {"height_lo_m", d.height_lo_m},
            {"height_hi_m", d.height_hi_m},
            {"accel_std_mps2", d.accel_std_mps2},
            {"direction_std_rad", d.direction_std_rad},
            {"direction_corr_time_s", d.direction_corr_time_s}};
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    json layouts = json::array();
    for (GridLayout l : c.radar_configs) layouts.push_back(to_string(l));
    json snr = json::array();
    for (double s : c.snr_db) snr.push_back(snr_json(s));
    json regs = json::array();
    for (const RegressorSpec& r : c.regressors) regs.push_back(to_json(r));
    return {
        {"schema_version", ExperimentConfig::kSchemaVersion},
        {"name", c.name},
        {"scene", to_string(c.scene)},
        {"radar_configs", layouts},
        {"directions",
         {{"basic_deg", c.directions.basic_deg},
          {"train_deg", c.directions.train_deg},
          {"test_deg", c.directions.test_deg}}},
        {"total_time_s", c.total_time_s},
        {"frame_time_s", c.frame_time_s},
        {"snr_db", snr},
        {"features",
         {{"frame_len", c.features.frame_len},
          {"atoms", c.features.atoms},
          {"xi", c.features.xi},
          {"overlap", c.features.overlap},
          {"dict_max_iters", c.features.dict_max_iters},
          {"dict_tol", c.features.dict_tol},
          {"lasso_gap_tol", c.features.lasso_gap_tol},
          {"signature", c.features.norm == SignatureNorm::squared ? "squared" : "absolute"},
          {"frame_scaling", to_string(c.features.scaling)}}},
        {"regressors", regs},
        {"pedestrian",
         {{"height_m", c.height_m}, {"speed_mps", c.speed_mps}, {"distortion", distortion_json(c.distortion)}}},
        {"range_m", c.range_m},
        {"seed", c.seed},
        {"workers", c.workers},
        {"write_spectrograms", c.write_spectrograms},
    };
}

ExperimentConfig config_from_json(const json& j) {
    const int version = j.value("schema_version", -1);
    if (version != ExperimentConfig::kSchemaVersion)
        throw ParameterError("unsupported config schema_version " + std::to_string(version));
    ExperimentConfig c;
    c.name = j.value("name", c.name);
    if (j.contains("scene")) c.scene = parse_grid_layout(j["scene"].get<std::string>());
    if (j.contains("radar_configs"))
        for (const json& l : j["radar_configs"]) c.radar_configs.push_back(parse_grid_layout(l.get<std::string>()));
    if (j.contains("directions")) {
        const json& d = j["directions"];
        if (d.is_string()) {
            const auto preset = d.get<std::string>();
            if (preset == "desk") c.directions = DirectionSets::desk_scale();
            else if (preset == "full") c.directions = DirectionSets::full_scale();
            else throw ParameterError("unknown direction preset: " + preset);
        } else {
            c.directions.basic_deg = d.at("basic_deg").get<std::vector<double>>();
            c.directions.train_deg = d.at("train_deg").get<std::vector<double>>();
            c.directions.test_deg = d.at("test_deg").get<std::vector<double>>();
        }
    }
    c.total_time_s = j.value("total_time_s", c.total_time_s);
    if (j.contains("frame_time_s")) c.frame_time_s = j["frame_time_s"].get<std::vector<double>>();
    if (j.contains("snr_db")) {
        c.snr_db.clear();
        for (const json& s : j["snr_db"]) c.snr_db.push_back(snr_from_json(s));
    }
    if (j.contains("features")) {
        const json& f = j["features"];
        c.features.frame_len = f.value("frame_len", c.features.frame_len);
        c.features.atoms = f.value("atoms", c.features.atoms);
        c.features.xi = f.value("xi", c.features.xi);
        c.features.overlap = f.value("overlap", c.features.overlap);
        c.features.dict_max_iters = f.value("dict_max_iters", c.features.dict_max_iters);
        c.features.dict_tol = f.value("dict_tol", c.features.dict_tol);
        c.features.lasso_gap_tol = f.value("lasso_gap_tol", c.features.lasso_gap_tol);
        const std::string sig = f.value("signature", std::string("squared"));
        if (sig != "squared" && sig != "absolute") throw ParameterError("unknown signature norm: " + sig);
        c.features.norm = sig == "squared" ? SignatureNorm::squared : SignatureNorm::absolute;
        if (f.contains("frame_scaling")) c.features.scaling = parse_frame_scaling(f["frame_scaling"].get<std::string>());
    }
    if (j.contains("regressors")) c.regressors.clear();
    if (j.contains("regressors"))
        for (const json& r : j["regressors"])
            for (const RegressorSpec& s : expand_regressor(r)) c.regressors.push_back(s);
    if (j.contains("pedestrian")) {
        const json& p = j["pedestrian"];
        c.height_m = p.value("height_m", c.height_m);
        c.speed_mps = p.value("speed_mps", c.speed_mps);
        if (p.contains("distortion")) {
            const json& d = p["distortion"];
            c.distortion.enabled = d.value("enabled", c.distortion.enabled);
            c.distortion.height_lo_m = d.value("height_lo_m", c.distortion.height_lo_m);
            c.distortion.height_hi_m = d.value("height_hi_m", c.distortion.height_hi_m);
            c.distortion.accel_std_mps2 = d.value("accel_std_mps2", c.distortion.accel_std_mps2);
            c.distortion.direction_std_rad = d.value("direction_std_rad", c.distortion.direction_std_rad);
            c.distortion.direction_corr_time_s = d.value("direction_corr_time_s", c.distortion.direction_corr_time_s);
        }
    }
    c.range_m = j.value("range_m", c.range_m);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.write_spectrograms = j.value("write_spectrograms", c.write_spectrograms);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

std::string to_string(FrameScaling s) {
    switch (s) {
        case FrameScaling::none: return "none";
        case FrameScaling::per_block: return "per_block";
        case FrameScaling::global: return "global";
    }
    return "?";
}

FrameScaling parse_frame_scaling(const std::string& s) {
    if (s == "none") return FrameScaling::none;
    if (s == "per_block") return FrameScaling::per_block;
    if (s == "global") return FrameScaling::global;
    throw ParameterError("unknown frame scaling: " + s);
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::snr: return "snr";
        case SweepAxis::observation_time: return "observation_time";
        case SweepAxis::radar_config: return "radar_config";
    }
    return "?";
}

SweepAxis parse_sweep_axis(const std::string& s) {
    if (s == "snr") return SweepAxis::snr;
    if (s == "observation_time") return SweepAxis::observation_time;
    if (s == "radar_config") return SweepAxis::radar_config;
    throw ParameterError("unknown sweep axis: " + s);
}

// --- workers ----------------------------------------------------------------

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MDLAB_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const auto w = static_cast<std::size_t>(std::max(1, workers));
    if (w == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < std::min(w, n); ++k) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::shared_ptr<const SlowTimeCube> CubeCache::get(const std::string& key, const std::function<SlowTimeCube()>& make) {
    {
        std::lock_guard lock(mu_);
        auto it = cubes_.find(key);
        if (it != cubes_.end()) return it->second;
    }
    auto cube = std::make_shared<const SlowTimeCube>(make());
    std::lock_guard lock(mu_);
    return cubes_.emplace(key, std::move(cube)).first->second;
}

void CubeCache::clear() {
    std::lock_guard lock(mu_);
    cubes_.clear();
}

// --- pipeline ---------------------------------------------------------------

namespace {

enum Split : std::uint64_t { kDictSplit = 1, kTrainSplit = 2, kTestSplit = 3 };
enum Stream : std::uint64_t { kWalkStream = 11, kNoiseStream = 12, kDictStream = 13, kCvStream = 14, kFitStream = 15 };

std::uint64_t mdeg(double deg) { return static_cast<std::uint64_t>(std::llround(deg * 1000.0)); }

const char* split_name(Split s) {
    switch (s) {
        case kDictSplit: return "dict_train";
        case kTrainSplit: return "regr_train";
        case kTestSplit: return "regr_test";
    }
    return "?";
}

template <typename F>
auto staged(const char* stage, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct PointContext {
    const ExperimentConfig& cfg;
    RadarScene scene;
    double snr_db;
    CubeCache& cache;

    SlowTimeCube clean(Split split, double dir) const {
        const PedestrianParams p = centered_walk(cfg, dir);
        Rng rng = make_rng(cfg.seed, {kWalkStream, split, mdeg(dir)});
        const TrajectoryTensor traj = synth_walk(p, cfg.total_time_s, scene.timing.pri_s, rng, scene.radar_position_m);
        return synth_slow_time(scene, traj);
    }

    SlowTimeCube noisy(Split split, double dir) const {
        const std::string key = scene.name + "/" + split_name(split) + "/" + std::to_string(mdeg(dir));
        auto c = cache.get(key, [&] { return clean(split, dir); });
        Rng rng = make_rng(cfg.seed, {kNoiseStream, split, mdeg(dir)});
        return add_noise(*c, snr_db, rng);
    }
};

}  // namespace

PedestrianParams centered_walk(const ExperimentConfig& cfg, double direction_deg) {
    PedestrianParams p;
    p.height_m = cfg.height_m;
    p.speed_mps = cfg.speed_mps;
    p.direction_deg = direction_deg;
    p.distortion = cfg.distortion;
    const double half = 0.5 * cfg.speed_mps * cfg.total_time_s;
    const double th = deg2rad(direction_deg);
    p.start_position_m = Vec3(cfg.range_m - half * std::cos(th), -half * std::sin(th), 0.0);
    return p;
}

void scale_frames(FrameMatrix& y, FrameScaling scaling, double gain) {
    if (scaling == FrameScaling::per_block) normalize_frames(y);
    else if (scaling == FrameScaling::global) y.data *= gain;
}

std::vector<FeatureRow> block_signatures(const SlowTimeCube& cube, const LassoCoder& coder, const Dictionary& dict,
                                         const FeatureParams& fp, double frame_time_s, double gain) {
    const auto block_len = static_cast<Eigen::Index>(std::llround(frame_time_s / cube.pri_s));
    require(block_len >= fp.frame_len, "a T_F block is shorter than one frame");
    const Eigen::Index blocks = cube.pulses() / block_len;
    LassoOptions lasso;
    lasso.gap_tol = fp.lasso_gap_tol;
    std::vector<FeatureRow> rows;
    for (Eigen::Index f = 0; f < blocks; ++f) {
        FrameMatrix y = frames_from_slow_time(cube.data.middleCols(f * block_len, block_len), fp.frame_len, fp.overlap);
        scale_frames(y, fp.scaling, gain);
        const SparseCodes codes{coder.code(y.data, fp.xi, lasso), fp.xi};
        rows.push_back({cube.truth_direction_deg, static_cast<int>(f), energy_signature(codes, dict, fp.norm).values});
    }
    return rows;
}

PointOutput run_point(const ExperimentConfig& cfg, const SweepPoint& point, CubeCache* cache_in) {
    cfg.validate();
    CubeCache local_cache;
    CubeCache& cache = cache_in != nullptr ? *cache_in : local_cache;
    const int workers = resolve_workers(cfg.workers);
    const FeatureParams& fp = cfg.features;

    PointOutput out;
    const RadarScene scene = staged("scene", [&] {
        RadarScene s = preset_scene(point.scene);
        s.timing.total_pulses = std::llround(cfg.total_time_s / s.timing.pri_s);
        s.validate();
        return s;
    });
    const PointContext ctx{cfg, scene, point.snr_db, cache};
    const auto block_len = static_cast<Eigen::Index>(std::llround(point.frame_time_s / scene.timing.pri_s));
    require(block_len >= fp.frame_len, "a T_F block is shorter than one frame");

    // Per-direction dictionaries on the basic directions.
    Timer t_dict;
    const auto& basic = cfg.directions.basic_deg;
    std::vector<FrameMatrix> dict_frames(basic.size());
    std::vector<Spectrogram> spectra(basic.size());
    parallel_for(basic.size(), workers, [&](std::size_t c) {
        staged("dictionary", [&] {
            const SlowTimeCube cube = ctx.noisy(kDictSplit, basic[c]);
            if (cfg.write_spectrograms) spectra[c] = spectrogram(cube.data.row(0).transpose(), cube.pri_s, fp.frame_len, 0.5);
            dict_frames[c] = frames_from_slow_time(cube.data, fp.frame_len, fp.overlap);
            return 0;
        });
    });
    double gain = 1.0;
    if (fp.scaling == FrameScaling::global) {
        double energy = 0.0;
        Eigen::Index cols = 0;
        for (const FrameMatrix& y : dict_frames) {
            energy += y.data.squaredNorm();
            cols += y.data.cols();
        }
        if (energy > 0.0) gain = 1.0 / std::sqrt(energy / static_cast<double>(cols));
    }
    std::vector<Dictionary> dicts(basic.size());
    parallel_for(basic.size(), workers, [&](std::size_t c) {
        staged("dictionary", [&] {
            FrameMatrix& y = dict_frames[c];
            scale_frames(y, fp.scaling, gain);
            DictLearnOptions opt;
            opt.atoms = fp.atoms;
            opt.xi = fp.xi;
            opt.max_iters = fp.dict_max_iters;
            opt.tol = fp.dict_tol;
            opt.lasso.gap_tol = fp.lasso_gap_tol;
            const std::uint64_t seed = substream_seed(cfg.seed, {kDictStream, mdeg(basic[c])});
            Rng rng(seed);
            DictLearnResult r = learn_dictionary(y, opt, rng);
            r.dictionary.seed = seed;
            dicts[c] = std::move(r.dictionary);
            y = FrameMatrix{};
            return 0;
        });
    });
    out.dictionary = merge_dictionaries(dicts, basic);
    dicts.clear();
    if (cfg.write_spectrograms)
        for (std::size_t c = 0; c < basic.size(); ++c) out.spectrograms.emplace_back(basic[c], std::move(spectra[c]));
    out.stage_seconds["dictionary"] = t_dict.seconds();

    // Energy signatures for every T_F block of the training and test walks.
    Timer t_feat;
    const LassoCoder coder(out.dictionary.atoms);
    auto features_for = [&](Split split, const std::vector<double>& dirs) {
        std::vector<std::vector<FeatureRow>> per_dir(dirs.size());
        parallel_for(dirs.size(), workers, [&](std::size_t d) {
            staged("features", [&] {
                const SlowTimeCube cube = ctx.noisy(split, dirs[d]);
                per_dir[d] = block_signatures(cube, coder, out.dictionary, fp, point.frame_time_s, gain);
                for (FeatureRow& r : per_dir[d]) r.direction_deg = dirs[d];
                return 0;
            });
        });
        std::vector<FeatureRow> rows;
        for (auto& v : per_dir) rows.insert(rows.end(), v.begin(), v.end());
        return rows;
    };
    out.train_features = features_for(kTrainSplit, cfg.directions.train_deg);
    out.test_features = features_for(kTestSplit, cfg.directions.test_deg);
    out.stage_seconds["features"] = t_feat.seconds();

    // Cross-validated regression.
    Timer t_reg;
    const RegressionDataset train = to_dataset(out.train_features, "regr_train");
    staged("regression", [&] {
        Rng cv_rng = make_rng(cfg.seed, {kCvStream});
        out.crossval = crossval_2fold(train, cfg.regressors, cv_rng);
        Rng fit_rng = make_rng(cfg.seed, {kFitStream});
        out.model = train_regressor(train, cfg.regressors[out.crossval.best_index], fit_rng);
        return 0;
    });
    out.stage_seconds["regression"] = t_reg.seconds();

    std::vector<double> truths, preds;
    staged("evaluate", [&] {
        for (const FeatureRow& r : out.test_features) {
            ResultRecord rec;
            rec.direction_deg = r.direction_deg;
            rec.snr_db = point.snr_db;
            rec.frame_time_s = point.frame_time_s;
            rec.config_tag = scene.name;
            rec.trial_id = r.frame_block_id;
            rec.predicted_deg = out.model.predict(r.beta);
            rec.circ_error_deg = circular_error(rec.direction_deg, rec.predicted_deg);
            truths.push_back(rec.direction_deg);
            preds.push_back(rec.predicted_deg);
            out.records.push_back(rec);
        }
        out.per_direction = mse_by_direction(truths, preds);
        return 0;
    });
    out.summary = summarize(out.records, "point");
    out.summary.regressor = describe(out.model.spec);
    return out;
}

SummaryRow summarize(const std::vector<ResultRecord>& records, const std::string& axis) {
    require(!records.empty(), "no records to summarize");
    SummaryRow s;
    s.axis = axis;
    s.config_tag = records.front().config_tag;
    s.snr_db = records.front().snr_db;
    s.frame_time_s = records.front().frame_time_s;
    std::vector<double> truths, preds, errs;
    for (const ResultRecord& r : records) {
        truths.push_back(r.direction_deg);
        preds.push_back(r.predicted_deg);
        errs.push_back(r.circ_error_deg);
    }
    const auto per_dir = mse_by_direction(truths, preds);
    for (const DirectionError& d : per_dir) s.mean_eps_deg += d.eps_deg;
    s.mean_eps_deg /= static_cast<double>(per_dir.size());
    const double n = static_cast<double>(errs.size());
    s.mean_error_deg = std::accumulate(errs.begin(), errs.end(), 0.0) / n;
    double var = 0.0;
    for (double e : errs) var += (e - s.mean_error_deg) * (e - s.mean_error_deg);
    s.std_deg = std::sqrt(var / n);
    s.prob_within = prob_within(errs);
    s.records = records.size();
    return s;
}

SweepOutput sweep(const ExperimentConfig& cfg, SweepAxis axis) {
    cfg.validate();
    std::vector<SweepPoint> points;
    const SweepPoint base{cfg.scene, cfg.snr_db.front(), cfg.frame_time_s.front()};
    switch (axis) {
        case SweepAxis::snr:
            for (double s : cfg.snr_db) points.push_back({base.scene, s, base.frame_time_s});
            break;
        case SweepAxis::observation_time:
            for (double tf : cfg.frame_time_s) points.push_back({base.scene, base.snr_db, tf});
            break;
        case SweepAxis::radar_config: {
            const auto layouts = cfg.radar_configs.empty() ? std::vector<GridLayout>{cfg.scene} : cfg.radar_configs;
            for (GridLayout l : layouts) points.push_back({l, base.snr_db, base.frame_time_s});
            break;
        }
    }
    SweepOutput out;
    CubeCache cache;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (k > 0 && points[k].scene != points[k - 1].scene) cache.clear();
        PointOutput p = run_point(cfg, points[k], &cache);
        SummaryRow row = p.summary;
        row.axis = to_string(axis);
        out.summary.push_back(row);
        out.records.insert(out.records.end(), p.records.begin(), p.records.end());
        out.points.push_back(std::move(p));
    }
    return out;
}

SweepOutput run_pipeline(const ExperimentConfig& cfg) {
    ExperimentConfig single = cfg;
    single.snr_db.resize(1);
    single.frame_time_s.resize(1);
    single.radar_configs.clear();
    return sweep(single, SweepAxis::snr);
}

std::string results_csv(const std::vector<ResultRecord>& records) {
    std::ostringstream os;
    os << csv_schema::results << '\n';
    for (const ResultRecord& r : records)
        os << fmt(r.direction_deg, 3) << ',' << fmt(r.snr_db, 3) << ',' << fmt(r.frame_time_s, 4) << ','
           << r.config_tag << ',' << r.trial_id << ',' << fmt(r.predicted_deg, 6) << ',' << fmt(r.circ_error_deg, 6)
           << '\n';
    return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os << csv_schema::summary << '\n';
    for (const SummaryRow& s : rows) {
        os << s.axis << ',' << s.config_tag << ',' << fmt(s.snr_db, 3) << ',' << fmt(s.frame_time_s, 4) << ','
           << fmt(s.mean_eps_deg, 6) << ',' << fmt(s.std_deg, 6) << ',' << fmt(s.mean_error_deg, 6);
        for (double p : s.prob_within) os << ',' << fmt(p, 6);
        os << ',' << s.records << ',' << '"' << s.regressor << '"' << '\n';
    }
    return os.str();
}

void write_outputs(const std::string& out_dir, const ExperimentConfig& cfg, const SweepOutput& out) {
    const fs::path root(out_dir);
    fs::create_directories(root / "artifacts");
    write_text_file((root / "results.csv").string(), results_csv(out.records));
    write_text_file((root / "summary.csv").string(), summary_csv(out.summary));
    write_json_file((root / "artifacts" / "config.json").string(), to_json(cfg));
    for (std::size_t k = 0; k < out.points.size(); ++k) {
        const PointOutput& p = out.points[k];
        std::ostringstream name;
        name << "point" << k << "_" << p.summary.config_tag << "_snr" << fmt(p.summary.snr_db, 1) << "_tf"
             << fmt(p.summary.frame_time_s, 3);
        const fs::path dir = root / "artifacts" / name.str();
        fs::create_directories(dir);
        write_dictionary((dir / "dictionary.mdd").string(), p.dictionary);
        json model = to_json(p.model);
        model["crossval_mean_error_deg"] = p.crossval.mean_error_deg;
        model["crossval_best_index"] = p.crossval.best_index;
        write_json_file((dir / "model.json").string(), model);
        write_features_csv((dir / "train_features.csv").string(), p.train_features);
        write_features_csv((dir / "test_features.csv").string(), p.test_features);
        for (const auto& [deg, spec] : p.spectrograms)
            write_spectrogram_csv((dir / ("spectrogram_" + fmt(deg, 0) + ".csv")).string(), spec);
    }
}

}  // namespace mdlab
