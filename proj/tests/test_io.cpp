#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mdlab/harness.hpp"
#include "mdlab/io.hpp"

using namespace mdlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mdlab_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("trajectory CSV round trip") {
    TempDir dir;
    PedestrianParams p;
    p.direction_deg = 37.0;
    Rng rng(4);
    const TrajectoryTensor a = synth_walk(p, 1.4, 0.01, rng);
    write_trajectory_csv(dir.file("walk.csv"), a);
    const TrajectoryTensor b = read_trajectory_csv(dir.file("walk.csv"));
    REQUIRE(b.steps() == a.steps());
    CHECK(b.timestep_s() == doctest::Approx(a.timestep_s()));
    CHECK(b.truth_direction_deg == doctest::Approx(37.0));
    CHECK(b.model_tag == a.model_tag);
    double worst = 0.0;
    for (std::size_t t = 0; t < a.steps(); ++t)
        for (std::size_t q = 0; q < a.scatterers(); ++q) {
            worst = std::max(worst, (a.position(t, q) - b.position(t, q)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (a.velocity(t, q) - b.velocity(t, q)).cwiseAbs().maxCoeff());
            worst = std::max(worst, std::abs(a.reflectivity(t, q) - b.reflectivity(t, q)));
        }
    CHECK(worst < 1e-9);

    const std::string text = read_text(dir.file("walk.csv"));
    const std::string header = text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1);
    CHECK(header == csv_schema::trajectory);
    CHECK_THROWS(read_trajectory_csv(dir.file("missing.csv")));
}

TEST_CASE("cube file round trip keeps complex64 precision") {
    TempDir dir;
    SlowTimeCube c;
    c.data.resize(3, 5);
    for (Eigen::Index i = 0; i < c.data.size(); ++i) c.data(i) = cdouble(0.1 * i - 0.7, 1.0 / (i + 1.0));
    c.pri_s = 0.001;
    c.noise_var = 0.25;
    c.truth_direction_deg = 135.0;
    write_cube(dir.file("c.bin"), c);
    const SlowTimeCube d = read_cube(dir.file("c.bin"));
    REQUIRE(d.cells() == 3);
    REQUIRE(d.pulses() == 5);
    CHECK(d.pri_s == c.pri_s);
    CHECK(d.noise_var == c.noise_var);
    CHECK(d.truth_direction_deg == c.truth_direction_deg);
    CHECK((d.data - c.data).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(d.data(1, 2) - c.data(1, 2)) < 1e-6);
    CHECK(fs::file_size(dir.file("c.bin")) == 8 + 8 + 8 + 8 + 8 + 8 + 15 * 8);

    std::ofstream(dir.file("bad.bin")) << "NOTACUBE";
    CHECK_THROWS(read_cube(dir.file("bad.bin")));
}

TEST_CASE("dictionary file round trip") {
    TempDir dir;
    Dictionary d;
    d.atoms = Eigen::MatrixXd::Random(6, 4);
    for (Eigen::Index j = 0; j < 4; ++j) d.atoms.col(j).normalize();
    d.block_labels = {0, 0, 1, 1};
    d.basic_directions_deg = {0.0, 90.0};
    d.atoms_per_block = 2;
    d.xi = 0.13;
    d.seed = 42;
    write_dictionary(dir.file("d.bin"), d);
    const Dictionary e = read_dictionary(dir.file("d.bin"));
    CHECK(e.atoms.rows() == 6);
    CHECK(e.atom_count() == 4);
    CHECK((e.atoms - d.atoms).cwiseAbs().maxCoeff() < 1e-6);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(e.atoms.col(j).norm() <= 1.0);
    CHECK(e.block_labels == d.block_labels);
    CHECK(e.basic_directions_deg == d.basic_directions_deg);
    CHECK(e.atoms_per_block == 2);
    CHECK(e.xi == 0.13);
    CHECK(e.seed == 42);
}

TEST_CASE("features CSV round trip and dataset conversion") {
    TempDir dir;
    std::vector<FeatureRow> rows;
    for (int i = 0; i < 4; ++i) {
        FeatureRow r;
        r.direction_deg = 30.0 * i;
        r.frame_block_id = i;
        r.beta = Eigen::Vector3d(0.5 * i, 1.0 / (i + 1), 1e-4 * i);
        rows.push_back(r);
    }
    write_features_csv(dir.file("f.csv"), rows);
    CHECK(first_line(read_text(dir.file("f.csv"))) == "direction_deg,frame_block_id,beta_1,beta_2,beta_3");
    const auto back = read_features_csv(dir.file("f.csv"));
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].direction_deg == rows[i].direction_deg);
        CHECK(back[i].frame_block_id == rows[i].frame_block_id);
        CHECK((back[i].beta - rows[i].beta).cwiseAbs().maxCoeff() < 1e-9);
    }
    const RegressionDataset ds = to_dataset(back, "regr_test");
    CHECK(ds.size() == 4);
    CHECK(ds.split_tag == "regr_test");
    CHECK(ds.targets_deg(3) == 90.0);
    CHECK(ds.features(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("regressor JSON round trip predicts identically") {
    Eigen::MatrixXd x(12, 2);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) {
        const double r = deg2rad(30.0 * i);
        x.row(i) << std::cos(r), std::sin(r);
        y(i) = 30.0 * i;
    }
    for (RegressorKind kind : {RegressorKind::svr, RegressorKind::mlp}) {
        RegressorSpec spec;
        spec.kind = kind;
        spec.head = TargetHead::angle_pair;
        spec.mlp.epochs = 50;
        Rng rng(1);
        const Regressor m = train_regressor(RegressionDataset{x, y}, spec, rng);
        const Regressor n = regressor_from_json(json::parse(to_json(m).dump()));
        for (int i = 0; i < 12; ++i) {
            const Eigen::VectorXd q = x.row(i).transpose() * 0.9;
            CHECK(n.predict(q) == doctest::Approx(m.predict(q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("plot-facing CSV schemas") {
    CHECK(first_line(results_csv({})) == csv_schema::results);
    CHECK(first_line(summary_csv({})) == csv_schema::summary);

    SummaryRow s;
    s.axis = "snr";
    s.config_tag = "full3d_8";
    s.prob_within = {0.1, 0.2, 0.3, 0.4};
    s.regressor = "svr";
    const std::string text = summary_csv({s});
    const std::string row = text.substr(text.find('\n') + 1);
    auto commas = [](std::string_view v) { return std::count(v.begin(), v.end(), ','); };
    CHECK(commas(row) == commas(csv_schema::summary));

    const BeamPattern p = beam_pattern(UraGeometry{1, 4, 12.0, 0.5}, UraGeometry{3, 4, 36.0, 32.0}, {},
                                       ScanGrid::uniform(1.0, 0.5, 0.25));
    const std::string bp = beam_pattern_csv(p);
    CHECK(first_line(bp) == csv_schema::beam_pattern);
    CHECK(std::count(bp.begin(), bp.end(), '\n') ==
          static_cast<long>(1 + p.azimuth_deg.size() * p.elevation_deg.size()));
}

TEST_CASE("spectrogram CSV of a 160 Hz tone peaks at 160 Hz") {
    TempDir dir;
    const double pri = 1e-3;
    VectorXc x(1024);
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = std::polar(1.0, 2 * kPi * 160.0 * static_cast<double>(k) * pri);
    write_spectrogram_csv(dir.file("s.csv"), spectrogram(x, pri));

    std::ifstream f(dir.file("s.csv"));
    std::string line;
    std::getline(f, line);
    CHECK(line == csv_schema::spectrogram);
    std::map<double, double> total;
    while (std::getline(f, line)) {
        double t, fr, db;
        char c1, c2;
        std::istringstream(line) >> t >> c1 >> fr >> c2 >> db;
        total[fr] += std::pow(10.0, db / 10.0);
    }
    const auto peak = std::max_element(total.begin(), total.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    CHECK(std::abs(peak->first - 160.0) <= 1.0 / (32 * pri));
}

TEST_CASE("scene JSON round trip") {
    const RadarScene s = preset_scene(GridLayout::horizontal_4, 256);
    const RadarScene t = scene_from_json(json::parse(to_json(s).dump()));
    CHECK(to_json(t) == to_json(s));
    CHECK(t.grid.size() == 4);
}
