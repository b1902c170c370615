#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mdlab/echo.hpp"
#include "mdlab/io.hpp"
#include "mdlab/regress.hpp"
#include "mdlab/sparse.hpp"

namespace mdlab {

/// Basic (dictionary), regression-training and test directions in degrees.
struct DirectionSets {
    std::vector<double> basic_deg;
    std::vector<double> train_deg;
    std::vector<double> test_deg;

    /// C = 12, C_t = 20, C_s = 36; denser sampling around 90 and 270 degrees.
    static DirectionSets full_scale();
    /// C = 8 every 45 degrees, C_t = 24 every 15 degrees, C_s = 36.
    static DirectionSets desk_scale();
    void validate() const;
};

/// Gain applied to every sample matrix ahead of sparse coding: none, unit
/// mean column energy per T_F block, or one gain for the whole run fixed by
/// the dictionary training frames.
enum class FrameScaling { none, per_block, global };

std::string to_string(FrameScaling s);
FrameScaling parse_frame_scaling(const std::string& s);

struct FeatureParams {
    int frame_len = 32;
    int atoms = 750;
    double xi = 0.13;
    double overlap = 0.5;
    int dict_max_iters = 50;
    double dict_tol = 1e-6;
    double lasso_gap_tol = 1e-8;
    SignatureNorm norm = SignatureNorm::squared;
    FrameScaling scaling = FrameScaling::per_block;
};

/// SVR (RBF, angle-pair head) over a small box_C x gamma grid.
std::vector<RegressorSpec> default_regressor_grid();

struct ExperimentConfig {
    static constexpr int kSchemaVersion = 1;

    std::string name = "experiment";
    GridLayout scene = GridLayout::full3d_8;
    std::vector<GridLayout> radar_configs;  ///< radar_config sweep grid; empty means {scene}
    DirectionSets directions = DirectionSets::full_scale();
    double total_time_s = 60.0;
    std::vector<double> frame_time_s{1.0};
    std::vector<double> snr_db{15.0};
    FeatureParams features;
    std::vector<RegressorSpec> regressors = default_regressor_grid();  ///< cross-validation grid
    double height_m = 1.8;
    double speed_mps = 1.0;
    DistortionParams distortion{.enabled = true};
    double range_m = 100.0;
    std::uint64_t seed = 1;
    int workers = 0;  ///< 0: MDLAB_WORKERS, else hardware concurrency
    bool write_spectrograms = false;

    void validate() const;
};

json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::string& path);

/// Stage-tagged pipeline failure.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct ResultRecord {
    double direction_deg = 0.0;
    double snr_db = 0.0;
    double frame_time_s = 0.0;
    std::string config_tag;
    int trial_id = 0;
    double predicted_deg = 0.0;
    double circ_error_deg = 0.0;
};

struct SummaryRow {
    std::string axis;
    std::string config_tag;
    double snr_db = 0.0;
    double frame_time_s = 0.0;
    double mean_eps_deg = 0.0;    ///< (1/C_s) sum over test directions of sqrt(MSE)
    double std_deg = 0.0;         ///< std of circular errors over all test blocks
    double mean_error_deg = 0.0;  ///< mean circular error over all test blocks
    std::vector<double> prob_within;
    std::size_t records = 0;
    std::string regressor;
};

/// One point of a sweep: radar configuration, SNR and block length.
struct SweepPoint {
    GridLayout scene = GridLayout::full3d_8;
    double snr_db = 15.0;
    double frame_time_s = 1.0;
};

enum class SweepAxis { snr, observation_time, radar_config };

std::string to_string(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& s);

/// Noise-free cubes keyed by (scene, split, direction), shared across the
/// SNR points of a sweep.
class CubeCache {
public:
    std::shared_ptr<const SlowTimeCube> get(const std::string& key, const std::function<SlowTimeCube()>& make);
    void clear();

private:
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<const SlowTimeCube>> cubes_;
};

struct PointOutput {
    std::vector<ResultRecord> records;
    SummaryRow summary;
    std::vector<DirectionError> per_direction;
    Dictionary dictionary;
    Regressor model;
    CrossValResult crossval;
    std::vector<FeatureRow> train_features;
    std::vector<FeatureRow> test_features;
    std::vector<std::pair<double, Spectrogram>> spectrograms;  ///< basic direction, cell 0
    std::map<std::string, double> stage_seconds;
};

/// Walker parameters for one direction, placed so that the walk passes
/// through (range_m, 0, 0) halfway through T_tot.
PedestrianParams centered_walk(const ExperimentConfig& cfg, double direction_deg);

void scale_frames(FrameMatrix& y, FrameScaling scaling, double gain = 1.0);

/// Energy signatures of the consecutive T_F blocks of one cube, labeled with
/// the cube's truth direction. `gain` only matters for FrameScaling::global.
std::vector<FeatureRow> block_signatures(const SlowTimeCube& cube, const LassoCoder& coder, const Dictionary& dict,
                                         const FeatureParams& fp, double frame_time_s, double gain = 1.0);

/// Full pipeline at one sweep point: walks, echoes, dictionaries, features,
/// cross-validation, training and evaluation.
PointOutput run_point(const ExperimentConfig& cfg, const SweepPoint& point, CubeCache* cache = nullptr);

struct SweepOutput {
    std::vector<ResultRecord> records;
    std::vector<SummaryRow> summary;
    std::vector<PointOutput> points;
};

/// The first grid value of each axis, as a single-point sweep.
SweepOutput run_pipeline(const ExperimentConfig& cfg);

SweepOutput sweep(const ExperimentConfig& cfg, SweepAxis axis);

/// Aggregates test records of one sweep point.
SummaryRow summarize(const std::vector<ResultRecord>& records, const std::string& axis);

std::string results_csv(const std::vector<ResultRecord>& records);
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Writes results.csv, summary.csv and artifacts/ (dictionaries, models,
/// features, optional spectrograms) under `out_dir`.
void write_outputs(const std::string& out_dir, const ExperimentConfig& cfg, const SweepOutput& out);

/// Worker count: explicit value, else MDLAB_WORKERS, else hardware threads.
int resolve_workers(int requested);

/// Runs fn(0..n-1) on a bounded pool. The first failure (lowest index) is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace mdlab
