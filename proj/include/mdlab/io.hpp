#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mdlab/array.hpp"
#include "mdlab/echo.hpp"
#include "mdlab/locomotion.hpp"
#include "mdlab/regress.hpp"
#include "mdlab/sparse.hpp"

namespace mdlab {

using json = nlohmann::json;

/// Header lines of the CSV files read by the plotting layer.
namespace csv_schema {
inline constexpr std::string_view results =
    "direction_deg,snr_db,T_F_s,config_tag,trial_id,predicted_deg,circ_error_deg";
inline constexpr std::string_view summary =
    "axis,config_tag,snr_db,T_F_s,mean_eps_deg,std_deg,mean_error_deg,p_within_5,p_within_10,p_within_15,"
    "p_within_20,records,regressor";
inline constexpr std::string_view spectrogram = "time_s,frequency_hz,power_db";
inline constexpr std::string_view beam_pattern = "azimuth_deg,elevation_deg,gain_db";
inline constexpr std::string_view trajectory = "time_s,id,x,y,z,vx,vy,vz,re,im";
}  // namespace csv_schema

// Trajectory CSV: one row per (timestep, scatterer) with columns
//   time_s,id,x,y,z,vx,vy,vz,re,im
// preceded by a comment line "# model_tag=<tag> truth_direction_deg=<deg>".
void write_trajectory_csv(const std::string& path, const TrajectoryTensor& traj);
TrajectoryTensor read_trajectory_csv(const std::string& path);

// Cube file: "MDCUBE01", u64 N, u64 X, f64 pri_s, f64 noise_var,
// f64 truth_direction_deg, then N*X complex64 (re, im float32) row-major.
void write_cube(const std::string& path, const SlowTimeCube& cube);
SlowTimeCube read_cube(const std::string& path);

// Dictionary file: "MDDICT01", u64 header length, JSON header (rows, atoms,
// atoms_per_block, xi, seed, block_labels, basic_directions_deg), then
// rows*atoms float32 values, atom after atom. Loading projects atoms back
// onto the unit ball to absorb float32 rounding.
void write_dictionary(const std::string& path, const Dictionary& dict);
Dictionary read_dictionary(const std::string& path);

struct FeatureRow {
    double direction_deg = 0.0;
    int frame_block_id = 0;
    Eigen::VectorXd beta;
};

// Features CSV: direction_deg,frame_block_id,beta_1,...,beta_C
void write_features_csv(const std::string& path, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_features_csv(const std::string& path);
RegressionDataset to_dataset(const std::vector<FeatureRow>& rows, const std::string& split_tag);

// Spectrogram CSV: time_s,frequency_hz,power_db
void write_spectrogram_csv(const std::string& path, const Spectrogram& s);

// Beam pattern CSV: azimuth_deg,elevation_deg,gain_db, azimuth varying fastest.
std::string beam_pattern_csv(const BeamPattern& p);

json to_json(const UraGeometry& g);
json to_json(const RadarScene& s);
RadarScene scene_from_json(const json& j);

json to_json(const RegressorSpec& s);
RegressorSpec regressor_spec_from_json(const json& j);
json to_json(const Regressor& m);
Regressor regressor_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

/// Fixed-notation formatting used by every CSV writer.
std::string fmt(double v, int digits = 6);

}  // namespace mdlab
