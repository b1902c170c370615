#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mdlab/array.hpp"
#include "mdlab/grid.hpp"
#include "mdlab/locomotion.hpp"
#include "mdlab/random.hpp"

namespace mdlab {

enum class WaveformKind { lfm, cw };

/// Unit-energy LFM chirp of bandwidth f_B and length T_0. A CW waveform
/// carries no range resolution: its correlation gain is 1 at every delay.
struct LfmWaveform {
    WaveformKind kind = WaveformKind::lfm;
    double bandwidth_hz = 250e6;
    double pulse_len_s = 1e-6;

    void validate() const;
    double range_resolution_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz); }
};

struct RadarTiming {
    double carrier_hz = 24e9;
    double pri_s = 1e-3;
    int pulses_per_cpi = 32;
    long total_pulses = 32;

    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    void validate(const LfmWaveform& w) const;
};

struct RadarScene {
    std::string name = "full3d_8";
    UraGeometry tx;
    UraGeometry rx;
    LfmWaveform waveform;
    RadarTiming timing;
    SpatialGrid grid;
    Vec3 radar_position_m = Vec3::Zero();

    void validate() const;
    int mt() const { return tx.size(); }
    int mr() const { return rx.size(); }
};

/// The five comparison configurations, keyed by their grid layout:
/// single_1 (one element, CW), range_2 (one element, LFM), horizontal_4
/// (4x1 tx, 4x1 rx), vertical_4 (4x1 tx, 1x3 rx), full3d_8 (4x1 tx, 4x3 rx).
RadarScene preset_scene(GridLayout layout, long total_pulses = 32);

/// N x X complex slow-time matrix; row i is the signal of cell i.
struct SlowTimeCube {
    MatrixXc data;
    double pri_s = 1e-3;
    double noise_var = 0.0;
    double truth_direction_deg = 0.0;

    Eigen::Index cells() const { return data.rows(); }
    Eigen::Index pulses() const { return data.cols(); }
};

/// f_d = -2 (dR/dt) f_c / c; approaching scatterers give positive shifts.
double doppler_shift(const Vec3& velocity_mps, const Vec3& scatterer_pos, const Vec3& radar_pos, double carrier_hz);

/// Cross-correlation of the unit-energy waveform with a copy delayed by
/// `delay_offset_s`. For the LFM chirp this is the real value
/// (1 - |d|/T0) sinc(f_B d (1 - |d|/T0)) inside |d| < T0, and 0 outside.
cdouble lfm_autocorr(const LfmWaveform& w, double delay_offset_s);

/// Noise-free range-gated, beamformed slow-time echoes. The grid is centered
/// on the scatterer centroid once per CPI; the carrier phase uses the exact
/// per-pulse range of every scatterer.
SlowTimeCube synth_slow_time(const RadarScene& scene, const TrajectoryTensor& traj);

/// Cell-averaged SNR of a clean cube against per-sample noise variance:
/// mean_i(||x_i||^2 / X) / noise_var.
double snr_linear(const SlowTimeCube& clean, double noise_var);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Adds i.i.d. circular complex Gaussian noise so that `snr_linear` of the
/// input cube equals the requested SNR. +inf leaves the cube unchanged.
SlowTimeCube add_noise(const SlowTimeCube& clean, double snr_db, Rng& rng);

/// Scales the cube to unit mean per-sample power (receiver gain control).
void normalize_power(MatrixXc& data);

struct Spectrogram {
    std::vector<double> time_s;
    std::vector<double> frequency_hz;  ///< ascending, DC-centered
    Eigen::MatrixXd power;             ///< linear, frequency x time
};

/// Short-time transform with a Hann window of `window` samples.
Spectrogram spectrogram(const VectorXc& signal, double pri_s, int window = 32, double overlap = 0.5);

/// Square root of the second central moment of the time-averaged spectrum.
double doppler_bandwidth(const Spectrogram& s);

}  // namespace mdlab
