#include "mdlab/echo.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

namespace mdlab {

void LfmWaveform::validate() const {
    if (kind == WaveformKind::cw) {
        require(pulse_len_s > 0.0, "pulse length must be positive");
        return;
    }
    require(bandwidth_hz > 0.0, "LFM bandwidth must be positive");
    require(pulse_len_s > 0.0, "pulse length must be positive");
}

void RadarTiming::validate(const LfmWaveform& w) const {
    require(carrier_hz > 0.0, "carrier frequency must be positive");
    require(pri_s >= w.pulse_len_s, "PRI must be at least the pulse length");
    require(pulses_per_cpi >= 1, "pulses per CPI must be >= 1");
    require(total_pulses >= pulses_per_cpi, "total pulses must be >= pulses per CPI");
}

void RadarScene::validate() const {
    tx.validate();
    rx.validate();
    waveform.validate();
    timing.validate(waveform);
    require(grid.size() > 0, "spatial grid must be nonempty");
}

RadarScene preset_scene(GridLayout layout, long total_pulses) {
    RadarScene s;
    s.name = to_string(layout);
    s.timing.total_pulses = total_pulses;
    s.grid = build_grid(layout, CellExtents{});
    const UraGeometry single{1, 1, 0.5, 0.5};
    const UraGeometry tx4{1, 4, 12.0, 0.5};
    switch (layout) {
        case GridLayout::single_1:
            s.tx = single;
            s.rx = single;
            s.waveform.kind = WaveformKind::cw;
            break;
        case GridLayout::range_2:
            s.tx = single;
            s.rx = single;
            break;
        case GridLayout::horizontal_4:
            s.tx = tx4;
            s.rx = UraGeometry{1, 4, 36.0, 0.5};
            break;
        case GridLayout::vertical_4:
            s.tx = tx4;
            s.rx = UraGeometry{3, 1, 0.5, 32.0};
            break;
        case GridLayout::full3d_8:
            s.tx = tx4;
            s.rx = UraGeometry{3, 4, 36.0, 32.0};
            break;
    }
    return s;
}

double doppler_shift(const Vec3& velocity_mps, const Vec3& scatterer_pos, const Vec3& radar_pos, double carrier_hz) {
    const Vec3 los = scatterer_pos - radar_pos;
    const double r = los.norm();
    require(r > 0.0, "scatterer coincides with the radar");
    const double range_rate = velocity_mps.dot(los) / r;
    return -2.0 * range_rate * carrier_hz / kSpeedOfLight;
}

cdouble lfm_autocorr(const LfmWaveform& w, double delay_offset_s) {
    if (w.kind == WaveformKind::cw) return {1.0, 0.0};
    const double d = std::abs(delay_offset_s);
    if (d >= w.pulse_len_s) return {0.0, 0.0};
    const double taper = 1.0 - d / w.pulse_len_s;
    const double x = w.bandwidth_hz * d * taper;
    const double sinc = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
    return {taper * sinc, 0.0};
}

namespace {

DirectionCosines<double> cosines_of(const Vec3& rel, double r) { return {rel.y() / r, rel.z() / r}; }

}  // namespace

SlowTimeCube synth_slow_time(const RadarScene& scene, const TrajectoryTensor& traj) {
    scene.validate();
    const RadarTiming& tm = scene.timing;
    if (std::abs(traj.timestep_s() - tm.pri_s) > 1e-9 * tm.pri_s)
        throw ParameterError("trajectory timestep must equal the PRI (one snapshot per pulse)");
    if (static_cast<long>(traj.steps()) < tm.total_pulses)
        throw ParameterError("trajectory does not cover the requested number of pulses");

    const long X = tm.total_pulses;
    const std::size_t N = scene.grid.size();
    const std::size_t Q = traj.scatterers();
    const double lambda = tm.wavelength_m();
    const double k_phase = -4.0 * kPi / lambda;

    SlowTimeCube cube;
    cube.data = MatrixXc::Zero(static_cast<Eigen::Index>(N), X);
    cube.pri_s = tm.pri_s;
    cube.truth_direction_deg = traj.truth_direction_deg;

    std::vector<VectorXc> cell_a(N), cell_b(N);
    std::vector<double> cell_delay(N);
    std::vector<VectorXc> sc_a(Q), sc_b(Q);

    for (long cpi_start = 0; cpi_start < X; cpi_start += tm.pulses_per_cpi) {
        const long cpi_end = std::min<long>(X, cpi_start + tm.pulses_per_cpi);
        const auto mid = static_cast<std::size_t>((cpi_start + cpi_end - 1) / 2);
        const SphericalPoint center = to_spherical(traj.centroid(mid) - scene.radar_position_m);
        for (std::size_t i = 0; i < N; ++i) {
            const SphericalPoint c = scene.grid.cell_center(i, center);
            cell_a[i] = steering(scene.tx, c);
            cell_b[i] = steering(scene.rx, c);
            cell_delay[i] = 2.0 * c.range_m / kSpeedOfLight;
        }
        for (long p = cpi_start; p < cpi_end; ++p) {
            const auto t = static_cast<std::size_t>(p);
            for (std::size_t q = 0; q < Q; ++q) {
                const Vec3 rel = traj.position(t, q) - scene.radar_position_m;
                const double r = rel.norm();
                const DirectionCosines<double> dc = cosines_of(rel, r);
                sc_a[q] = steering(scene.tx, dc);
                sc_b[q] = steering(scene.rx, dc);
                const cdouble carrier = traj.reflectivity(t, q) * std::polar(1.0, k_phase * r);
                const double delay = 2.0 * r / kSpeedOfLight;
                for (std::size_t i = 0; i < N; ++i) {
                    const cdouble range_gate = lfm_autocorr(scene.waveform, cell_delay[i] - delay);
                    if (range_gate == cdouble(0.0, 0.0)) continue;
                    const cdouble gain = cell_b[i].dot(sc_b[q]) * cell_a[i].dot(sc_a[q]);
                    cube.data(static_cast<Eigen::Index>(i), p) += gain * range_gate * carrier;
                }
            }
        }
    }
    return cube;
}

double snr_linear(const SlowTimeCube& clean, double noise_var) {
    require(noise_var > 0.0, "noise variance must be positive");
    const double mean_power = clean.data.squaredNorm() / static_cast<double>(clean.data.size());
    return mean_power / noise_var;
}

SlowTimeCube add_noise(const SlowTimeCube& clean, double snr_db, Rng& rng) {
    if (std::isinf(snr_db) && snr_db > 0) return clean;
    require(std::isfinite(snr_db), "SNR must be finite or +inf");
    const double mean_power = clean.data.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, clean.data.size()));
    if (!(mean_power > 0.0)) throw ParameterError("cannot set a finite SNR on an all-zero signal");

    SlowTimeCube out = clean;
    out.noise_var = mean_power / std::pow(10.0, snr_db / 10.0);
    std::normal_distribution<double> n(0.0, std::sqrt(out.noise_var / 2.0));
    for (Eigen::Index i = 0; i < out.data.rows(); ++i)
        for (Eigen::Index p = 0; p < out.data.cols(); ++p) {
            const double re = n(rng);
            const double im = n(rng);
            out.data(i, p) += cdouble(re, im);
        }
    return out;
}

void normalize_power(MatrixXc& data) {
    const double mean_power = data.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, data.size()));
    if (mean_power > 0.0) data /= std::sqrt(mean_power);
}

Spectrogram spectrogram(const VectorXc& signal, double pri_s, int window, double overlap) {
    require(window >= 2, "spectrogram window must be >= 2 samples");
    require(overlap >= 0.0 && overlap < 1.0, "overlap must be in [0, 1)");
    require(signal.size() >= window, "signal shorter than the spectrogram window");
    const int hop = std::max(1, static_cast<int>(std::lround(window * (1.0 - overlap))));
    const Eigen::Index frames = (signal.size() - window) / hop + 1;

    Eigen::VectorXd hann(window);
    for (int n = 0; n < window; ++n) hann(n) = 0.5 - 0.5 * std::cos(2.0 * kPi * n / window);

    Spectrogram s;
    s.power.resize(window, frames);
    const double prf = 1.0 / pri_s;
    for (int k = 0; k < window; ++k) s.frequency_hz.push_back((k - window / 2) * prf / window);

    Eigen::FFT<double> fft;
    std::vector<cdouble> in(static_cast<std::size_t>(window)), out;
    for (Eigen::Index f = 0; f < frames; ++f) {
        const Eigen::Index start = f * hop;
        for (int n = 0; n < window; ++n) in[static_cast<std::size_t>(n)] = signal(start + n) * hann(n);
        fft.fwd(out, in);
        for (int k = 0; k < window; ++k) {
            // DC-centered ordering
            const int src = (k - window / 2 + window) % window;
            s.power(k, f) = std::norm(out[static_cast<std::size_t>(src)]);
        }
        s.time_s.push_back((static_cast<double>(start) + window / 2.0) * pri_s);
    }
    return s;
}

double doppler_bandwidth(const Spectrogram& s) {
    const Eigen::VectorXd psd = s.power.rowwise().mean();
    const double total = psd.sum();
    if (!(total > 0.0)) throw AnalysisError("spectrogram carries no power");
    const Eigen::Map<const Eigen::VectorXd> f(s.frequency_hz.data(), static_cast<Eigen::Index>(s.frequency_hz.size()));
    const double mean = f.dot(psd) / total;
    const double var = (f.array() - mean).square().matrix().dot(psd) / total;
    return std::sqrt(var);
}

}  // namespace mdlab
