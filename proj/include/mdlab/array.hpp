#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "mdlab/common.hpp"

namespace mdlab {

/// Uniform rectangular array in the y-z plane. Spacings are in wavelengths.
struct UraGeometry {
    int rows_z = 1;
    int cols_y = 1;
    double spacing_y = 0.5;
    double spacing_z = 0.5;

    int size() const { return rows_z * cols_y; }
    void validate() const;
};

/// u = [r, beta, gamma]: range, azimuth, elevation (degrees at the API).
struct SphericalPoint {
    double range_m = 1.0;
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

SphericalPoint to_spherical(const Vec3& cartesian);
Vec3 to_cartesian(const SphericalPoint& p);

/// Per-axis phase progression (cycles per element) for direction cosines.
template <typename Scalar>
struct DirectionCosines {
    Scalar y;  ///< sin(beta) cos(gamma)
    Scalar z;  ///< sin(gamma)

    static DirectionCosines from_angles(Scalar az_rad, Scalar el_rad) {
        using std::cos;
        using std::sin;
        return {sin(az_rad) * cos(el_rad), sin(el_rad)};
    }
};

/// Steering vector with element k = i_z * L_y + i_y (zero based) and phase
/// 2*pi*[u_y d_y (i_y - (L_y-1)/2) + u_z d_z (i_z - (L_z-1)/2)].
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> steering(const UraGeometry& g,
                                                                 const DirectionCosines<Scalar>& dc) {
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out(g.size());
    const Scalar two_pi = Scalar(2) * static_cast<Scalar>(kPi);
    const Scalar cy = Scalar(g.cols_y - 1) / Scalar(2);
    const Scalar cz = Scalar(g.rows_z - 1) / Scalar(2);
    for (int iz = 0; iz < g.rows_z; ++iz) {
        for (int iy = 0; iy < g.cols_y; ++iy) {
            const Scalar cycles = dc.y * Scalar(g.spacing_y) * (Scalar(iy) - cy) +
                                  dc.z * Scalar(g.spacing_z) * (Scalar(iz) - cz);
            out(iz * g.cols_y + iy) = std::polar(Scalar(1), two_pi * cycles);
        }
    }
    return out;
}

/// Steering vector toward `point`; throws ParameterError outside |angle| < 90 deg.
VectorXc steering(const UraGeometry& g, const SphericalPoint& point);

/// b (x) a: virtual-array response of a colocated MIMO pair.
VectorXc virtual_steering(const UraGeometry& tx, const UraGeometry& rx, const SphericalPoint& point);

struct ScanGrid {
    std::vector<double> azimuth_deg;
    std::vector<double> elevation_deg;

    /// Inclusive uniform grid; endpoints snapped to multiples of `step_deg`.
    static ScanGrid uniform(double az_max_deg, double el_max_deg, double step_deg);
};

/// Gain map in dB, rows indexed by elevation and columns by azimuth.
struct BeamPattern {
    std::vector<double> azimuth_deg;
    std::vector<double> elevation_deg;
    Eigen::MatrixXd gain_db;
};

/// Normalized two-way pattern |<a(s) (x) b(s), a(u) (x) b(u)>|^2 / (Mt Mr)^2.
BeamPattern beam_pattern(const UraGeometry& tx, const UraGeometry& rx, const SphericalPoint& steer_to,
                         const ScanGrid& scan);

enum class PatternAxis { azimuth, elevation };

/// Width between the half-power crossings bracketing the mainlobe peak,
/// taken along the cut through the peak.
double half_power_beamwidth(const BeamPattern& pattern, PatternAxis axis);

/// Highest gain (dB) outside the mainlobe region. The mainlobe is the set of
/// grid points reachable from the peak by non-ascending steps.
double worst_sidelobe_db(const BeamPattern& pattern);

}  // namespace mdlab
