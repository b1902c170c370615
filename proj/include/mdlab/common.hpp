#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mdlab {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kPi = std::numbers::pi;

/// Invalid input to an operation (bad dimensions, out-of-range values).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical analysis could not be completed on the given data.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model failed to train (degenerate data, divergence).
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
    return deg * static_cast<Scalar>(kPi) / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
    return rad * Scalar(180) / static_cast<Scalar>(kPi);
}

/// Wraps an angle in degrees into [0, 360).
inline double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w -= 360.0;
    return w;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ParameterError(msg);
}

}  // namespace mdlab
