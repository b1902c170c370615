#include <doctest.h>

#include <cmath>

#include "mdlab/array.hpp"

using namespace mdlab;

namespace {

const UraGeometry kTx{1, 4, 12.0, 0.5};
const UraGeometry kRx{3, 4, 36.0, 32.0};
const UraGeometry kSingle{1, 1, 0.5, 0.5};

double cycles(cdouble z) { return std::arg(z) / (2.0 * kPi); }

}  // namespace

TEST_CASE("steering at boresight is all ones") {
    const VectorXc a = steering(kRx, SphericalPoint{100.0, 0.0, 0.0});
    REQUIRE(a.size() == 12);
    for (Eigen::Index k = 0; k < a.size(); ++k) CHECK(std::abs(a(k) - cdouble(1.0, 0.0)) < 1e-15);
}

TEST_CASE("steering phases of the 4x1 transmit array at 0.39 degrees") {
    const VectorXc a = steering(kTx, SphericalPoint{100.0, 0.39, 0.0});
    const double u = std::sin(deg2rad(0.39)) * 12.0;
    const double expected[4] = {-1.5 * u, -0.5 * u, 0.5 * u, 1.5 * u};
    for (int k = 0; k < 4; ++k) CHECK(cycles(a(k)) == doctest::Approx(expected[k]).epsilon(1e-12));
    CHECK(cycles(a(0)) == doctest::Approx(-0.1225).epsilon(1e-3));
    CHECK(cycles(a(1)) == doctest::Approx(-0.0408).epsilon(2e-3));
    CHECK(cycles(a(2)) == doctest::Approx(0.0408).epsilon(2e-3));
    CHECK(cycles(a(3)) == doctest::Approx(0.1225).epsilon(1e-3));
}

TEST_CASE("steering element order is k = i_z L_y + i_y") {
    const UraGeometry g{2, 3, 0.5, 0.5};
    const VectorXc a = steering(g, SphericalPoint{10.0, 5.0, 7.0});
    const double uy = std::sin(deg2rad(5.0)) * std::cos(deg2rad(7.0));
    const double uz = std::sin(deg2rad(7.0));
    for (int iz = 0; iz < 2; ++iz)
        for (int iy = 0; iy < 3; ++iy) {
            const double ph = 2 * kPi * (uy * 0.5 * (iy - 1.0) + uz * 0.5 * (iz - 0.5));
            CHECK(std::abs(a(iz * 3 + iy) - std::polar(1.0, ph)) < 1e-12);
        }
}

TEST_CASE("steering vectors are unit modulus and conjugate symmetric") {
    for (double az : {-30.0, 0.2, 12.5}) {
        for (double el : {-8.0, 0.0, 3.3}) {
            const VectorXc a = steering(kRx, SphericalPoint{50.0, az, el});
            const VectorXc b = steering(kRx, SphericalPoint{50.0, -az, -el});
            CHECK(a.size() == kRx.rows_z * kRx.cols_y);
            CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
            CHECK((a.conjugate() - b).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("steering rejects angles outside the visible hemisphere") {
    CHECK_THROWS_AS(steering(kRx, SphericalPoint{10.0, 90.0, 0.0}), ParameterError);
    CHECK_THROWS_AS(steering(kRx, SphericalPoint{10.0, 0.0, -95.0}), ParameterError);
    CHECK_THROWS_AS((UraGeometry{0, 1, 0.5, 0.5}.validate()), ParameterError);
}

TEST_CASE("single-element pair is omnidirectional") {
    const BeamPattern p = beam_pattern(kSingle, kSingle, {}, ScanGrid::uniform(4.0, 1.0, 0.5));
    CHECK(p.gain_db.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("MIMO half-power beamwidths are 0.39 by 0.6 degrees") {
    const BeamPattern p = beam_pattern(kTx, kRx, {}, ScanGrid::uniform(4.0, 1.0, 0.01));
    CHECK(half_power_beamwidth(p, PatternAxis::azimuth) == doctest::Approx(0.39).epsilon(0.05 / 0.39));
    CHECK(half_power_beamwidth(p, PatternAxis::elevation) == doctest::Approx(0.6).epsilon(0.05 / 0.6));
    CHECK(std::abs(half_power_beamwidth(p, PatternAxis::azimuth) - 0.39) <= 0.05);
    CHECK(std::abs(half_power_beamwidth(p, PatternAxis::elevation) - 0.6) <= 0.05);
}

TEST_CASE("beamwidth is unchanged by a constant gain offset") {
    BeamPattern p = beam_pattern(kTx, kRx, {}, ScanGrid::uniform(2.0, 1.0, 0.01));
    const double az = half_power_beamwidth(p, PatternAxis::azimuth);
    const double el = half_power_beamwidth(p, PatternAxis::elevation);
    p.gain_db.array() += 7.5;
    CHECK(half_power_beamwidth(p, PatternAxis::azimuth) == doctest::Approx(az).epsilon(1e-12));
    CHECK(half_power_beamwidth(p, PatternAxis::elevation) == doctest::Approx(el).epsilon(1e-12));
}

TEST_CASE("beamwidth needs the crossings inside the scan") {
    const BeamPattern p = beam_pattern(kTx, kRx, {}, ScanGrid::uniform(0.1, 0.1, 0.01));
    CHECK_THROWS_AS(half_power_beamwidth(p, PatternAxis::azimuth), AnalysisError);
}

TEST_CASE("single transmitter shows grating lobes, MIMO does not") {
    const ScanGrid fov = ScanGrid::uniform(4.0, 1.0, 0.01);
    const BeamPattern simo = beam_pattern(kSingle, kRx, {}, fov);
    const BeamPattern mimo = beam_pattern(kTx, kRx, {}, fov);
    CHECK(worst_sidelobe_db(simo) >= -3.0);
    CHECK(worst_sidelobe_db(mimo) < -6.0);
}

TEST_CASE("MIMO pattern factors into transmit and receive patterns") {
    const ScanGrid scan = ScanGrid::uniform(3.0, 1.0, 0.05);
    const SphericalPoint steer{100.0, 0.3, -0.2};
    const BeamPattern both = beam_pattern(kTx, kRx, steer, scan);
    const BeamPattern tx = beam_pattern(kTx, kSingle, steer, scan);
    const BeamPattern rx = beam_pattern(kSingle, kRx, steer, scan);
    for (Eigen::Index i = 0; i < both.gain_db.rows(); ++i)
        for (Eigen::Index j = 0; j < both.gain_db.cols(); ++j) {
            const double lin = std::pow(10.0, both.gain_db(i, j) / 10.0);
            const double prod = std::pow(10.0, (tx.gain_db(i, j) + rx.gain_db(i, j)) / 10.0);
            CHECK(lin == doctest::Approx(prod).epsilon(1e-9));
        }
}

TEST_CASE("boresight pattern of a symmetric array is point symmetric") {
    const BeamPattern p = beam_pattern(kTx, kRx, {}, ScanGrid::uniform(2.0, 1.0, 0.05));
    const Eigen::Index r = p.gain_db.rows(), c = p.gain_db.cols();
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) {
            const double a = std::pow(10.0, p.gain_db(i, j) / 10.0);
            const double b = std::pow(10.0, p.gain_db(r - 1 - i, c - 1 - j) / 10.0);
            CHECK(a == doctest::Approx(b).epsilon(1e-9));
        }
}

TEST_CASE("spherical and Cartesian conversions round trip") {
    const SphericalPoint s{100.0, 12.0, -3.0};
    const SphericalPoint back = to_spherical(to_cartesian(s));
    CHECK(back.range_m == doctest::Approx(100.0));
    CHECK(back.azimuth_deg == doctest::Approx(12.0));
    CHECK(back.elevation_deg == doctest::Approx(-3.0));
}
