#include "mdlab/array.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace mdlab {

void UraGeometry::validate() const {
    require(rows_z >= 1 && cols_y >= 1, "array element counts must be >= 1");
    require(spacing_y > 0.0 && spacing_z > 0.0, "array spacings must be positive");
}

SphericalPoint to_spherical(const Vec3& c) {
    const double r = c.norm();
    require(r > 0.0, "point coincides with the array phase center");
    return {r, rad2deg(std::atan2(c.y(), c.x())), rad2deg(std::asin(c.z() / r))};
}

Vec3 to_cartesian(const SphericalPoint& p) {
    const double b = deg2rad(p.azimuth_deg), g = deg2rad(p.elevation_deg);
    return p.range_m * Vec3(std::cos(g) * std::cos(b), std::cos(g) * std::sin(b), std::sin(g));
}

namespace {

DirectionCosines<double> checked_cosines(const SphericalPoint& p) {
    if (!(std::abs(p.azimuth_deg) < 90.0) || !(std::abs(p.elevation_deg) < 90.0))
        throw ParameterError("steering angles must satisfy |azimuth| < 90 and |elevation| < 90 degrees");
    return DirectionCosines<double>::from_angles(deg2rad(p.azimuth_deg), deg2rad(p.elevation_deg));
}

}  // namespace

VectorXc steering(const UraGeometry& g, const SphericalPoint& point) {
    g.validate();
    return steering(g, checked_cosines(point));
}

VectorXc virtual_steering(const UraGeometry& tx, const UraGeometry& rx, const SphericalPoint& point) {
    const VectorXc a = steering(tx, point);
    const VectorXc b = steering(rx, point);
    VectorXc v(a.size() * b.size());
    for (Eigen::Index l = 0; l < b.size(); ++l) v.segment(l * a.size(), a.size()) = b(l) * a;
    return v;
}

ScanGrid ScanGrid::uniform(double az_max_deg, double el_max_deg, double step_deg) {
    require(step_deg > 0.0, "scan step must be positive");
    require(az_max_deg >= 0.0 && el_max_deg >= 0.0, "scan extents must be non-negative");
    auto axis = [&](double extent) {
        const long n = std::lround(extent / step_deg);
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(2 * n + 1));
        for (long i = -n; i <= n; ++i) v.push_back(static_cast<double>(i) * step_deg);
        return v;
    };
    return {axis(az_max_deg), axis(el_max_deg)};
}

BeamPattern beam_pattern(const UraGeometry& tx, const UraGeometry& rx, const SphericalPoint& steer_to,
                         const ScanGrid& scan) {
    require(!scan.azimuth_deg.empty() && !scan.elevation_deg.empty(), "scan grid must be nonempty");
    const VectorXc a0 = steering(tx, steer_to);
    const VectorXc b0 = steering(rx, steer_to);
    const double norm = static_cast<double>(tx.size()) * static_cast<double>(rx.size());

    BeamPattern out{scan.azimuth_deg, scan.elevation_deg,
                    Eigen::MatrixXd(scan.elevation_deg.size(), scan.azimuth_deg.size())};
    for (std::size_t ie = 0; ie < scan.elevation_deg.size(); ++ie) {
        for (std::size_t ia = 0; ia < scan.azimuth_deg.size(); ++ia) {
            const SphericalPoint u{steer_to.range_m, scan.azimuth_deg[ia], scan.elevation_deg[ie]};
            // <a0 (x) b0, a (x) b> factorizes into the tx and rx inner products.
            const cdouble inner = a0.dot(steering(tx, u)) * b0.dot(steering(rx, u));
            const double gain = std::norm(inner) / (norm * norm);
            out.gain_db(static_cast<Eigen::Index>(ie), static_cast<Eigen::Index>(ia)) =
                gain > 0.0 ? 10.0 * std::log10(gain) : -300.0;
        }
    }
    return out;
}

double half_power_beamwidth(const BeamPattern& p, PatternAxis axis) {
    Eigen::Index pr = 0, pc = 0;
    const double peak = p.gain_db.maxCoeff(&pr, &pc);
    const double level = peak - 10.0 * std::log10(2.0);

    const bool az = axis == PatternAxis::azimuth;
    const std::vector<double>& coord = az ? p.azimuth_deg : p.elevation_deg;
    const Eigen::VectorXd cut = az ? Eigen::VectorXd(p.gain_db.row(pr).transpose()) : Eigen::VectorXd(p.gain_db.col(pc));
    const Eigen::Index start = az ? pc : pr;

    auto crossing = [&](int dir) {
        Eigen::Index i = start;
        while (true) {
            const Eigen::Index j = i + dir;
            if (j < 0 || j >= cut.size())
                throw AnalysisError("half-power crossing not bracketed by the scan grid");
            if (cut(j) < level) {
                const double f = (cut(i) - level) / (cut(i) - cut(j));
                return coord[static_cast<std::size_t>(i)] + f * (coord[static_cast<std::size_t>(j)] - coord[static_cast<std::size_t>(i)]);
            }
            i = j;
        }
    };
    return crossing(+1) - crossing(-1);
}

double worst_sidelobe_db(const BeamPattern& p) {
    const Eigen::Index rows = p.gain_db.rows(), cols = p.gain_db.cols();
    Eigen::Index pr = 0, pc = 0;
    p.gain_db.maxCoeff(&pr, &pc);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> lobe =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows, cols, false);
    std::deque<std::pair<Eigen::Index, Eigen::Index>> queue{{pr, pc}};
    lobe(pr, pc) = true;
    while (!queue.empty()) {
        const auto [r, c] = queue.front();
        queue.pop_front();
        for (const auto& [dr, dc] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
            const Eigen::Index nr = r + dr, nc = c + dc;
            if (nr < 0 || nc < 0 || nr >= rows || nc >= cols || lobe(nr, nc)) continue;
            if (p.gain_db(nr, nc) <= p.gain_db(r, c)) {
                lobe(nr, nc) = true;
                queue.emplace_back(nr, nc);
            }
        }
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!lobe(r, c)) worst = std::max(worst, p.gain_db(r, c));
    return worst;
}

}  // namespace mdlab
