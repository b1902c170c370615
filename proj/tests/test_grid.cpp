#include <doctest.h>

#include <algorithm>

#include "mdlab/echo.hpp"
#include "mdlab/grid.hpp"

using namespace mdlab;

namespace {

bool has_center(const SpatialGrid& g, double r, double az, double el) {
    return std::any_of(g.centers.begin(), g.centers.end(), [&](const CellOffset& c) {
        return std::abs(c.range_m - r) < 1e-12 && std::abs(c.azimuth_deg - az) < 1e-12 &&
               std::abs(c.elevation_deg - el) < 1e-12;
    });
}

}  // namespace

TEST_CASE("full 3-D grid has eight cells at plus or minus one extent") {
    const SpatialGrid g = build_grid(GridLayout::full3d_8, CellExtents{0.6, 0.39, 0.6});
    REQUIRE(g.size() == 8);
    CHECK(has_center(g, 0.6, 0.39, -0.6));
    for (double r : {-0.6, 0.6})
        for (double az : {-0.39, 0.39})
            for (double el : {-0.6, 0.6}) CHECK(has_center(g, r, az, el));
}

TEST_CASE("layout cell counts") {
    const CellExtents e{};
    CHECK(build_grid(GridLayout::horizontal_4, e).size() == 4);
    CHECK(build_grid(GridLayout::vertical_4, e).size() == 4);
    CHECK(build_grid(GridLayout::range_2, e).size() == 2);
    const SpatialGrid one = build_grid(GridLayout::single_1, e);
    REQUIRE(one.size() == 1);
    CHECK(has_center(one, 0.0, 0.0, 0.0));
    for (GridLayout l : {GridLayout::full3d_8, GridLayout::horizontal_4, GridLayout::vertical_4, GridLayout::range_2,
                         GridLayout::single_1})
        CHECK(build_grid(l, e).size() == cell_count(l));
}

TEST_CASE("horizontal and vertical layouts swap the angular coordinates") {
    const CellExtents e{0.6, 0.5, 0.5};
    const SpatialGrid h = build_grid(GridLayout::horizontal_4, e);
    const SpatialGrid v = build_grid(GridLayout::vertical_4, e);
    for (const CellOffset& c : h.centers) {
        CHECK(c.elevation_deg == 0.0);
        CHECK(has_center(v, c.range_m, c.elevation_deg, c.azimuth_deg));
    }
}

TEST_CASE("grid centers are symmetric under negation of each resolved axis") {
    for (GridLayout l : {GridLayout::full3d_8, GridLayout::horizontal_4, GridLayout::vertical_4, GridLayout::range_2}) {
        const SpatialGrid g = build_grid(l, CellExtents{});
        for (const CellOffset& c : g.centers) {
            CHECK(has_center(g, -c.range_m, c.azimuth_deg, c.elevation_deg));
            CHECK(has_center(g, c.range_m, -c.azimuth_deg, c.elevation_deg));
            CHECK(has_center(g, c.range_m, c.azimuth_deg, -c.elevation_deg));
        }
    }
}

TEST_CASE("layout tags round trip and unknown tags are rejected") {
    for (GridLayout l : {GridLayout::full3d_8, GridLayout::horizontal_4, GridLayout::vertical_4, GridLayout::range_2,
                         GridLayout::single_1})
        CHECK(parse_grid_layout(to_string(l)) == l);
    CHECK_THROWS_AS(parse_grid_layout("diagonal_3"), ParameterError);
    CHECK_THROWS_AS(build_grid(GridLayout::full3d_8, CellExtents{0.0, 0.39, 0.6}), ParameterError);
}

TEST_CASE("cell size in Cartesian coordinates at 100 m") {
    const Vec3 s = cell_size_cartesian(CellExtents{0.6, 0.39, 0.6}, 100.0);
    CHECK(s.x() == doctest::Approx(0.6));
    CHECK(std::abs(s.y() - 0.68) <= 0.02);
    CHECK(std::abs(s.z() - 1.04) <= 0.02);
    CHECK(s.y() == doctest::Approx(100.0 * deg2rad(0.39)));

    const Vec3 z = cell_size_cartesian(CellExtents{0.6, 0.0, 0.0}, 100.0);
    CHECK(z == Vec3(0.6, 0.0, 0.0));

    const Vec3 far = cell_size_cartesian(CellExtents{0.6, 0.39, 0.6}, 200.0);
    CHECK(far.x() == doctest::Approx(s.x()));
    CHECK(far.y() == doctest::Approx(2.0 * s.y()));
    CHECK(far.z() == doctest::Approx(2.0 * s.z()));
    CHECK_THROWS_AS(cell_size_cartesian(CellExtents{}, 0.0), ParameterError);
}

TEST_CASE("cell centers are offsets from the grid center") {
    const SpatialGrid g = build_grid(GridLayout::full3d_8, CellExtents{});
    const SphericalPoint center{100.0, 1.0, -0.5};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const SphericalPoint c = g.cell_center(i, center);
        CHECK(c.range_m == doctest::Approx(100.0 + g.centers[i].range_m));
        CHECK(c.azimuth_deg == doctest::Approx(1.0 + g.centers[i].azimuth_deg));
        CHECK(c.elevation_deg == doctest::Approx(-0.5 + g.centers[i].elevation_deg));
    }
}

TEST_CASE("preset scenes use their grid for the cube row count") {
    for (GridLayout l : {GridLayout::full3d_8, GridLayout::horizontal_4, GridLayout::vertical_4, GridLayout::range_2,
                         GridLayout::single_1}) {
        const RadarScene s = preset_scene(l, 64);
        CHECK(s.grid.size() == cell_count(l));
        TrajectoryTensor tr(64, s.timing.pri_s);
        for (std::size_t t = 0; t < 64; ++t)
            for (std::size_t q = 0; q < kBodyPoints; ++q) {
                tr.position(t, q) = Vec3(100.0, 0.1 * static_cast<double>(q), 0.0);
                tr.velocity(t, q) = Vec3::Zero();
                tr.reflectivity(t, q) = cdouble(0.1, 0.0);
            }
        CHECK(static_cast<std::size_t>(synth_slow_time(s, tr).cells()) == s.grid.size());
    }
}
