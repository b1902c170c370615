#pragma once

#include <string>
#include <vector>

#include "mdlab/array.hpp"

namespace mdlab {

enum class GridLayout { full3d_8, horizontal_4, vertical_4, range_2, single_1 };

std::string to_string(GridLayout layout);
GridLayout parse_grid_layout(const std::string& tag);
std::size_t cell_count(GridLayout layout);

/// Cell dimensions (delta r, delta beta, delta gamma).
struct CellExtents {
    double range_m = 0.6;
    double azimuth_deg = 0.39;
    double elevation_deg = 0.6;
};

/// Offset of a cell center from the grid center, in spherical coordinates.
struct CellOffset {
    double range_m = 0.0;
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

struct SpatialGrid {
    GridLayout layout = GridLayout::single_1;
    CellExtents extents;
    std::vector<CellOffset> centers;

    std::size_t size() const { return centers.size(); }

    /// Absolute cell center for a grid centered on `center`.
    SphericalPoint cell_center(std::size_t i, const SphericalPoint& center) const;
};

/// Cell centers are the Cartesian product of {-d, +d} over the axes the
/// layout resolves (0 on the others), range outermost, elevation innermost.
SpatialGrid build_grid(GridLayout layout, const CellExtents& extents);

/// Cell size at `range_m` using arc length for the angular extents.
Vec3 cell_size_cartesian(const CellExtents& extents, double range_m);

}  // namespace mdlab
