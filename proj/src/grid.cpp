#include "mdlab/grid.hpp"

namespace mdlab {

std::string to_string(GridLayout layout) {
    switch (layout) {
        case GridLayout::full3d_8: return "full3d_8";
        case GridLayout::horizontal_4: return "horizontal_4";
        case GridLayout::vertical_4: return "vertical_4";
        case GridLayout::range_2: return "range_2";
        case GridLayout::single_1: return "single_1";
    }
    return "?";
}

GridLayout parse_grid_layout(const std::string& tag) {
    for (GridLayout l : {GridLayout::full3d_8, GridLayout::horizontal_4, GridLayout::vertical_4, GridLayout::range_2,
                         GridLayout::single_1})
        if (to_string(l) == tag) return l;
    throw ParameterError("unknown grid layout tag: " + tag);
}

std::size_t cell_count(GridLayout layout) {
    switch (layout) {
        case GridLayout::full3d_8: return 8;
        case GridLayout::horizontal_4:
        case GridLayout::vertical_4: return 4;
        case GridLayout::range_2: return 2;
        case GridLayout::single_1: return 1;
    }
    return 0;
}

SphericalPoint SpatialGrid::cell_center(std::size_t i, const SphericalPoint& c) const {
    const CellOffset& o = centers.at(i);
    return {c.range_m + o.range_m, c.azimuth_deg + o.azimuth_deg, c.elevation_deg + o.elevation_deg};
}

SpatialGrid build_grid(GridLayout layout, const CellExtents& e) {
    require(e.range_m > 0.0 && e.azimuth_deg > 0.0 && e.elevation_deg > 0.0, "cell extents must be positive");
    SpatialGrid g;
    g.layout = layout;
    g.extents = e;
    if (layout == GridLayout::single_1) {
        g.centers.push_back({});
        return g;
    }
    const bool az = layout == GridLayout::full3d_8 || layout == GridLayout::horizontal_4;
    const bool el = layout == GridLayout::full3d_8 || layout == GridLayout::vertical_4;
    const std::vector<double> signs{-1.0, 1.0};
    const std::vector<double> zero{0.0};
    for (double sr : signs)
        for (double sb : az ? signs : zero)
            for (double sg : el ? signs : zero)
                g.centers.push_back({sr * e.range_m, sb * e.azimuth_deg, sg * e.elevation_deg});
    return g;
}

Vec3 cell_size_cartesian(const CellExtents& e, double range_m) {
    require(range_m > 0.0, "range must be positive");
    return {e.range_m, range_m * deg2rad(e.azimuth_deg), range_m * deg2rad(e.elevation_deg)};
}

}  // namespace mdlab
