#pragma once

#include <iosfwd>
#include <span>

#include "ringqed/contour.hpp"
#include "ringqed/sweep.hpp"

namespace ringqed {

// Long format with header x,y,value; one row per grid cell, x fastest.
void write_grid_csv(std::ostream& os, const Grid2D& grid);

// Long format with header label,x,y,y_err (y_err empty when absent).
void write_curves_csv(std::ostream& os, std::span<const CurveSeries> curves);

// Header x,y with one row per vertex; polylines separated by a blank row.
void write_polylines_csv(std::ostream& os, std::span<const Polyline> lines);

} // namespace ringqed
