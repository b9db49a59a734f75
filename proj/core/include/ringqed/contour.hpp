#pragma once

#include <string>
#include <vector>

namespace ringqed {

struct Axis {
    std::string label;
    std::string unit;
    std::vector<double> values;  // strictly increasing
    bool log_scale = false;

    static Axis linear(std::string label, std::string unit, double lo, double hi, int points);
    static Axis logarithmic(std::string label, std::string unit, double lo, double hi, int points);
};

// Scalar field sampled on x_axis × y_axis; values[iy * nx + ix].
struct Grid2D {
    Axis x_axis;
    Axis y_axis;
    std::vector<double> values;

    std::size_t nx() const noexcept { return x_axis.values.size(); }
    std::size_t ny() const noexcept { return y_axis.values.size(); }
    double at(std::size_t ix, std::size_t iy) const { return values[iy * nx() + ix]; }
    double& at(std::size_t ix, std::size_t iy) { return values[iy * nx() + ix]; }
    void validate() const;
};

struct ContourPoint {
    double x = 0.0;
    double y = 0.0;
};
using Polyline = std::vector<ContourPoint>;

// Marching squares. Crossings are interpolated linearly in the field value and
// in the axis coordinate (log coordinate on log axes). Segments are chained
// into polylines; saddle cells are split using the cell-center average.
std::vector<Polyline> iso_contour(const Grid2D& grid, double level);

} // namespace ringqed
