#include "ringqed/io.hpp"

#include <ostream>

#include "ringqed/format.hpp"

namespace ringqed {

void write_grid_csv(std::ostream& os, const Grid2D& grid) {
    grid.validate();
    os << "x,y,value\n";
    for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
        for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
            os << format_double(grid.x_axis.values[ix]) << ',' << format_double(grid.y_axis.values[iy])
               << ',' << format_double(grid.at(ix, iy)) << '\n';
        }
    }
}

void write_curves_csv(std::ostream& os, std::span<const CurveSeries> curves) {
    os << "label,x,y,y_err\n";
    for (const auto& c : curves) {
        c.validate();
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            os << c.label << ',' << format_double(c.x[i]) << ',' << format_double(c.y[i]) << ',';
            if (c.y_err) os << format_double((*c.y_err)[i]);
            os << '\n';
        }
    }
}

void write_polylines_csv(std::ostream& os, std::span<const Polyline> lines) {
    os << "x,y\n";
    for (std::size_t l = 0; l < lines.size(); ++l) {
        if (l > 0) os << '\n';
        for (const auto& p : lines[l]) os << format_double(p.x) << ',' << format_double(p.y) << '\n';
    }
}

} // namespace ringqed
