#include "ringqed/contour.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "ringqed/errors.hpp"

namespace ringqed {
namespace {

void check_axis(const Axis& a, const char* which) {
    if (a.values.size() < 2) throw ValidationError(std::string(which) + " axis needs >= 2 samples");
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (!std::isfinite(a.values[i])) throw ValidationError(std::string(which) + " axis is not finite");
        if (a.log_scale && !(a.values[i] > 0.0)) {
            throw ValidationError(std::string(which) + " log axis must be positive");
        }
        if (i > 0 && !(a.values[i] > a.values[i - 1])) {
            throw ValidationError(std::string(which) + " axis must be strictly increasing");
        }
    }
}

double to_coord(const Axis& a, std::size_t i) {
    return a.log_scale ? std::log(a.values[i]) : a.values[i];
}

double from_coord(const Axis& a, double u) { return a.log_scale ? std::exp(u) : u; }

} // namespace

Axis Axis::linear(std::string label, std::string unit, double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw ValidationError("axis needs hi > lo and >= 2 points");
    Axis a{std::move(label), std::move(unit), {}, false};
    a.values.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        a.values[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    }
    a.values.back() = hi;
    return a;
}

Axis Axis::logarithmic(std::string label, std::string unit, double lo, double hi, int points) {
    if (points < 2 || !(lo > 0.0) || !(hi > lo)) {
        throw ValidationError("log axis needs 0 < lo < hi and >= 2 points");
    }
    Axis a{std::move(label), std::move(unit), {}, true};
    a.values.resize(static_cast<std::size_t>(points));
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (int i = 0; i < points; ++i) {
        a.values[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (points - 1));
    }
    a.values.front() = lo;
    a.values.back() = hi;
    return a;
}

void Grid2D::validate() const {
    check_axis(x_axis, "x");
    check_axis(y_axis, "y");
    if (values.size() != nx() * ny()) throw ValidationError("grid values do not match axis sizes");
}

std::vector<Polyline> iso_contour(const Grid2D& grid, double level) {
    grid.validate();
    if (!std::isfinite(level)) throw ValidationError("contour level must be finite");
    const std::size_t nx = grid.nx(), ny = grid.ny();

    // Edge ids: 2*(iy*nx+ix) is the horizontal edge to (ix+1, iy), +1 the
    // vertical edge to (ix, iy+1).
    auto h_edge = [&](std::size_t ix, std::size_t iy) { return 2 * (iy * nx + ix); };
    auto v_edge = [&](std::size_t ix, std::size_t iy) { return 2 * (iy * nx + ix) + 1; };
    auto above = [&](std::size_t ix, std::size_t iy) { return grid.at(ix, iy) >= level; };

    auto edge_point = [&](std::size_t id) {
        const std::size_t node = id / 2;
        const std::size_t ix = node % nx, iy = node / nx;
        const bool vertical = id % 2 == 1;
        const std::size_t jx = vertical ? ix : ix + 1;
        const std::size_t jy = vertical ? iy + 1 : iy;
        const double va = grid.at(ix, iy), vb = grid.at(jx, jy);
        const double t = (level - va) / (vb - va);
        ContourPoint p;
        if (vertical) {
            p.x = grid.x_axis.values[ix];
            const double ua = to_coord(grid.y_axis, iy), ub = to_coord(grid.y_axis, jy);
            p.y = from_coord(grid.y_axis, ua + t * (ub - ua));
        } else {
            p.y = grid.y_axis.values[iy];
            const double ua = to_coord(grid.x_axis, ix), ub = to_coord(grid.x_axis, jx);
            p.x = from_coord(grid.x_axis, ua + t * (ub - ua));
        }
        return p;
    };

    std::vector<std::array<std::size_t, 2>> segments;
    for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
            const std::array<double, 4> v{grid.at(ix, iy), grid.at(ix + 1, iy), grid.at(ix + 1, iy + 1),
                                          grid.at(ix, iy + 1)};
            bool finite = true;
            for (double x : v) finite = finite && std::isfinite(x);
            if (!finite) continue;
            const std::array<bool, 4> up{above(ix, iy), above(ix + 1, iy), above(ix + 1, iy + 1),
                                         above(ix, iy + 1)};
            // bottom, right, top, left
            const std::array<std::size_t, 4> e{h_edge(ix, iy), v_edge(ix + 1, iy), h_edge(ix, iy + 1),
                                               v_edge(ix, iy)};
            std::array<bool, 4> crossed{up[0] != up[1], up[1] != up[2], up[3] != up[2], up[0] != up[3]};
            int count = 0;
            for (bool c : crossed) count += c ? 1 : 0;
            if (count == 2) {
                std::array<std::size_t, 2> seg{};
                int k = 0;
                for (int i = 0; i < 4; ++i) {
                    if (crossed[static_cast<std::size_t>(i)]) seg[static_cast<std::size_t>(k++)] = e[static_cast<std::size_t>(i)];
                }
                segments.push_back(seg);
            } else if (count == 4) {
                const bool center_up = (v[0] + v[1] + v[2] + v[3]) / 4.0 >= level;
                // Cut off each corner whose state differs from the center.
                const std::array<std::array<std::size_t, 2>, 4> corner_edges{
                    std::array<std::size_t, 2>{e[3], e[0]}, {e[0], e[1]}, {e[1], e[2]}, {e[2], e[3]}};
                for (std::size_t c = 0; c < 4; ++c) {
                    if (up[c] != center_up) segments.push_back(corner_edges[c]);
                }
            }
        }
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> by_edge;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        by_edge[segments[s][0]].push_back(s);
        by_edge[segments[s][1]].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);
    auto next_segment = [&](std::size_t edge) -> std::ptrdiff_t {
        for (std::size_t s : by_edge[edge]) {
            if (!used[s]) return static_cast<std::ptrdiff_t>(s);
        }
        return -1;
    };

    std::vector<Polyline> lines;
    for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
        if (used[s0]) continue;
        used[s0] = true;
        std::deque<std::size_t> chain{segments[s0][0], segments[s0][1]};
        for (std::ptrdiff_t s; (s = next_segment(chain.back())) >= 0;) {
            used[static_cast<std::size_t>(s)] = true;
            const auto& seg = segments[static_cast<std::size_t>(s)];
            chain.push_back(seg[0] == chain.back() ? seg[1] : seg[0]);
        }
        for (std::ptrdiff_t s; (s = next_segment(chain.front())) >= 0;) {
            used[static_cast<std::size_t>(s)] = true;
            const auto& seg = segments[static_cast<std::size_t>(s)];
            chain.push_front(seg[0] == chain.front() ? seg[1] : seg[0]);
        }
        Polyline line;
        line.reserve(chain.size());
        for (std::size_t id : chain) line.push_back(edge_point(id));
        lines.push_back(std::move(line));
    }
    return lines;
}

} // namespace ringqed
