#include "doctest.h"

#include <cmath>

#include "ringqed/contour.hpp"
#include "ringqed/errors.hpp"

using namespace ringqed;

namespace {
Grid2D sample(Axis x, Axis y, auto&& f) {
    Grid2D g{std::move(x), std::move(y), {}};
    g.values.resize(g.nx() * g.ny());
    for (std::size_t iy = 0; iy < g.ny(); ++iy) {
        for (std::size_t ix = 0; ix < g.nx(); ++ix) g.at(ix, iy) = f(g.x_axis.values[ix], g.y_axis.values[iy]);
    }
    return g;
}
} // namespace

TEST_CASE("circle is a single closed polyline") {
    const auto g = sample(Axis::linear("x", "", -2, 2, 81), Axis::linear("y", "", -2, 2, 81),
                          [](double x, double y) { return x * x + y * y; });
    const auto lines = iso_contour(g, 1.0);
    REQUIRE(lines.size() == 1);
    const auto& l = lines.front();
    CHECK(l.size() > 50);
    CHECK(l.front().x == l.back().x);
    CHECK(l.front().y == l.back().y);
    for (const auto& p : l) CHECK(std::abs(std::hypot(p.x, p.y) - 1.0) < 2e-3);
}

TEST_CASE("log axes interpolate in log coordinates") {
    // log x + log y is linear in the log coordinates, so crossings are exact.
    const auto g = sample(Axis::logarithmic("x", "", 1, 1000, 40), Axis::logarithmic("y", "", 1, 1000, 40),
                          [](double x, double y) { return std::log(x) + std::log(y); });
    const auto lines = iso_contour(g, std::log(500.0));
    REQUIRE(lines.size() == 1);
    for (const auto& p : lines.front()) CHECK(p.x * p.y == doctest::Approx(500.0).epsilon(1e-10));
}

TEST_CASE("saddle cells are split by the center value") {
    Grid2D g{Axis::linear("x", "", 0, 1, 2), Axis::linear("y", "", 0, 1, 2), {1.0, 0.0, 0.0, 1.0}};
    // corners (0,0)=1 (1,0)=0 (0,1)=0 (1,1)=1, center 0.5
    auto lines = iso_contour(g, 0.4);  // center above: two segments cutting off the low corners
    CHECK(lines.size() == 2);
    lines = iso_contour(g, 0.6);  // center below
    CHECK(lines.size() == 2);
    for (const auto& l : lines) CHECK(l.size() == 2);
}

TEST_CASE("level outside the data gives no contour") {
    const auto g = sample(Axis::linear("x", "", 0, 1, 5), Axis::linear("y", "", 0, 1, 5),
                          [](double x, double y) { return x + y; });
    CHECK(iso_contour(g, 5.0).empty());
    const auto lines = iso_contour(g, 1.0);
    REQUIRE(lines.size() == 1);
    for (const auto& p : lines.front()) CHECK(p.x + p.y == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid validation") {
    Grid2D g{Axis::linear("x", "", 0, 1, 3), Axis::linear("y", "", 0, 1, 3), {1.0}};
    CHECK_THROWS_AS(g.validate(), ValidationError);
    CHECK_THROWS_AS(Axis::logarithmic("x", "", 0.0, 1.0, 4), ValidationError);
    CHECK_THROWS_AS(Axis::linear("x", "", 1.0, 1.0, 4), ValidationError);
}
