#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's closed forms; they solve the underlying equations by
// brute force.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ringqed/array.hpp"
#include "ringqed/params.hpp"
#include "ringqed/steady.hpp"

namespace oracle {

using cd = std::complex<double>;

struct FullSteady {
    cd forward;
    cd backward;
    std::vector<cd> coherences;
};

// Sets every time derivative of the un-eliminated equations to zero and
// solves the (N+2)-dimensional linear system by LU.
inline FullSteady full_steady_state(const ringqed::CavityParams& p, const ringqed::AtomArray& a,
                                    const ringqed::DriveConfig& d) {
    const auto n = static_cast<Eigen::Index>(a.size());
    const double k = p.wavenumber();
    const auto g = ringqed::atom_couplings(p, a);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 2, n + 2);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 2);
    const cd cav{-0.5 * p.kappa, d.cavity_detuning};
    const cd atom{-0.5 * p.gamma, d.atom_detuning};
    m(0, 0) = cav;
    m(1, 1) = cav;
    rhs(0) = cd{0.0, 1.0} * std::sqrt(p.kappa_in) * d.e_in;
    const auto xs = a.positions();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double gj = g[static_cast<std::size_t>(j)];
        const cd ph = std::polar(1.0, k * xs[static_cast<std::size_t>(j)]);
        m(0, 2 + j) = gj * std::conj(ph);
        m(1, 2 + j) = gj * ph;
        m(2 + j, 2 + j) = atom;
        m(2 + j, 0) = -gj * ph;
        m(2 + j, 1) = -gj * std::conj(ph);
    }
    const Eigen::VectorXcd x = m.fullPivLu().solve(rhs);
    FullSteady out{x(0), x(1), {}};
    for (Eigen::Index j = 0; j < n; ++j) out.coherences.push_back(x(2 + j));
    return out;
}

// Location of the maximum of f on [lo, hi]: dense grid, then golden section.
inline double argmax(const std::function<double(double)>& f, double lo, double hi, int grid = 4001) {
    double best_x = lo, best = -INFINITY;
    const double h = (hi - lo) / (grid - 1);
    for (int i = 0; i < grid; ++i) {
        const double x = lo + h * i;
        const double v = f(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    double a = best_x - h, b = best_x + h;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < 300 && b - a > 1e-14 * (std::abs(a) + std::abs(b) + 1.0); ++i) {
        const double c = b - r * (b - a), e = a + r * (b - a);
        if (f(c) > f(e)) b = e; else a = c;
    }
    return 0.5 * (a + b);
}

// Full width at half of f(center) (offset-free peak), bisecting on each side.
inline double fwhm(const std::function<double(double)>& f, double center, double scale) {
    const double half = 0.5 * f(center);
    auto side = [&](double dir) {
        double inner = center, outer = center + dir * scale;
        while (f(outer) > half) outer = center + 2.0 * (outer - center);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (inner + outer);
            (f(mid) > half ? inner : outer) = mid;
        }
        return 0.5 * (inner + outer);
    };
    return side(1.0) - side(-1.0);
}

// Plain O(n^2) DFT magnitude spectrum of a real series (mean removed).
inline std::vector<double> dft_magnitude(const std::vector<double>& y) {
    const std::size_t n = y.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> out(n / 2 + 1);
    for (std::size_t f = 0; f < out.size(); ++f) {
        cd acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            acc += (y[i] - mean) * std::polar(1.0, -2.0 * M_PI * static_cast<double>(f * i) / static_cast<double>(n));
        }
        out[f] = std::abs(acc);
    }
    return out;
}

// Characteristic function of a zero-mean Gaussian displacement evaluated at
// the structure-factor wavevector 2k.
inline double gaussian_debye_waller(double k, double sigma) {
    return std::exp(-2.0 * k * k * sigma * sigma);
}

} // namespace oracle
