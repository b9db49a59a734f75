#include "ringqed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <tuple>

#include "ringqed/errors.hpp"
#include "ringqed/format.hpp"
#include "ringqed/random.hpp"

namespace ringqed {
namespace {

double dark_shift(const CavityParams& p, double atom_number, double abs_s, double atom_detuning) {
    return resonance_shifts(p, atom_number, abs_s, atom_detuning).dark;
}

void require_split_resonances(const CavityParams& p, double atom_number, double abs_s,
                              double atom_detuning) {
    if (!(abs_s > 0.0)) throw ValidationError("purity needs |S| > 0 (eigenbasis undefined at S=0)");
    const auto shifts = resonance_shifts(p, atom_number, abs_s, atom_detuning);
    if (shifts.bright == shifts.dark) {
        throw ValidationError("bright and dark resonances coincide; purity is undefined");
    }
}

} // namespace

PurityReport dark_purity(const CavityParams& p, double atom_number, double abs_s,
                         double atom_detuning) {
    require_split_resonances(p, atom_number, abs_s, atom_detuning);
    const double delta = dark_shift(p, atom_number, abs_s, atom_detuning);
    const auto e = steady_eigenmodes(p, uniform_coupling(atom_number, abs_s),
                                     DriveConfig{delta, atom_detuning, 1.0});
    PurityReport r;
    r.n_bright = p.kappa_out * std::norm(e.bright);
    r.n_dark = p.kappa_out * std::norm(e.dark);
    r.purity = r.n_dark / (r.n_bright + r.n_dark);
    r.delta_used = delta;
    return r;
}

PurityReport dark_purity_fitted(const CavityParams& p, double atom_number, double abs_s,
                                double atom_detuning, int points) {
    require_split_resonances(p, atom_number, abs_s, atom_detuning);
    const auto shifts = resonance_shifts(p, atom_number, abs_s, atom_detuning);
    const auto widths = broadenings(p, atom_number, abs_s, atom_detuning);
    const double widest = p.kappa + std::max(widths.bright, widths.dark);
    const double lo = std::min(shifts.bright, shifts.dark) - 10.0 * widest;
    const double hi = std::max(shifts.bright, shifts.dark) + 10.0 * widest;
    const auto s = scan(p, uniform_coupling(atom_number, abs_s), atom_detuning, lo, hi, points);
    const auto fit = fit_double_lorentzian(s);
    PurityReport r;
    r.n_bright = fit.n_bright;
    r.n_dark = fit.n_dark;
    r.purity = r.n_dark / (r.n_bright + r.n_dark);
    r.delta_used = fit.dark().center;
    return r;
}

ConversionReport conversion_direct(const CavityParams& p, const CollectiveCoupling& c,
                                   double atom_detuning, Resonance at) {
    const auto shifts = resonance_shifts(p, c.atom_number, std::min(c.abs_s(), 1.0), atom_detuning);
    const double delta = at == Resonance::dark ? shifts.dark : shifts.bright;
    const auto m = steady_modes(p, c, DriveConfig{delta, atom_detuning, 1.0});
    ConversionReport r;
    r.eta_in = p.eta_in();
    r.eta_out = p.eta_out();
    r.chi = p.kappa_out * std::norm(m.backward);
    r.chi_normalized = r.chi / (r.eta_in * r.eta_out);
    return r;
}

ConversionReport conversion_direct(const CavityParams& p, const AtomArray& a, double atom_detuning,
                                   Resonance at) {
    return conversion_direct(p, collective_coupling(p, a), atom_detuning, at);
}

ConversionReport conversion_closed_form(const CavityParams& p, double atom_number, double abs_s,
                                        double atom_detuning) {
    const double s = abs_s;
    const double nc = atom_number * cooperativity(p);
    const double lorentz_weight =
        p.gamma * p.gamma / (4.0 * atom_detuning * atom_detuning + p.gamma * p.gamma);
    const double broadening = relative_broadenings(p, atom_number, s, atom_detuning).dark;
    ConversionReport r;
    r.eta_in = p.eta_in();
    r.eta_out = p.eta_out();
    if (nc == 0.0 || s == 0.0) {
        r.chi = 0.0;
        r.chi_normalized = 0.0;
        return r;
    }
    // (1 - |S|) / (dark broadening) == 1 / (N C gamma^2 / (4 Delta^2 + gamma^2)), which stays
    // finite at |S| = 1.
    const double ratio = 1.0 / (nc * lorentz_weight);
    const double core = 4.0 * s * s * nc;
    const double bracket = core + (1.0 + 3.0 * s) * broadening + ratio + 2.0 * (1.0 + s);
    r.chi_normalized = core / ((1.0 + broadening) * (1.0 + broadening) * bracket);
    r.chi = r.chi_normalized * r.eta_in * r.eta_out;
    return r;
}

ConversionReport conversion_asymptotic(const CavityParams& p, double dark_relative_broadening) {
    ConversionReport r;
    r.eta_in = p.eta_in();
    r.eta_out = p.eta_out();
    r.chi_normalized = 1.0 / ((1.0 + dark_relative_broadening) * (1.0 + dark_relative_broadening));
    r.chi = r.chi_normalized * r.eta_in * r.eta_out;
    return r;
}

PhaseReport phase_shift(const CavityParams& p, const AtomArray& a, double displacement,
                        double atom_detuning) {
    if (a.empty()) throw ValidationError("phase shift needs a non-empty array");
    const auto c0 = collective_coupling(p, a);
    if (!(c0.abs_s() > 1e-12)) throw ValidationError("backward mode is not excited at S = 0");
    const double delta = dark_shift(p, c0.atom_number, std::min(c0.abs_s(), 1.0), atom_detuning);
    const DriveConfig drive{delta, atom_detuning, 1.0};

    const double max_step = p.wavelength / 16.0;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(displacement) / max_step)));

    auto modes_at = [&](double x) { return steady_modes(p, displace(a, x), drive); };
    auto prev = modes_at(0.0);
    PhaseReport r;
    r.displacement = displacement;
    r.phi_before = std::arg(prev.backward);
    for (int i = 1; i <= steps; ++i) {
        const double x = displacement * static_cast<double>(i) / static_cast<double>(steps);
        const auto cur = modes_at(x);
        r.delta_phi += std::arg(cur.backward / prev.backward);
        r.forward_phase_change += std::arg(cur.forward / prev.forward);
        prev = cur;
    }
    r.phi_after = std::arg(prev.backward);
    return r;
}

std::vector<CorrelationPoint> interference_correlation(double delta_phi, int samples,
                                                       std::uint64_t seed, double point_noise) {
    if (samples < 8) throw ValidationError("need at least 8 correlation samples");
    if (!(point_noise >= 0.0)) throw ValidationError("point noise must be >= 0");
    Rng rng(seed);
    std::uniform_real_distribution<double> theta_dist(0.0, constants::two_pi);
    std::normal_distribution<double> noise(0.0, point_noise > 0.0 ? point_noise : 1.0);
    std::vector<CorrelationPoint> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double theta = theta_dist(rng);
        CorrelationPoint pt{std::cos(theta), std::cos(theta + delta_phi)};
        if (point_noise > 0.0) {
            pt.cos_phi1 += noise(rng);
            pt.cos_phi2 += noise(rng);
        }
        out.push_back(pt);
    }
    return out;
}

EllipseFitResult ellipse_fit(const std::vector<CorrelationPoint>& points) {
    if (points.size() < 8) throw ValidationError("ellipse fit needs at least 8 points");

    // Weighted regression of x^2 + y^2 on [2xy, 1]: returns (cos dphi, sin^2 dphi).
    auto solve = [&](const std::vector<double>& w) {
        double s_uu = 0, s_u1 = 0, s_11 = 0, s_uz = 0, s_1z = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double x = points[i].cos_phi1, y = points[i].cos_phi2;
            const double u = 2.0 * x * y, z = x * x + y * y;
            s_uu += w[i] * u * u;
            s_u1 += w[i] * u;
            s_11 += w[i];
            s_uz += w[i] * u * z;
            s_1z += w[i] * z;
        }
        const double det = s_uu * s_11 - s_u1 * s_u1;
        if (!(std::abs(det) > 0.0)) throw NumericalError("ellipse fit is singular (no phase spread)");
        const double c = (s_11 * s_uz - s_u1 * s_1z) / det;
        const double s = (s_uu * s_1z - s_u1 * s_uz) / det;
        return std::pair{c, s};
    };

    std::vector<double> w(points.size(), 1.0);
    auto [c, s] = solve(w);
    // One refinement pass with Sampson weights 1 / |grad F|^2. Skipped when
    // the points already lie on a line through the origin (gradient ~ 0).
    double grad_max = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i].cos_phi1, y = points[i].cos_phi2;
        const double gx = 2.0 * (x - c * y), gy = 2.0 * (y - c * x);
        w[i] = gx * gx + gy * gy;
        grad_max = std::max(grad_max, w[i]);
    }
    if (grad_max > 1e-20) {
        for (double& v : w) v = grad_max / std::max(v, 1e-6 * grad_max);
        std::tie(c, s) = solve(w);
    }

    EllipseFitResult r;
    r.delta_phi = std::acos(std::clamp(c, -1.0, 1.0));
    r.degenerate = s < 1e-9 || std::abs(c) >= 1.0;
    double sq = 0.0;
    for (const auto& pt : points) {
        const double x = pt.cos_phi1, y = pt.cos_phi2;
        const double f = x * x + y * y - 2.0 * c * x * y - s;
        sq += f * f;
    }
    r.residual_rms = std::sqrt(sq / static_cast<double>(points.size()));
    return r;
}

void write_correlation_csv(std::ostream& os, const std::vector<CorrelationPoint>& points) {
    os << "cos_phi1,cos_phi2\n";
    for (const auto& pt : points) {
        os << format_double(pt.cos_phi1) << ',' << format_double(pt.cos_phi2) << '\n';
    }
}

} // namespace ringqed
