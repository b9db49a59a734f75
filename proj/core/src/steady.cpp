#include "ringqed/steady.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ringqed/errors.hpp"

namespace ringqed {
namespace {

constexpr Complex i_unit{0.0, 1.0};

// Collective atomic response N g^2 / (i Delta - gamma/2).
Complex collective_response(const CavityParams& p, double atom_number, double atom_detuning) {
    const Complex denom{-0.5 * p.gamma, atom_detuning};
    if (std::abs(denom) == 0.0) {
        throw ValidationError("atom_detuning and gamma cannot both vanish");
    }
    return atom_number * p.g * p.g / denom;
}

// Common prefactor of the dispersive shift formulas: N C / (4 Delta^2 + gamma^2).
double dispersive_factor(const CavityParams& p, double atom_number, double atom_detuning) {
    return atom_number * cooperativity(p) /
           (4.0 * atom_detuning * atom_detuning + p.gamma * p.gamma);
}

void check_mode_args(double atom_number, double abs_s) {
    if (!(atom_number >= 0.0)) throw ValidationError("atom number must be >= 0");
    if (!(abs_s >= 0.0 && abs_s <= 1.0 + 1e-12)) throw ValidationError("|S| must lie in [0, 1]");
}

} // namespace

void DriveConfig::validate() const {
    if (!std::isfinite(cavity_detuning) || !std::isfinite(atom_detuning)) {
        throw ValidationError("detunings must be finite");
    }
    if (!(e_in >= 0.0) || !std::isfinite(e_in)) throw ValidationError("e_in must be >= 0");
}

std::vector<double> atom_couplings(const CavityParams& p, const AtomArray& a) {
    std::vector<double> g(a.size(), p.g);
    if (const auto& t = a.transverse()) {
        if (!p.waist_y || !p.waist_z) {
            throw ValidationError("transverse offsets require waist_y and waist_z");
        }
        for (std::size_t j = 0; j < g.size(); ++j) {
            g[j] *= coupling_weight((*t)[j].y, (*t)[j].z, *p.waist_y, *p.waist_z);
        }
    }
    return g;
}

CollectiveCoupling collective_coupling(const CavityParams& p, const AtomArray& a) {
    if (a.empty()) return {};
    if (!a.transverse()) return {static_cast<double>(a.size()), structure_factor(a, p.wavenumber())};
    if (!p.waist_y || !p.waist_z) {
        throw ValidationError("transverse offsets require waist_y and waist_z");
    }
    const auto& t = *a.transverse();
    const double k = p.wavenumber();
    double weight_sum = 0.0;
    Complex phase_sum{0.0, 0.0};
    const auto xs = a.positions();
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double w = coupling_weight(t[j].y, t[j].z, *p.waist_y, *p.waist_z);
        const double w2 = w * w;
        weight_sum += w2;
        phase_sum += w2 * std::polar(1.0, 2.0 * k * xs[j]);
    }
    if (weight_sum == 0.0) return {};
    return {weight_sum, phase_sum / weight_sum};
}

ModeAmplitudes steady_modes(const CavityParams& p, const CollectiveCoupling& c,
                            const DriveConfig& d) {
    d.validate();
    const Complex m = collective_response(p, c.atom_number, d.atom_detuning);
    const Complex diag = Complex{-0.5 * p.kappa, d.cavity_detuning} + m;
    const Complex forward_from_backward = m * std::conj(c.structure_factor);
    const Complex backward_from_forward = m * c.structure_factor;
    const Complex det = diag * diag - forward_from_backward * backward_from_forward;

    const double scale = std::max({std::abs(diag), std::abs(forward_from_backward),
                                   std::abs(backward_from_forward)});
    if (!(std::abs(det) >= 1e-14 * scale * scale) || !std::isfinite(std::abs(det))) {
        throw NumericalError("steady-state system is singular (|det| = " +
                             std::to_string(std::abs(det)) + ")");
    }
    const Complex source = i_unit * std::sqrt(p.kappa_in) * d.e_in;
    return {diag * source / det, -backward_from_forward * source / det};
}

ModeAmplitudes steady_modes(const CavityParams& p, const AtomArray& a, const DriveConfig& d) {
    return steady_modes(p, collective_coupling(p, a), d);
}

EigenAmplitudes steady_eigenmodes(const CavityParams& p, const CollectiveCoupling& c,
                                  const DriveConfig& d) {
    d.validate();
    const double s = c.abs_s();
    if (s == 0.0) throw ValidationError("eigenbasis undefined at S=0");
    const Complex m = collective_response(p, c.atom_number, d.atom_detuning);
    const Complex bare{-0.5 * p.kappa, d.cavity_detuning};
    const Complex source =
        i_unit * (c.structure_factor / s) * std::sqrt(p.kappa_in) * d.e_in / std::sqrt(2.0);
    return {source / (bare + m * (1.0 + s)), source / (bare + m * (1.0 - s))};
}

EigenAmplitudes to_eigenmodes(const ModeAmplitudes& m, StructureFactor s) {
    const double mag = std::abs(s);
    if (mag == 0.0) throw ValidationError("eigenbasis undefined at S=0");
    const Complex phase = s / mag;
    const double r = 1.0 / std::sqrt(2.0);
    return {r * (phase * m.forward + m.backward), r * (phase * m.forward - m.backward)};
}

ModeAmplitudes from_eigenmodes(const EigenAmplitudes& e, StructureFactor s) {
    const double mag = std::abs(s);
    if (mag == 0.0) throw ValidationError("eigenbasis undefined at S=0");
    const Complex phase = s / mag;
    const double r = 1.0 / std::sqrt(2.0);
    return {r * std::conj(phase) * (e.bright + e.dark), r * (e.bright - e.dark)};
}

ModePair resonance_shifts(const CavityParams& p, double atom_number, double abs_s,
                          double atom_detuning) {
    check_mode_args(atom_number, abs_s);
    const double base =
        dispersive_factor(p, atom_number, atom_detuning) * p.kappa * p.gamma * atom_detuning;
    return {base * (1.0 + abs_s), base * (1.0 - abs_s)};
}

ModePair relative_broadenings(const CavityParams& p, double atom_number, double abs_s,
                              double atom_detuning) {
    check_mode_args(atom_number, abs_s);
    const double base = dispersive_factor(p, atom_number, atom_detuning) * p.gamma * p.gamma;
    return {base * (1.0 + abs_s), base * (1.0 - abs_s)};
}

ModePair broadenings(const CavityParams& p, double atom_number, double abs_s,
                     double atom_detuning) {
    const auto rel = relative_broadenings(p, atom_number, abs_s, atom_detuning);
    return {rel.bright * p.kappa, rel.dark * p.kappa};
}

AtomicResponse atomic_amplitudes(const CavityParams& p, const AtomArray& a,
                                 const DriveConfig& d, const ModeAmplitudes& m) {
    const Complex denom{-0.5 * p.gamma, d.atom_detuning};
    if (std::abs(denom) == 0.0) {
        throw ValidationError("atom_detuning and gamma cannot both vanish");
    }
    const auto g = atom_couplings(p, a);
    const double k = p.wavenumber();
    AtomicResponse out;
    out.coherences.reserve(a.size());
    const auto xs = a.positions();
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const Complex sigma = g[j] * intracavity_field(m, xs[j], k) / denom;
        out.coherences.push_back(sigma);
        out.total_excitation += std::norm(sigma);
    }
    return out;
}

Complex intracavity_field(const ModeAmplitudes& m, double x, double k) {
    return m.forward * std::polar(1.0, k * x) + m.backward * std::polar(1.0, -k * x);
}

} // namespace ringqed
