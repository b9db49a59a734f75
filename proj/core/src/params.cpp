#include "ringqed/params.hpp"

#include <cmath>
#include <string>

#include "ringqed/errors.hpp"

namespace ringqed {
namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(name) + " must be finite and > 0, got " +
                              std::to_string(v));
    }
}

} // namespace

void CavityParams::validate() const {
    require_positive(kappa, "kappa");
    require_positive(kappa_in, "kappa_in");
    require_positive(kappa_out, "kappa_out");
    require_positive(gamma, "gamma");
    if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("g must be finite and >= 0");
    require_positive(wavelength, "wavelength");
    // Allow rounding slack when the couplings are specified as fractions.
    if (kappa_in + kappa_out > kappa * (1.0 + 1e-12)) {
        throw ValidationError("kappa_in + kappa_out must not exceed kappa");
    }
    if (fsr) require_positive(*fsr, "fsr");
    if (waist_y) require_positive(*waist_y, "waist_y");
    if (waist_z) require_positive(*waist_z, "waist_z");
}

CavityParams CavityParams::experiment_defaults() {
    using constants::two_pi;
    CavityParams p;
    p.kappa = two_pi * 33.6e3;
    p.gamma = two_pi * 6.07e6;
    p.kappa_in = 0.03 * p.kappa;
    p.kappa_out = 0.28 * p.kappa;
    p.g = g_from_cooperativity(12.5, p.kappa, p.gamma);
    p.wavelength = constants::default_wavelength;
    p.fsr = 1472.091e6;
    p.waist_y = 6.5e-6;
    p.waist_z = 8.7e-6;
    return p;
}

void ThermalModel::validate() const {
    require_positive(temperature, "temperature");
    require_positive(trap_frequency, "trap_frequency");
    require_positive(atom_mass, "atom_mass");
}

ThermalModel ThermalModel::experiment_defaults() {
    return ThermalModel{5.2e-6, constants::two_pi * 120e3, constants::rb87_mass};
}

double cooperativity(const CavityParams& p) {
    return 4.0 * p.g * p.g / (p.kappa * p.gamma);
}

double g_from_cooperativity(double c, double kappa, double gamma) {
    if (!(c >= 0.0)) throw ValidationError("cooperativity must be >= 0");
    require_positive(kappa, "kappa");
    require_positive(gamma, "gamma");
    return std::sqrt(c * kappa * gamma / 4.0);
}

double finesse(double fsr_hz, double kappa) {
    require_positive(fsr_hz, "fsr");
    require_positive(kappa, "kappa");
    return fsr_hz / (kappa / constants::two_pi);
}

double mirror_budget(double f) {
    require_positive(f, "finesse");
    return constants::two_pi / f;
}

double cavity_length(double fsr_hz) {
    require_positive(fsr_hz, "fsr");
    return constants::speed_of_light / fsr_hz;
}

GeometricCooperativity c0_from_geometry(double f, double k, double waist_y, double waist_z) {
    require_positive(f, "finesse");
    require_positive(k, "wavenumber");
    require_positive(waist_y, "waist_y");
    require_positive(waist_z, "waist_z");
    const double c0 = 6.0 * f / (k * k * constants::pi * waist_y * waist_z);
    return {c0, 0.5 * c0};
}

double thermal_sigma(const ThermalModel& t) {
    t.validate();
    using namespace constants;
    const double zero_point = hbar / (2.0 * t.atom_mass * t.trap_frequency);
    const double x = hbar * t.trap_frequency / (2.0 * boltzmann * t.temperature);
    // coth(x) -> 1/x for small x; std::tanh is accurate over the whole range.
    return std::sqrt(zero_point / std::tanh(x));
}

double mean_phonon(const ThermalModel& t) {
    t.validate();
    using namespace constants;
    const double x = hbar * t.trap_frequency / (boltzmann * t.temperature);
    return 1.0 / std::expm1(x);
}

} // namespace ringqed
