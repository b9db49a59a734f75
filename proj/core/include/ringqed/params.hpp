#pragma once

#include <optional>

#include "ringqed/constants.hpp"

namespace ringqed {

// Rates are angular frequencies (rad/s); lengths are metres. Conversion from
// the Hz/kHz/MHz values people quote happens at the config boundary.
struct CavityParams {
    double kappa = 0.0;      // total field-energy decay rate of each mode
    double kappa_in = 0.0;   // input-mirror coupling
    double kappa_out = 0.0;  // output (detection) mirror coupling
    double gamma = 0.0;      // atomic spontaneous emission rate
    double g = 0.0;          // single-atom coupling to one traveling-wave mode
    double wavelength = constants::default_wavelength;
    std::optional<double> fsr;      // Hz (ordinary frequency)
    std::optional<double> waist_y;  // m
    std::optional<double> waist_z;  // m

    double wavenumber() const noexcept { return constants::two_pi / wavelength; }
    double eta_in() const noexcept { return kappa_in / kappa; }
    double eta_out() const noexcept { return kappa_out / kappa; }

    // Throws ValidationError if any invariant is broken.
    void validate() const;

    // kappa/2pi = 33.6 kHz, gamma/2pi = 6.07 MHz, C = 12.5,
    // eta_in = 0.03, eta_out = 0.28, 780 nm, FSR 1472.091 MHz,
    // waists 6.5 um x 8.7 um.
    static CavityParams experiment_defaults();

    bool operator==(const CavityParams&) const = default;
};

struct ThermalModel {
    double temperature = 0.0;     // K
    double trap_frequency = 0.0;  // rad/s
    double atom_mass = constants::rb87_mass;

    void validate() const;

    // 5.2 uK, 2pi x 120 kHz, 87Rb.
    static ThermalModel experiment_defaults();

    bool operator==(const ThermalModel&) const = default;
};

// Single-atom cooperativity per traveling-wave mode, 4 g^2 / (kappa gamma).
double cooperativity(const CavityParams& p);

// Inverse of cooperativity(): g = sqrt(C kappa gamma / 4).
double g_from_cooperativity(double cooperativity, double kappa, double gamma);

// fsr in Hz, kappa in rad/s.
double finesse(double fsr_hz, double kappa);

// Total round-trip loss plus transmission of all mirrors, as a fraction
// (multiply by 1e6 for ppm).
double mirror_budget(double finesse);

// Round-trip length of a ring with the given free spectral range (Hz).
double cavity_length(double fsr_hz);

struct GeometricCooperativity {
    double closed_transition = 0.0;     // circular drive of the stretched transition
    double linear_polarization = 0.0;   // half of the above
};

// Cooperativity implied by finesse and TEM00 waists: 6F / (k^2 pi w_y w_z).
GeometricCooperativity c0_from_geometry(double finesse, double wavenumber,
                                        double waist_y, double waist_z);

// RMS position spread of a harmonically trapped atom in a thermal state.
double thermal_sigma(const ThermalModel& t);

// Bose occupation of the trap mode.
double mean_phonon(const ThermalModel& t);

} // namespace ringqed
