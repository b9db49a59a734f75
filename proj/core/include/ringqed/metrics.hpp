#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ringqed/spectra.hpp"
#include "ringqed/steady.hpp"

namespace ringqed {

// Dark-mode purity D = n_dark / (n_bright + n_dark) when probing at the dark
// resonance. Fluxes in photons/s for unit input amplitude.
struct PurityReport {
    double purity = 0.0;
    double n_bright = 0.0;
    double n_dark = 0.0;
    double delta_used = 0.0;  // probe-cavity detuning, rad/s
};

struct ConversionReport {
    double chi = 0.0;             // n_backward / n_in
    double chi_normalized = 0.0;  // chi / (eta_in eta_out)
    double eta_in = 0.0;
    double eta_out = 0.0;
};

struct PhaseReport {
    double delta_phi = 0.0;          // unwrapped phase change of the backward mode
    double forward_phase_change = 0.0;
    double displacement = 0.0;       // m
    double phi_before = 0.0;
    double phi_after = 0.0;
};

enum class Resonance { bright, dark };

// Closed form from the decoupled eigenmode steady states at delta = shift of
// the dark mode. Throws ValidationError when the two resonances coincide
// (|S| = 0 or zero atom detuning).
PurityReport dark_purity(const CavityParams& p, double atom_number, double abs_s,
                         double atom_detuning);

// Experiment-style estimate: synthesise the total-transmission spectrum,
// fit two Lorentzians and read both components at the fitted dark center.
PurityReport dark_purity_fitted(const CavityParams& p, double atom_number, double abs_s,
                                double atom_detuning, int points = 2001);

// Exact conversion efficiency from the two-mode steady state, probing at the
// chosen eigenmode resonance.
ConversionReport conversion_direct(const CavityParams& p, const CollectiveCoupling& c,
                                   double atom_detuning, Resonance at = Resonance::dark);
ConversionReport conversion_direct(const CavityParams& p, const AtomArray& a,
                                   double atom_detuning, Resonance at = Resonance::dark);

// Closed-form conversion at the dark resonance, written in terms of the
// dark-mode relative broadening. The (1 - |S|) / broadening ratio is evaluated
// in its cancelled form so |S| = 1 is regular; it tends to eta_in eta_out only
// as NC grows.
ConversionReport conversion_closed_form(const CavityParams& p, double atom_number, double abs_s,
                                        double atom_detuning);

// Large-NC limit eta_in eta_out / (1 + dark relative broadening)^2.
ConversionReport conversion_asymptotic(const CavityParams& p, double dark_relative_broadening);

// Phase of the backward mode after translating the array by `displacement`,
// unwrapped by following the path 0 -> displacement in steps of at most
// lambda/16. Probed at the dark resonance of the array.
PhaseReport phase_shift(const CavityParams& p, const AtomArray& a, double displacement,
                        double atom_detuning);

struct CorrelationPoint {
    double cos_phi1 = 0.0;
    double cos_phi2 = 0.0;
};

// Pairs (cos theta, cos(theta + delta_phi)) for `samples` common interferometer
// phases theta drawn uniformly from [0, 2pi). Optional Gaussian noise is
// added independently to each coordinate.
std::vector<CorrelationPoint> interference_correlation(double delta_phi, int samples,
                                                       std::uint64_t seed,
                                                       double point_noise = 0.0);

struct EllipseFitResult {
    double delta_phi = 0.0;  // in [0, pi]
    bool degenerate = false; // points collapse onto a line (delta_phi ~ 0 or pi)
    double residual_rms = 0.0;
};

// Fits the conic x^2 + y^2 - 2 cos(dphi) x y = sin^2(dphi) by algebraic least
// squares, then one Sampson-weighted refinement pass.
EllipseFitResult ellipse_fit(const std::vector<CorrelationPoint>& points);

void write_correlation_csv(std::ostream& os, const std::vector<CorrelationPoint>& points);

} // namespace ringqed
