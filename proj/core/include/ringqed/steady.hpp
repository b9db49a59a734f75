#pragma once

#include <complex>
#include <vector>

#include "ringqed/array.hpp"
#include "ringqed/params.hpp"

namespace ringqed {

using Complex = std::complex<double>;

// Probe settings. Detunings are angular (rad/s). The input amplitude is real
// and nonnegative (sets the global phase); |e_in|^2 is the input photon flux.
struct DriveConfig {
    double cavity_detuning = 0.0;  // probe - cavity
    double atom_detuning = 0.0;    // probe - atom
    double e_in = 1.0;

    void validate() const;
    bool operator==(const DriveConfig&) const = default;
};

// Steady-state amplitudes of the forward (+x) and backward (-x)
// traveling-wave modes.
struct ModeAmplitudes {
    Complex forward;
    Complex backward;
};

// Amplitudes in the bright/dark eigenbasis.
struct EigenAmplitudes {
    Complex bright;
    Complex dark;
};

// What the cavity sees of the array: an effective atom number N_eff =
// sum_j w_j^2 and the weighted structure factor sum_j w_j^2 e^{2ikx_j} / N_eff,
// where w_j is the transverse coupling weight (1 on axis). Without transverse
// offsets this is simply (N, S).
struct CollectiveCoupling {
    double atom_number = 0.0;
    Complex structure_factor{0.0, 0.0};

    double abs_s() const noexcept { return std::abs(structure_factor); }
};

CollectiveCoupling collective_coupling(const CavityParams& p, const AtomArray& a);

// Coupling with a prescribed |S| (real, positive S). Useful for model curves
// at |S| values no physical array of that size can realise (e.g. N = 1).
inline CollectiveCoupling uniform_coupling(double atom_number, double abs_s) {
    return {atom_number, Complex{abs_s, 0.0}};
}

// Solves the adiabatically eliminated two-mode equations at d/dt = 0 by
// explicit 2x2 inversion. Throws NumericalError if the system is singular.
ModeAmplitudes steady_modes(const CavityParams& p, const CollectiveCoupling& c,
                            const DriveConfig& d);
ModeAmplitudes steady_modes(const CavityParams& p, const AtomArray& a, const DriveConfig& d);

// Closed-form steady state of the decoupled bright/dark equations. Requires |S| > 0.
EigenAmplitudes steady_eigenmodes(const CavityParams& p, const CollectiveCoupling& c,
                                  const DriveConfig& d);

// Unitary change of basis. Throws ValidationError at S = 0, where the
// traveling-wave basis is already diagonal.
EigenAmplitudes to_eigenmodes(const ModeAmplitudes& m, StructureFactor s);
ModeAmplitudes from_eigenmodes(const EigenAmplitudes& e, StructureFactor s);

struct ModePair {
    double bright = 0.0;
    double dark = 0.0;
};

// Resonance shifts (rad/s) N C kappa gamma Delta (1 +- |S|) / (4 Delta^2 + gamma^2).
ModePair resonance_shifts(const CavityParams& p, double atom_number, double abs_s,
                          double atom_detuning);

// Linewidth broadenings (rad/s) kappa N C (1 +- |S|) gamma^2 / (4 Delta^2 + gamma^2).
ModePair broadenings(const CavityParams& p, double atom_number, double abs_s,
                     double atom_detuning);

// broadenings() divided by kappa.
ModePair relative_broadenings(const CavityParams& p, double atom_number, double abs_s,
                              double atom_detuning);

struct AtomicResponse {
    std::vector<Complex> coherences;
    double total_excitation = 0.0;  // sum_j |sigma_j|^2
};

// Adiabatic atomic coherences driven by the given cavity amplitudes.
AtomicResponse atomic_amplitudes(const CavityParams& p, const AtomArray& a,
                                 const DriveConfig& d, const ModeAmplitudes& m);

// Intracavity field a_+ e^{ikx} + a_- e^{-ikx} (unit proportionality constant).
Complex intracavity_field(const ModeAmplitudes& m, double x, double wavenumber);

// Per-atom coupling rates g_j (g times the transverse weight).
std::vector<double> atom_couplings(const CavityParams& p, const AtomArray& a);

} // namespace ringqed
