#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ringqed/errors.hpp"
#include "ringqed/steady.hpp"

namespace ringqed {

// Transmission spectrum: output photon fluxes kappa_out |a_+-|^2 (photons/s)
// on a strictly increasing grid of probe-cavity detunings (rad/s).
struct SpectrumScan {
    std::vector<double> deltas;
    std::vector<double> forward;
    std::vector<double> backward;

    std::vector<double> total() const;
    void validate() const;
};

enum class Channel { forward, backward, total };

// Uniform grid of `points` detunings in [delta_min, delta_max] at fixed atom
// detuning, unit input amplitude unless e_in is given.
SpectrumScan scan(const CavityParams& p, const CollectiveCoupling& c, double atom_detuning,
                  double delta_min, double delta_max, int points, double e_in = 1.0);
SpectrumScan scan(const CavityParams& p, const AtomArray& a, double atom_detuning,
                  double delta_min, double delta_max, int points, double e_in = 1.0);

// Replaces each flux by Poisson(flux * dwell) / dwell.
SpectrumScan add_shot_noise(const SpectrumScan& s, double dwell_time, std::uint64_t seed);

// Analytic split of the total flux into the two eigenmode Lorentzians,
// kappa_out |c_bright|^2 and kappa_out |c_dark|^2, at each detuning. At S = 0
// any phase reference is valid and the forward mode plays both roles.
struct EigenFluxes {
    std::vector<double> bright;
    std::vector<double> dark;
};
EigenFluxes eigenmode_fluxes(const CavityParams& p, const CollectiveCoupling& c,
                             double atom_detuning, std::span<const double> deltas,
                             double e_in = 1.0);

// offset + area * (fwhm / 2pi) / ((delta - center)^2 + (fwhm/2)^2)
struct LorentzianFit {
    double center = 0.0;
    double fwhm = 0.0;
    double area = 0.0;
    double offset = 0.0;
    double residual_rms = 0.0;

    // Peak only, without the offset.
    double peak(double delta) const;
    double operator()(double delta) const { return offset + peak(delta); }
};

struct DoubleLorentzianFit {
    // Ordered by center. Both carry the shared offset.
    std::array<LorentzianFit, 2> components;
    double offset = 0.0;
    double residual_rms = 0.0;
    std::size_t bright_index = 0;  // broader component
    std::size_t dark_index = 1;    // narrower component
    // Flux of each component evaluated at the dark-peak center.
    double n_bright = 0.0;
    double n_dark = 0.0;

    const LorentzianFit& bright() const { return components[bright_index]; }
    const LorentzianFit& dark() const { return components[dark_index]; }
    double operator()(double delta) const;
};

// Thrown when the fit fails to converge; carries the last iterate.
class FitError : public NumericalError {
public:
    FitError(const std::string& what, std::vector<double> last_params, double residual_rms)
        : NumericalError(what), last_params_(std::move(last_params)), residual_rms_(residual_rms) {}
    const std::vector<double>& last_params() const noexcept { return last_params_; }
    double residual_rms() const noexcept { return residual_rms_; }

private:
    std::vector<double> last_params_;
    double residual_rms_;
};

// Weighted least-squares Lorentzian fit. Weights default to 1.
LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y,
                             std::span<const double> weights = {});
LorentzianFit fit_lorentzian(const SpectrumScan& s, Channel channel);

// Two Lorentzians on a shared offset. Throws ValidationError when the peaks
// are not resolved (center separation below the mean of the two FWHMs).
DoubleLorentzianFit fit_double_lorentzian(std::span<const double> x, std::span<const double> y,
                                          std::span<const double> weights = {});
DoubleLorentzianFit fit_double_lorentzian(const SpectrumScan& s);

// CSV with header delta_hz,n_plus,n_minus,n_total (detuning in Hz).
void write_scan_csv(std::ostream& os, const SpectrumScan& s);
SpectrumScan read_scan_csv(std::istream& is);

} // namespace ringqed
