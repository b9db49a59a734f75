#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ringqed/contour.hpp"
#include "ringqed/metrics.hpp"
#include "ringqed/params.hpp"
#include "ringqed/steady.hpp"

namespace ringqed {

struct CurveSeries {
    std::string label;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    std::optional<std::vector<double>> y_err;

    void validate() const;
    // Copy with y (and y_err) multiplied by `factor`.
    CurveSeries scaled(double factor, std::string new_y_label) const;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

// Bright and dark shifts (rad/s) over |S|.
std::pair<CurveSeries, CurveSeries> shifts_vs_s(const CavityParams& p, double atom_number,
                                                double atom_detuning, std::span<const double> s_grid);

// Bright and dark shifts (rad/s) for N = 0..n_max.
std::pair<CurveSeries, CurveSeries> shifts_vs_n(const CavityParams& p, int n_max,
                                                double atom_detuning, double abs_s);

// Atom detuning (rad/s, >= 0) at which the dark-mode relative broadening
// equals `level`. Throws ValidationError if the level is out of reach.
double detuning_on_broadening_contour(const CavityParams& p, double atom_number, double abs_s,
                                      double level);

struct PurityContour {
    Grid2D purity;      // x: NC, y: atom detuning (rad/s)
    Grid2D broadening;  // dark-mode relative broadening on the same grid
    double level = 0.05;
    std::vector<Polyline> level_curve;
};

// Grids are logarithmic in both NC and detuning. The atom number at each
// cell is NC / C with C taken from p.
PurityContour purity_contour(const CavityParams& p, double abs_s, Range nc, Range atom_detuning,
                             int resolution = 128, double level = 0.05, unsigned threads = 1);

// Smallest NC at which the purity on the broadening contour reaches
// `purity_target` (bisection in log NC).
double purity_threshold_nc(const CavityParams& p, double abs_s, double level = 0.05,
                           double purity_target = 0.98);

// Protocol for Figs. 3b/3c: for each N choose the detuning on the
// broadening contour, then report purity and both relative broadenings.
struct PurityVsN {
    CurveSeries purity;
    CurveSeries bright_broadening;
    CurveSeries dark_broadening;
    CurveSeries detuning;  // rad/s
};
PurityVsN purity_vs_n(const CavityParams& p, int n_max, double abs_s, double level = 0.05);

// Normalized conversion at the dark and bright resonances, N = 1..n_max.
std::pair<CurveSeries, CurveSeries> conversion_vs_n(const CavityParams& p, int n_max, double abs_s,
                                                    double contour_level = 0.05);

// Mean |S| of thermally smeared lambda/2 lattices with standard errors.
CurveSeries thermal_s_curve(double wavelength, double sigma, std::span<const int> atom_numbers,
                            int trials, std::uint64_t seed, unsigned threads = 1);

// Total transmitted flux at the bare cavity resonance versus the separation
// of two atoms.
CurveSeries fringe_scan(const CavityParams& p, double atom_detuning,
                        std::span<const double> separations);

// Dominant period of a uniformly sampled series (Hann window, refined DTFT
// peak).
double dominant_period(const CurveSeries& s);

enum class TransverseAxis { y, z };

// Bright-mode shift of one atom (rad/s) versus transverse offset.
CurveSeries waist_scan(const CavityParams& p, double atom_detuning, TransverseAxis axis,
                       std::span<const double> offsets);

// Fits shift(0) exp(-2 r^2 / w^2) to a waist scan; returns w.
double fit_waist(const CurveSeries& s);

// Bright and dark shifts (rad/s) versus atom detuning.
std::pair<CurveSeries, CurveSeries> dispersive_shift_scan(const CavityParams& p, double atom_number,
                                                          double abs_s,
                                                          std::span<const double> atom_detunings);

} // namespace ringqed
