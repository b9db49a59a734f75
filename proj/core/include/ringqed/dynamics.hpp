#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "ringqed/steady.hpp"

namespace ringqed {

// Cavity amplitudes plus one coherence per atom.
struct FullState {
    Complex forward;
    Complex backward;
    std::vector<Complex> coherences;
};

struct IntegratorConfig {
    double t_end = 0.0;
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
    // Output times in (0, t_end]; t = 0 and t_end are always recorded.
    std::vector<double> sample_times;
    // Integrate atomic coherences in a frame rotating at the atomic detuning.
    bool rotating_frame = false;

    void validate() const;
};

template <typename State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    const State& final_state() const { return states.back(); }
};

struct FullTrajectory : Trajectory<FullState> {
    // Largest sum_j |sigma_j|^2 seen on any accepted step, not just samples.
    double peak_excitation = 0.0;
};

using ReducedTrajectory = Trajectory<ModeAmplitudes>;

// Cavity modes with explicit atomic coherences (no adiabatic elimination).
// Starts from the vacuum unless `initial` is given. Throws NumericalError on
// step-size underflow or when max_steps is exhausted.
FullTrajectory integrate_full(const CavityParams& p, const AtomArray& a, const DriveConfig& d,
                              const IntegratorConfig& cfg,
                              const std::optional<FullState>& initial = std::nullopt);

// The two-mode equations with the atoms adiabatically eliminated.
ReducedTrajectory integrate_reduced(const CavityParams& p, const AtomArray& a,
                                    const DriveConfig& d, const IntegratorConfig& cfg,
                                    const std::optional<ModeAmplitudes>& initial = std::nullopt);

// Max over the trajectory of the total atomic excitation sum_j |sigma_j|^2.
// Linear response is trustworthy while this stays well below ~0.1.
double weak_excitation_check(const FullTrajectory& t);

// max_t |a_full(t) - a_reduced(t)| / max_t |a_reduced(t)| over the shared
// sample times, using the vector norm of (forward, backward).
double max_relative_deviation(const FullTrajectory& full, const ReducedTrajectory& reduced);

// CSV with columns t, Re/Im of each variable.
void write_trajectory_csv(std::ostream& os, const FullTrajectory& t);
void write_trajectory_csv(std::ostream& os, const ReducedTrajectory& t);

} // namespace ringqed
