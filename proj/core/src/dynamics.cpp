#include "ringqed/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "ringqed/errors.hpp"
#include "ringqed/format.hpp"

namespace ringqed {
namespace {

using StateVec = std::vector<Complex>;

constexpr Complex i_unit{0.0, 1.0};

// Dormand-Prince 5(4) tableau.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
} // namespace dp

// Right-hand side signature: f(t, y, dydt).
template <typename Rhs, typename OnStep>
void run_dopri(Rhs&& rhs, StateVec y, const IntegratorConfig& cfg, double stiffness_ratio,
               std::vector<double> targets, OnStep&& on_sample, std::size_t& accepted,
               std::size_t& rejected, const std::function<void(double, const StateVec&)>& on_accept) {
    const std::size_t n = y.size();
    StateVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);
    double t = 0.0;
    on_sample(t, y);

    rhs(t, y, k1);
    double h = std::min(cfg.max_step, cfg.t_end * 1e-6);
    double prev_err = 1.0;
    std::size_t next = 0;
    constexpr double safety = 0.9, alpha = 0.7 / 5.0, beta = 0.4 / 5.0;

    while (next < targets.size()) {
        const double target = targets[next];
        bool hit = false;
        double step = h;
        if (t + step >= target || target - (t + step) < 1e-3 * step) {
            step = target - t;
            hit = true;
        }
        if (step <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1e-300) ||
            !std::isfinite(step)) {
            std::ostringstream msg;
            msg << "step size underflow at t=" << t << " s (h=" << step
                << " s); stiffness ratio |i*Delta - gamma/2| / kappa = " << stiffness_ratio;
            throw NumericalError(msg.str());
        }
        if (accepted + rejected >= cfg.max_steps) {
            std::ostringstream msg;
            msg << "max_steps exhausted at t=" << t << " s; stiffness ratio |i*Delta - gamma/2| / kappa = "
                << stiffness_ratio;
            throw NumericalError(msg.str());
        }

        using namespace dp;
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + step * a21 * k1[i];
        rhs(t + c2 * step, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + step * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * step, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * step, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * step, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                    a65 * k5[i]);
        rhs(t + step, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y_new[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                      b6 * k6[i]);
        rhs(t + step, y_new, k7);

        double err_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
            const double sc =
                cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err_sq += std::norm(e) / (sc * sc);
        }
        const double err = std::sqrt(err_sq / static_cast<double>(n));
        if (!std::isfinite(err)) {
            ++rejected;
            h = 0.2 * step;
            continue;
        }

        if (err <= 1.0) {
            ++accepted;
            t = hit ? target : t + step;
            y.swap(y_new);
            k1.swap(k7);
            on_accept(t, y);
            double factor = err == 0.0 ? 5.0
                                       : safety * std::pow(err, -alpha) * std::pow(prev_err, beta);
            factor = std::clamp(factor, 0.2, 5.0);
            prev_err = std::max(err, 1e-4);
            // Do not let a short landing step shrink the controller's h.
            h = std::min(cfg.max_step, (hit ? std::max(h, step) : step) * factor);
            if (hit) {
                on_sample(t, y);
                ++next;
            }
        } else {
            ++rejected;
            h = step * std::max(0.2, safety * std::pow(err, -alpha));
        }
    }
}

std::vector<double> sample_targets(const IntegratorConfig& cfg) {
    std::vector<double> targets;
    for (double s : cfg.sample_times) {
        if (s > 0.0 && s < cfg.t_end) targets.push_back(s);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    targets.push_back(cfg.t_end);
    return targets;
}

double stiffness_ratio(const CavityParams& p, const DriveConfig& d) {
    return std::abs(Complex{-0.5 * p.gamma, d.atom_detuning}) / p.kappa;
}

} // namespace

void IntegratorConfig::validate() const {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be > 0");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ValidationError("rel_tol must lie in (0, 1)");
    if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw ValidationError("abs_tol must lie in (0, 1)");
    if (!(max_step > 0.0)) throw ValidationError("max_step must be > 0");
}

FullTrajectory integrate_full(const CavityParams& p, const AtomArray& a, const DriveConfig& d,
                              const IntegratorConfig& cfg, const std::optional<FullState>& initial) {
    p.validate();
    d.validate();
    cfg.validate();
    const std::size_t n_atoms = a.size();
    if (initial && initial->coherences.size() != n_atoms) {
        throw ValidationError("initial state must carry one coherence per atom");
    }

    const auto g = atom_couplings(p, a);
    const double k = p.wavenumber();
    std::vector<Complex> phase(n_atoms);  // e^{i k x_j}
    for (std::size_t j = 0; j < n_atoms; ++j) phase[j] = std::polar(1.0, k * a.positions()[j]);

    const Complex cavity_rate{-0.5 * p.kappa, d.cavity_detuning};
    const Complex drive = -i_unit * std::sqrt(p.kappa_in) * d.e_in;
    const bool rotating = cfg.rotating_frame;
    const Complex atom_rate = rotating ? Complex{-0.5 * p.gamma, 0.0}
                                       : Complex{-0.5 * p.gamma, d.atom_detuning};
    const double atom_detuning = d.atom_detuning;

    auto rhs = [&](double t, const StateVec& y, StateVec& dy) {
        const Complex frame = rotating ? std::polar(1.0, atom_detuning * t) : Complex{1.0, 0.0};
        Complex into_forward{0.0, 0.0}, into_backward{0.0, 0.0};
        for (std::size_t j = 0; j < n_atoms; ++j) {
            const Complex sigma = y[2 + j] * frame;
            into_forward += g[j] * std::conj(phase[j]) * sigma;
            into_backward += g[j] * phase[j] * sigma;
        }
        dy[0] = cavity_rate * y[0] + into_forward + drive;
        dy[1] = cavity_rate * y[1] + into_backward;
        for (std::size_t j = 0; j < n_atoms; ++j) {
            const Complex field = phase[j] * y[0] + std::conj(phase[j]) * y[1];
            dy[2 + j] = atom_rate * y[2 + j] - g[j] * field * std::conj(frame);
        }
    };

    StateVec y0(2 + n_atoms, Complex{0.0, 0.0});
    if (initial) {
        y0[0] = initial->forward;
        y0[1] = initial->backward;
        std::copy(initial->coherences.begin(), initial->coherences.end(), y0.begin() + 2);
    }

    FullTrajectory out;
    auto to_state = [&](double t, const StateVec& y) {
        FullState s{y[0], y[1], std::vector<Complex>(y.begin() + 2, y.end())};
        if (rotating) {
            const Complex frame = std::polar(1.0, atom_detuning * t);
            for (auto& c : s.coherences) c *= frame;
        }
        return s;
    };
    auto excitation = [&](const StateVec& y) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n_atoms; ++j) sum += std::norm(y[2 + j]);
        return sum;
    };
    out.peak_excitation = excitation(y0);
    run_dopri(
        rhs, y0, cfg, stiffness_ratio(p, d), sample_targets(cfg),
        [&](double t, const StateVec& y) {
            out.times.push_back(t);
            out.states.push_back(to_state(t, y));
        },
        out.accepted_steps, out.rejected_steps,
        [&](double, const StateVec& y) {
            out.peak_excitation = std::max(out.peak_excitation, excitation(y));
        });
    return out;
}

ReducedTrajectory integrate_reduced(const CavityParams& p, const AtomArray& a,
                                    const DriveConfig& d, const IntegratorConfig& cfg,
                                    const std::optional<ModeAmplitudes>& initial) {
    p.validate();
    d.validate();
    cfg.validate();
    const auto c = collective_coupling(p, a);
    const Complex response =
        c.atom_number * p.g * p.g / Complex{-0.5 * p.gamma, d.atom_detuning};
    const Complex diag = Complex{-0.5 * p.kappa, d.cavity_detuning} + response;
    const Complex from_backward = response * std::conj(c.structure_factor);
    const Complex from_forward = response * c.structure_factor;
    const Complex drive = -i_unit * std::sqrt(p.kappa_in) * d.e_in;

    auto rhs = [&](double, const StateVec& y, StateVec& dy) {
        dy[0] = diag * y[0] + from_backward * y[1] + drive;
        dy[1] = diag * y[1] + from_forward * y[0];
    };
    StateVec y0{initial ? initial->forward : Complex{}, initial ? initial->backward : Complex{}};

    ReducedTrajectory out;
    run_dopri(
        rhs, y0, cfg, stiffness_ratio(p, d), sample_targets(cfg),
        [&](double t, const StateVec& y) {
            out.times.push_back(t);
            out.states.push_back(ModeAmplitudes{y[0], y[1]});
        },
        out.accepted_steps, out.rejected_steps, [](double, const StateVec&) {});
    return out;
}

double weak_excitation_check(const FullTrajectory& t) {
    double peak = t.peak_excitation;
    for (const auto& s : t.states) {
        double sum = 0.0;
        for (const auto& c : s.coherences) sum += std::norm(c);
        peak = std::max(peak, sum);
    }
    return peak;
}

double max_relative_deviation(const FullTrajectory& full, const ReducedTrajectory& reduced) {
    if (full.times.size() != reduced.times.size()) {
        throw ValidationError("trajectories must share sample times");
    }
    double max_diff = 0.0, max_norm = 0.0;
    for (std::size_t i = 0; i < full.times.size(); ++i) {
        if (std::abs(full.times[i] - reduced.times[i]) > 1e-12 * std::abs(full.times[i])) {
            throw ValidationError("trajectories must share sample times");
        }
        const auto& f = full.states[i];
        const auto& r = reduced.states[i];
        max_diff = std::max(max_diff, std::sqrt(std::norm(f.forward - r.forward) +
                                                std::norm(f.backward - r.backward)));
        max_norm = std::max(max_norm, std::sqrt(std::norm(r.forward) + std::norm(r.backward)));
    }
    return max_norm == 0.0 ? max_diff : max_diff / max_norm;
}

void write_trajectory_csv(std::ostream& os, const FullTrajectory& t) {
    const std::size_t n = t.states.empty() ? 0 : t.states.front().coherences.size();
    os << "t,re_forward,im_forward,re_backward,im_backward";
    for (std::size_t j = 0; j < n; ++j) os << ",re_sigma" << j << ",im_sigma" << j;
    os << '\n';
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        const auto& s = t.states[i];
        os << format_double(t.times[i]) << ',' << format_double(s.forward.real()) << ','
           << format_double(s.forward.imag()) << ',' << format_double(s.backward.real()) << ','
           << format_double(s.backward.imag());
        for (const auto& c : s.coherences)
            os << ',' << format_double(c.real()) << ',' << format_double(c.imag());
        os << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const ReducedTrajectory& t) {
    os << "t,re_forward,im_forward,re_backward,im_backward\n";
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        const auto& s = t.states[i];
        os << format_double(t.times[i]) << ',' << format_double(s.forward.real()) << ','
           << format_double(s.forward.imag()) << ',' << format_double(s.backward.real()) << ','
           << format_double(s.backward.imag()) << '\n';
    }
}

} // namespace ringqed
