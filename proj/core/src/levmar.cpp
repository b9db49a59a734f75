#include "ringqed/levmar.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "ringqed/errors.hpp"

namespace ringqed {
namespace {

double sum_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

} // namespace

LevMarResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> params,
                                 std::size_t m, const LevMarOptions& options) {
    const std::size_t n = params.size();
    if (m < n) throw ValidationError("least squares needs at least as many residuals as parameters");

    std::vector<double> r(m), jac(m * n), r_trial(m);
    fn(params, r, &jac);
    double cost = sum_sq(r);
    if (!std::isfinite(cost)) throw NumericalError("non-finite residual at the initial guess");

    LevMarResult result;
    double lambda = options.initial_damping;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        result.iterations = iter;
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(
            jac.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(m));
        const Eigen::MatrixXd jtj = J.transpose() * J;
        const Eigen::VectorXd grad = J.transpose() * rv;
        Eigen::VectorXd diag = jtj.diagonal();
        for (Eigen::Index i = 0; i < diag.size(); ++i) {
            if (!(diag(i) > 0.0)) diag(i) = 1e-300;
        }

        bool improved = false;
        bool small_step = false;
        while (lambda < 1e20) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::VectorXd step = a.ldlt().solve(-grad);
            std::vector<double> trial(params);
            double step_norm = 0.0, param_norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] += step(static_cast<Eigen::Index>(i));
                step_norm += step(static_cast<Eigen::Index>(i)) * step(static_cast<Eigen::Index>(i));
                param_norm += params[i] * params[i];
            }
            small_step = std::sqrt(step_norm) <=
                         options.rel_step_tol * (std::sqrt(param_norm) + options.rel_step_tol);
            fn(trial, r_trial, nullptr);
            const double trial_cost = sum_sq(r_trial);
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                params.swap(trial);
                const bool changed = trial_cost < cost;
                cost = trial_cost;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = changed || small_step;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved || small_step) {
            // Either converged by step size, or no damping reduces the cost.
            result.converged = true;
            break;
        }
        fn(params, r, &jac);
    }
    result.params = std::move(params);
    result.cost = cost;
    return result;
}

} // namespace ringqed
