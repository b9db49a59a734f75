#pragma once

#include <functional>
#include <vector>

namespace ringqed {

// Residual callback for damped Gauss-Newton: fill `residuals` (size m) and,
// when `jacobian` is non-null, the row-major m x n Jacobian d r_i / d p_j.
using ResidualFn = std::function<void(const std::vector<double>& params,
                                      std::vector<double>& residuals,
                                      std::vector<double>* jacobian)>;

struct LevMarOptions {
    int max_iterations = 200;
    double rel_step_tol = 1e-10;
    double initial_damping = 1e-3;
};

struct LevMarResult {
    std::vector<double> params;
    double cost = 0.0;  // sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

// Levenberg-Marquardt with Marquardt diagonal scaling. Damping starts at
// options.initial_damping, grows x10 when a step increases the cost and
// shrinks /10 when it decreases. Converged when the relative parameter
// change falls below rel_step_tol, or when no damping level can reduce the
// cost any further (the iterate is a numerical minimum).
LevMarResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> initial,
                                 std::size_t residual_count, const LevMarOptions& options = {});

} // namespace ringqed
