#pragma once

#include <functional>
#include <vector>

namespace scarfinder {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Derivative-free Nelder-Mead minimization in low dimension. Stops when the
/// simplex diameter falls below x_tol or max_evals is exhausted.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, double initial_step, double x_tol,
                          int max_evals = 4000);

} // namespace scarfinder
