#pragma once

// Derivative-free Nelder-Mead simplex minimizer (standard coefficients:
// reflection 1, expansion 2, contraction 1/2, shrink 1/2).

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spex {

struct NelderMeadOptions {
    std::size_t max_evals = 2000;
    /// Converged when max |f_i - f_best| < tol_f and max |x_i - x_best|_inf < tol_x.
    double tol_f = 1e-6;
    double tol_x = 1e-5;
    /// Offset of the initial simplex vertices along each coordinate.
    double initial_step = 0.25;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
    std::size_t evals = 0;
};

/// Minimizes f from x0. Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options);

}  // namespace spex
