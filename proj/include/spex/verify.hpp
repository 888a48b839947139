#pragma once

// Numerical verification suites: closed-form reference values and
// finite-difference gates for the analytic derivatives.

#include <string>
#include <vector>

namespace spex {

struct CheckRow {
    std::string suite;
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    /// Absolute or relative error, as stated by the check.
    double error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Suites: margins, maxstable, appendix-a, appendix-b.
std::vector<CheckRow> verify_suite(const std::string& suite);

/// Smith exponent partials v1, v2, v12 against Richardson-extrapolated central
/// differences of an extended-precision V on y1, y2 in {0.5, 1, 2, 5, 10} and
/// a in {0.5, 1, 2}.
std::vector<CheckRow> exponent_partial_checks(double tolerance = 1e-5);

/// Brown-Resnick Gumbel-margin derivatives against central differences of
/// extended-precision B, B_x, B_y, B_xy, and dJ/dtheta from the k-formulas
/// against the difference of J in gamma.
std::vector<CheckRow> br_derivative_checks(double tolerance = 1e-6);

/// Mean |gap/A(t) - Psi| on the fixed grid for t in {1e4, 1e8, 1e16}, and
/// whether it strictly decreases, for rho in {0, 0.5}.
std::vector<CheckRow> second_order_convergence_checks();

bool all_pass(const std::vector<CheckRow>& rows);

}  // namespace spex
