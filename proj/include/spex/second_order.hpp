#pragma once

// Second-order expansion of the bivariate normal exceedance law:
//   F_{b_t,d_t}(a_t x, c_t y) = H(x,y) + A(t) Psi(x,y) + R_t(x,y),
// with A(t) = 1/(2 log t), b_t = d_t and a_t = c_t from the textbook
// normalizing constants, and the density-level residual that enters the
// integrability bound for score integrals.

#include <span>
#include <vector>

#include "spex/numeric.hpp"

namespace spex {

struct NormalizingConstants {
    double a_t = 0.0;
    double b_t = 0.0;
};

/// a_t = 1/sqrt(2 log t), b_t = sqrt(2 log t) - (log log t + log 4 pi)/(2 sqrt(2 log t)); t > e.
NormalizingConstants normalizing_constants(double t);

/// A(t) = 1/(2 log t), t > 1.
double second_order_rate(double t);

/// Psi(x,y) = exp{-(x+y)/(1+rho)} + e^{-x} + e^{-y}.
double second_order_psi(double x, double y, double rho);

/// The fixed grid {0, 0.5, 1, 1.5, 2}^2.
std::vector<Vec2> default_second_order_grid();

struct SecondOrderPoint {
    double x = 0.0;
    double y = 0.0;
    /// Gap against H(x,y) = 1 - (e^{-x} + e^{-y}), divided by A(t).
    double gap_over_A = 0.0;
    /// Gap against H(x,y) = 1 - (e^{-x} + e^{-y})/2, divided by A(t).
    double gap_over_A_normalized = 0.0;
    double psi = 0.0;
};

struct SecondOrderEval {
    double rho = 0.0;
    double t = 0.0;
    double a_t = 0.0;
    double b_t = 0.0;
    double A = 0.0;
    std::vector<SecondOrderPoint> points;
    /// Set when 1 - F(b_t, b_t) falls below 1e-300; gaps are then NaN.
    bool denominator_underflow = false;

    double mean_abs_deviation() const;
    double mean_abs_deviation_normalized() const;
};

SecondOrderEval second_order_gap(double rho, double t, std::span<const Vec2> grid);

/// Density residual {f_{b_t,d_t}(a_t x, c_t y) - h(x,y)}/A(t) - psi with h = 0
/// and psi = -rho/(2(1 - rho^2)).
double second_order_density_residual(double rho, double t, double x, double y);

}  // namespace spex
