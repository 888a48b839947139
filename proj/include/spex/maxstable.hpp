#pragma once

// Bivariate max-stable dependence models on unit Frechet margins: Smith
// (Gaussian extreme value), Schlather and Brown-Resnick distribution
// functions, the Smith exponent measure with analytic partials, extremal
// coefficients, and Brown-Resnick derivatives on Gumbel margins.

#include <cstddef>
#include <span>
#include <variant>

#include "spex/numeric.hpp"

namespace spex {

/// Covariance matrix Sigma = [[alpha, beta], [beta, gamma]] of the Smith storm profile.
struct SmithParams {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 1.0;

    double determinant() const { return alpha * gamma - beta * beta; }
    bool positive_definite() const;
    /// Throws ParameterError unless positive definite.
    void validate() const;
    /// Largest eigenvalue of Sigma.
    double max_eigenvalue() const;

    Vec3 as_vector() const { return {alpha, beta, gamma}; }
    static SmithParams from_vector(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

/// Mahalanobis separation of a station pair under Sigma.
struct PairDependence {
    double a = 0.0;
};

/// V(y1,y2) with first and mixed partial derivatives.
struct ExponentMeasureEval {
    double v = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double v12 = 0.0;
};

/// a = sqrt(d' Sigma^{-1} d) for d = s1 - s2.
PairDependence mahalanobis_a(const Vec2& s1, const Vec2& s2, const SmithParams& p);
double mahalanobis_a(const Vec2& offset, const SmithParams& p);

/// Smith bivariate distribution function. a = 0 is complete dependence and
/// a = +inf independence; both are handled as exact branches.
double smith_cdf(double y1, double y2, PairDependence dep);

/// Smith exponent measure and its analytic partials. Requires 0 < a < inf.
/// Uses the identity phi(w)/y1 = phi(a-w)/y2, which gives
///   v1 = -Phi(w)/y1^2, v2 = -Phi(a-w)/y2^2, v12 = -phi(w)/(a y1^2 y2),
/// with w = a/2 + log(y2/y1)/a.
ExponentMeasureEval smith_exponent(double y1, double y2, double a);

/// Schlather bivariate distribution function, rho in [-1, 1].
double schlather_cdf(double y1, double y2, double rho);

/// Brown-Resnick bivariate distribution function for variogram value gamma_h > 0.
double br_cdf(double y1, double y2, double gamma_h);

/// Powered-exponential correlation rho(h) = exp(-(h/range)^smooth) for the Schlather model.
struct PoweredExponentialCorrelation {
    double range = 1.0;
    double smooth = 1.0;
    double operator()(double h) const;
};

/// Power variogram gamma(h) = (h/range)^smooth for the Brown-Resnick model.
struct PowerVariogram {
    double range = 1.0;
    double smooth = 1.0;
    double operator()(double h) const;
    double d_range(double h) const;
    double d_smooth(double h) const;
};

struct SchlatherModel {
    PoweredExponentialCorrelation correlation;
};

struct BrownResnickModel {
    PowerVariogram variogram;
};

using DependenceModel = std::variant<SmithParams, SchlatherModel, BrownResnickModel>;

double smith_extremal_coefficient(double a);
double schlather_extremal_coefficient(double rho);
double br_extremal_coefficient(double gamma_h);

/// Pairwise extremal coefficient theta(h) in [1, 2] at separation vector h.
/// Schlather and Brown-Resnick use the Euclidean length of h.
double extremal_coefficient(const DependenceModel& model, const Vec2& h);

/// Smith's naive estimator m / sum_t 1/max(y_t, y'_t) on unit Frechet data.
double naive_extremal_estimator(std::span<const double> y1, std::span<const double> y2);

/// Brown-Resnick derivative set on Gumbel margins (x = log y1, y = log y2):
///   B = -e^{-x} Phi(a) - e^{-y} Phi(b),  a = sqrt(g)/2 + (y-x)/sqrt(g),
///   b = sqrt(g)/2 + (x-y)/sqrt(g), g = gamma(h; theta),
/// with J = B_xy/M + B_x B_y/M^2 and theta derivatives via dgamma/dtheta.
struct BrDerivSet {
    double B = 0.0;
    double B_x = 0.0;
    double B_y = 0.0;
    double B_xy = 0.0;
    double B_theta = 0.0;
    double B_x_theta = 0.0;
    double B_y_theta = 0.0;
    double B_xy_theta = 0.0;
    double J = 0.0;
    double J_theta = 0.0;
    double gamma_h = 0.0;
    /// k1(y-x), k2(x-y), k3(y-x) and their mirrored arguments.
    double k1_yx = 0.0, k1_xy = 0.0;
    double k2_yx = 0.0, k2_xy = 0.0;
    double k3_yx = 0.0, k3_xy = 0.0;
    /// Score of the daily log-density: B_theta/M + J_theta/J.
    double score() const { return B_theta / days_per_year + J_theta / J; }
    double days_per_year = 1.0;
};

double br_k1(double d, double gamma_h);
double br_k2(double d, double gamma_h);
double br_k3(double d, double gamma_h);

BrDerivSet br_gumbel_derivs(double x, double y, double gamma_h, double dgamma_dtheta,
                            double days_per_year);

}  // namespace spex
