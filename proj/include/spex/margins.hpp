#pragma once

// Univariate extreme-value distributions and standard normal helpers.
// All functions are pure and thread-safe.

namespace spex {

/// Generalized extreme value parameters (location, scale, shape).
struct GevParams {
    double mu = 0.0;
    double sigma = 1.0;
    double xi = 0.0;

    /// Throws ParameterError unless sigma > 0 and all fields are finite.
    void validate() const;
};

/// Generalized Pareto parameters for exceedances over a threshold.
struct GpdParams {
    double sigma_u = 1.0;
    double xi = 0.0;

    void validate() const;
};

/// Shape values with |xi| below this use the exact xi -> 0 limit.
inline constexpr double kShapeLimitSwitch = 1e-8;

/// GEV distribution function. Below the lower endpoint (xi > 0) returns 0,
/// above the upper endpoint mu - sigma/xi (xi < 0) returns 1.
double gev_cdf(double x, const GevParams& p);

/// exp(-1/z) for z > 0, 0 otherwise.
double unit_frechet_cdf(double z);

/// Inverse of unit_frechet_cdf: -1/log(p), p in (0,1).
double frechet_quantile(double p);

/// Generalized Pareto distribution function for y >= 0.
double gpd_cdf(double y, const GpdParams& p);

/// Standard normal distribution function; exact 0/1 beyond |x| = 8.
double std_normal_cdf(double x);

/// Standard normal distribution function without tail saturation; used where
/// logarithms of far-tail probabilities are taken.
double std_normal_cdf_unclamped(double x);

/// Standard normal density.
double std_normal_pdf(double x);

/// Upper tail 1 - Phi(x) without saturation (relative accuracy in the far tail).
double std_normal_sf(double x);

/// log Phi(x), accurate far into the lower tail.
double std_normal_log_cdf(double x);

/// Inverse of the standard normal distribution function, p in (0,1).
double std_normal_quantile(double p);

/// log z: maps unit Frechet to standard Gumbel.
double gumbel_from_frechet(double z);

}  // namespace spex
