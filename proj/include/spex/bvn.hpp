#pragma once

// Standard bivariate normal probabilities (Genz's Gauss-Legendre method for
// the Drezner-Wesolowsky representation).

namespace spex {

/// P(X <= x, Y <= y) for standard normals with correlation rho, |rho| < 1.
/// Infinite arguments are allowed.
double bvn_cdf(double x, double y, double rho);

/// P(X > x, Y > y); keeps relative accuracy far into the upper tail for rho >= 0.
double bvn_upper(double x, double y, double rho);

}  // namespace spex
