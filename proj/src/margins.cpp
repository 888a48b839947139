#include "spex/margins.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "spex/error.hpp"

namespace spex {

namespace {

constexpr double kNormalSaturation = 8.0;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": argument must be finite");
}

}  // namespace

void GevParams::validate() const {
    if (!std::isfinite(mu) || !std::isfinite(xi) || !(sigma > 0.0) || !std::isfinite(sigma))
        throw ParameterError("GEV parameters require finite mu, xi and sigma > 0");
}

void GpdParams::validate() const {
    if (!std::isfinite(xi) || !(sigma_u > 0.0) || !std::isfinite(sigma_u))
        throw ParameterError("GPD parameters require finite xi and sigma_u > 0");
}

double gev_cdf(double x, const GevParams& p) {
    p.validate();
    require_finite(x, "gev_cdf");
    const double z = (x - p.mu) / p.sigma;
    if (std::abs(p.xi) < kShapeLimitSwitch) return std::exp(-std::exp(-z));
    const double t = 1.0 + p.xi * z;
    if (t <= 0.0) return p.xi > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::exp(-std::log(t) / p.xi));
}

double unit_frechet_cdf(double z) {
    if (std::isnan(z)) throw DomainError("unit_frechet_cdf: NaN argument");
    return z > 0.0 ? std::exp(-1.0 / z) : 0.0;
}

double frechet_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("frechet_quantile: p must lie in (0,1)");
    return -1.0 / std::log(p);
}

double gpd_cdf(double y, const GpdParams& p) {
    p.validate();
    if (std::isnan(y) || y < 0.0) throw DomainError("gpd_cdf: y must be >= 0");
    if (std::isinf(y)) return 1.0;
    const double z = y / p.sigma_u;
    if (std::abs(p.xi) < kShapeLimitSwitch) return -std::expm1(-z);
    const double t = p.xi * z;
    if (t <= -1.0) return 1.0;  // beyond the upper endpoint for xi < 0
    return -std::expm1(-std::log1p(t) / p.xi);
}

double std_normal_cdf(double x) {
    if (std::isnan(x)) throw DomainError("std_normal_cdf: NaN argument");
    if (x > kNormalSaturation) return 1.0;
    if (x < -kNormalSaturation) return 0.0;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_cdf_unclamped(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_pdf(double x) {
    constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_sf(double x) {
    if (std::isnan(x)) throw DomainError("std_normal_sf: NaN argument");
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double std_normal_log_cdf(double x) {
    if (std::isnan(x)) throw DomainError("std_normal_log_cdf: NaN argument");
    if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
    if (x > -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
    // Mills-ratio asymptotic series; the first omitted term is below 1e-13 relative here.
    const double r = 1.0 / (x * x);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r))));
    return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0,1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double gumbel_from_frechet(double z) {
    if (!(z > 0.0)) throw DomainError("gumbel_from_frechet: z must be > 0");
    return std::log(z);
}

}  // namespace spex
