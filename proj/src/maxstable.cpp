#include "spex/maxstable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spex/error.hpp"
#include "spex/margins.hpp"

namespace spex {

namespace {

void require_positive(double y1, double y2, const char* what) {
    if (!(y1 > 0.0) || !(y2 > 0.0))
        throw DomainError(std::string(what) + ": arguments must be > 0");
}

}  // namespace

bool SmithParams::positive_definite() const {
    return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma) && alpha > 0.0 &&
           gamma > 0.0 && determinant() > 0.0;
}

void SmithParams::validate() const {
    if (!positive_definite())
        throw ParameterError("Smith covariance (alpha=" + std::to_string(alpha) +
                             ", beta=" + std::to_string(beta) + ", gamma=" +
                             std::to_string(gamma) + ") is not positive definite");
}

double SmithParams::max_eigenvalue() const {
    const double half_trace = 0.5 * (alpha + gamma);
    const double half_diff = 0.5 * (alpha - gamma);
    return half_trace + std::sqrt(half_diff * half_diff + beta * beta);
}

double mahalanobis_a(const Vec2& offset, const SmithParams& p) {
    p.validate();
    const double d1 = offset[0];
    const double d2 = offset[1];
    const double q = (p.gamma * d1 * d1 - 2.0 * p.beta * d1 * d2 + p.alpha * d2 * d2) /
                     p.determinant();
    return std::sqrt(std::max(q, 0.0));
}

PairDependence mahalanobis_a(const Vec2& s1, const Vec2& s2, const SmithParams& p) {
    return {mahalanobis_a(Vec2{s1[0] - s2[0], s1[1] - s2[1]}, p)};
}

double smith_cdf(double y1, double y2, PairDependence dep) {
    require_positive(y1, y2, "smith_cdf");
    const double a = dep.a;
    if (std::isnan(a) || a < 0.0) throw ParameterError("smith_cdf: a must be >= 0");
    if (a == 0.0) return std::exp(-std::max(1.0 / y1, 1.0 / y2));
    if (std::isinf(a)) return std::exp(-1.0 / y1 - 1.0 / y2);
    const double log_ratio = std::log(y2 / y1);
    const double w = 0.5 * a + log_ratio / a;
    const double v = 0.5 * a - log_ratio / a;
    return std::exp(-std_normal_cdf(w) / y1 - std_normal_cdf(v) / y2);
}

ExponentMeasureEval smith_exponent(double y1, double y2, double a) {
    require_positive(y1, y2, "smith_exponent");
    if (a == 0.0)
        throw DegenerateError("smith_exponent: a = 0 has no density; use the smith_cdf branch");
    if (!(a > 0.0) || !std::isfinite(a))
        throw ParameterError("smith_exponent: a must be finite and > 0");
    const double log_ratio = std::log(y2 / y1);
    const double w = 0.5 * a + log_ratio / a;
    const double v = a - w;
    const double cdf_w = std_normal_cdf_unclamped(w);
    const double cdf_v = std_normal_cdf_unclamped(v);
    const double inv1 = 1.0 / y1;
    const double inv2 = 1.0 / y2;
    ExponentMeasureEval out;
    out.v = cdf_w * inv1 + cdf_v * inv2;
    out.v1 = -cdf_w * inv1 * inv1;
    out.v2 = -cdf_v * inv2 * inv2;
    out.v12 = -std_normal_pdf(w) * inv1 * inv1 * inv2 / a;
    return out;
}

double schlather_cdf(double y1, double y2, double rho) {
    require_positive(y1, y2, "schlather_cdf");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw ParameterError("schlather_cdf: rho must lie in [-1, 1]");
    const double s = y1 + y2;
    const double inner = std::max(0.0, 1.0 - 2.0 * (rho + 1.0) * y1 * y2 / (s * s));
    return std::exp(-0.5 * (1.0 / y1 + 1.0 / y2) * (1.0 + std::sqrt(inner)));
}

double br_cdf(double y1, double y2, double gamma_h) {
    if (!(gamma_h > 0.0)) throw ParameterError("br_cdf: variogram value must be > 0");
    return smith_cdf(y1, y2, {std::sqrt(gamma_h)});
}

double PoweredExponentialCorrelation::operator()(double h) const {
    if (!(range > 0.0) || !(smooth > 0.0 && smooth <= 2.0))
        throw ParameterError("powered exponential correlation needs range > 0, smooth in (0,2]");
    return std::exp(-std::pow(std::abs(h) / range, smooth));
}

double PowerVariogram::operator()(double h) const {
    if (!(range > 0.0) || !(smooth > 0.0 && smooth <= 2.0))
        throw ParameterError("power variogram needs range > 0, smooth in (0,2]");
    return std::pow(std::abs(h) / range, smooth);
}

double PowerVariogram::d_range(double h) const { return -smooth / range * (*this)(h); }

double PowerVariogram::d_smooth(double h) const {
    const double g = (*this)(h);
    return g == 0.0 ? 0.0 : g * std::log(std::abs(h) / range);
}

double smith_extremal_coefficient(double a) {
    if (std::isnan(a) || a < 0.0) throw ParameterError("extremal coefficient: a must be >= 0");
    return 2.0 * std_normal_cdf(0.5 * a);
}

double schlather_extremal_coefficient(double rho) {
    if (!(rho >= -1.0 && rho <= 1.0))
        throw ParameterError("extremal coefficient: rho must lie in [-1, 1]");
    return 1.0 + std::sqrt(0.5 * (1.0 - rho));
}

double br_extremal_coefficient(double gamma_h) {
    if (std::isnan(gamma_h) || gamma_h < 0.0)
        throw ParameterError("extremal coefficient: variogram value must be >= 0");
    return 2.0 * std_normal_cdf(0.5 * std::sqrt(gamma_h));
}

double extremal_coefficient(const DependenceModel& model, const Vec2& h) {
    const double distance = std::hypot(h[0], h[1]);
    struct Visitor {
        const Vec2& h;
        double distance;
        double operator()(const SmithParams& p) const {
            return smith_extremal_coefficient(mahalanobis_a(h, p));
        }
        double operator()(const SchlatherModel& m) const {
            return schlather_extremal_coefficient(m.correlation(distance));
        }
        double operator()(const BrownResnickModel& m) const {
            return br_extremal_coefficient(m.variogram(distance));
        }
    };
    return std::visit(Visitor{h, distance}, model);
}

double naive_extremal_estimator(std::span<const double> y1, std::span<const double> y2) {
    if (y1.size() != y2.size()) throw DataError("naive_extremal_estimator: series lengths differ");
    if (y1.empty()) throw DataError("naive_extremal_estimator: need at least one observation");
    double sum = 0.0;
    for (std::size_t t = 0; t < y1.size(); ++t) {
        if (!(y1[t] > 0.0) || !(y2[t] > 0.0))
            throw DataError("naive_extremal_estimator: observations must be > 0");
        sum += 1.0 / std::max(y1[t], y2[t]);
    }
    return static_cast<double>(y1.size()) / sum;
}

double br_k1(double d, double g) {
    const double sg = std::sqrt(g);
    const double sg3 = g * sg;
    return 1.0 / (8.0 * sg) - 1.0 / (2.0 * sg3) - d / (2.0 * sg3) + d * d / (2.0 * g * sg3);
}

double br_k2(double d, double g) {
    const double sg = std::sqrt(g);
    const double sg3 = g * sg;
    return 1.0 / (8.0 * sg) + 1.0 / (2.0 * sg3) - d * d / (2.0 * g * sg3);
}

double br_k3(double d, double g) {
    const double sg = std::sqrt(g);
    const double sg3 = g * sg;
    return -1.0 / (16.0 * sg) - 1.0 / (4.0 * sg3) + (1.0 / (8.0 * sg3) + 3.0 / (2.0 * g * sg3)) * d +
           d * d / (4.0 * g * sg3) - d * d * d / (2.0 * g * g * sg3);
}

BrDerivSet br_gumbel_derivs(double x, double y, double gamma_h, double dgamma_dtheta,
                            double days_per_year) {
    if (!(gamma_h > 0.0) || !std::isfinite(gamma_h))
        throw ParameterError("br_gumbel_derivs: variogram value must be finite and > 0");
    if (!(days_per_year >= 1.0)) throw ParameterError("br_gumbel_derivs: M must be >= 1");
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(dgamma_dtheta))
        throw DomainError("br_gumbel_derivs: arguments must be finite");

    const double g = gamma_h;
    const double sg = std::sqrt(g);
    const double sg3 = g * sg;
    const double M = days_per_year;
    const double d_yx = y - x;
    const double d_xy = x - y;
    const double a = 0.5 * sg + d_yx / sg;
    const double b = 0.5 * sg + d_xy / sg;
    const double ex = std::exp(-x);
    const double ey = std::exp(-y);
    const double Pa = std_normal_cdf_unclamped(a);
    const double Pb = std_normal_cdf_unclamped(b);
    const double pa = std_normal_pdf(a);
    const double pb = std_normal_pdf(b);

    BrDerivSet out;
    out.gamma_h = g;
    out.days_per_year = M;
    out.k1_yx = br_k1(d_yx, g);
    out.k1_xy = br_k1(d_xy, g);
    out.k2_yx = br_k2(d_yx, g);
    out.k2_xy = br_k2(d_xy, g);
    out.k3_yx = br_k3(d_yx, g);
    out.k3_xy = br_k3(d_xy, g);

    out.B = -ex * Pa - ey * Pb;
    out.B_theta = dgamma_dtheta * (-ex * pa * (1.0 / (4.0 * sg) - d_yx / (2.0 * sg3)) -
                                   ey * pb * (1.0 / (4.0 * sg) - d_xy / (2.0 * sg3)));
    out.B_x = ex * Pa + ex * pa / sg - ey * pb / sg;
    out.B_y = ey * Pb + ey * pb / sg - ex * pa / sg;
    out.B_xy = ex * pa * (1.0 / (2.0 * sg) - d_yx / sg3) + ey * pb * (1.0 / (2.0 * sg) - d_xy / sg3);
    out.B_x_theta = dgamma_dtheta * (ex * pa * out.k1_yx + ey * pb * out.k2_xy);
    out.B_y_theta = dgamma_dtheta * (ey * pb * out.k1_xy + ex * pa * out.k2_yx);
    out.B_xy_theta = dgamma_dtheta * (ex * pa * out.k3_yx + ey * pb * out.k3_xy);

    out.J = out.B_xy / M + out.B_x * out.B_y / (M * M);
    // k-based form: dgamma/dtheta [ (1/M){...k3...} + (1/M^2){...k1,k2...} B_y + (1/M^2) B_x {...} ].
    const double bracket =
        (ex * pa * out.k3_yx + ey * pb * out.k3_xy) / M +
        (ex * pa * out.k1_yx + ey * pb * out.k2_xy) * (ey * (Pb + pb / sg) - ex * pa / sg) /
            (M * M) +
        (ey * pb * out.k1_xy + ex * pa * out.k2_yx) * (ex * (Pa + pa / sg) - ey * pb / sg) /
            (M * M);
    out.J_theta = dgamma_dtheta * bracket;
    return out;
}

}  // namespace spex
