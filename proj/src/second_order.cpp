#include "spex/second_order.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "spex/bvn.hpp"
#include "spex/error.hpp"
#include "spex/margins.hpp"

namespace spex {

namespace {

constexpr double kDenominatorFloor = 1e-300;

/// 1 - F(x, y) for the standard bivariate normal.
double joint_survival_complement(double x, double y, double rho) {
    return std_normal_sf(x) + std_normal_sf(y) - bvn_upper(x, y, rho);
}

}  // namespace

NormalizingConstants normalizing_constants(double t) {
    if (!(t > std::numbers::e)) throw DomainError("normalizing_constants: t must exceed e");
    const double L = std::log(t);
    const double s = std::sqrt(2.0 * L);
    return {1.0 / s, s - 0.5 * (std::log(L) + std::log(4.0 * std::numbers::pi)) / s};
}

double second_order_rate(double t) {
    if (!(t > 1.0)) throw DomainError("second_order_rate: t must exceed 1");
    return 1.0 / (2.0 * std::log(t));
}

double second_order_psi(double x, double y, double rho) {
    return std::exp(-(x + y) / (1.0 + rho)) + std::exp(-x) + std::exp(-y);
}

std::vector<Vec2> default_second_order_grid() {
    std::vector<Vec2> grid;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) grid.push_back({0.5 * i, 0.5 * j});
    return grid;
}

double SecondOrderEval::mean_abs_deviation() const {
    double s = 0.0;
    for (const auto& p : points) s += std::abs(p.gap_over_A - p.psi);
    return points.empty() ? 0.0 : s / static_cast<double>(points.size());
}

double SecondOrderEval::mean_abs_deviation_normalized() const {
    double s = 0.0;
    for (const auto& p : points) s += std::abs(p.gap_over_A_normalized - p.psi);
    return points.empty() ? 0.0 : s / static_cast<double>(points.size());
}

SecondOrderEval second_order_gap(double rho, double t, std::span<const Vec2> grid) {
    if (!(std::abs(rho) < 1.0)) throw ParameterError("second_order_gap: |rho| must be < 1");
    SecondOrderEval eval;
    eval.rho = rho;
    eval.t = t;
    const auto nc = normalizing_constants(t);
    eval.a_t = nc.a_t;
    eval.b_t = nc.b_t;
    eval.A = second_order_rate(t);
    const double denom = joint_survival_complement(nc.b_t, nc.b_t, rho);
    eval.denominator_underflow = !(denom >= kDenominatorFloor);
    for (const auto& g : grid) {
        SecondOrderPoint p;
        p.x = g[0];
        p.y = g[1];
        p.psi = second_order_psi(p.x, p.y, rho);
        if (eval.denominator_underflow) {
            p.gap_over_A = p.gap_over_A_normalized = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double ratio =
                joint_survival_complement(nc.a_t * p.x + nc.b_t, nc.a_t * p.y + nc.b_t, rho) / denom;
            const double tails = std::exp(-p.x) + std::exp(-p.y);
            // F_{b_t,d_t} - H = (1 - ratio) - (1 - tails/k) for normalization k.
            p.gap_over_A = (tails - ratio) / eval.A;
            p.gap_over_A_normalized = (0.5 * tails - ratio) / eval.A;
        }
        eval.points.push_back(p);
    }
    return eval;
}

double second_order_density_residual(double rho, double t, double x, double y) {
    if (!(std::abs(rho) < 1.0)) throw ParameterError("density residual: |rho| must be < 1");
    const auto nc = normalizing_constants(t);
    const double denom = joint_survival_complement(nc.b_t, nc.b_t, rho);
    if (!(denom >= kDenominatorFloor))
        throw DegenerateError("density residual: 1 - F(b_t, b_t) underflows");
    const double X = nc.a_t * x + nc.b_t;
    const double Y = nc.a_t * y + nc.b_t;
    const double q = (X * X + Y * Y - 2.0 * rho * X * Y) / (2.0 * (1.0 - rho * rho));
    const double density =
        std::exp(-q) / (2.0 * std::numbers::pi * std::sqrt(1.0 - rho * rho));
    const double f = nc.a_t * nc.a_t * density / denom;
    const double psi = -rho / (2.0 * (1.0 - rho * rho));
    return f / second_order_rate(t) - psi;
}

}  // namespace spex
