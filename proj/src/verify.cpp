#include "spex/verify.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "spex/bvn.hpp"
#include "spex/error.hpp"
#include "spex/margins.hpp"
#include "spex/maxstable.hpp"
#include "spex/second_order.hpp"

namespace spex {

namespace {

/// Relative error with an absolute floor so that near-zero references do not
/// turn roundoff into large relative errors.
double rel_err(double value, double reference, double floor = 1e-8) {
    return std::abs(value - reference) / std::max(std::abs(reference), floor);
}

CheckRow absolute(const std::string& suite, const std::string& name, double value, double reference,
                  double tolerance) {
    const double err = std::abs(value - reference);
    return {suite, name, value, reference, err, tolerance, err <= tolerance};
}

CheckRow relative(const std::string& suite, const std::string& name, double value, double reference,
                  double tolerance) {
    const double err = rel_err(value, reference);
    return {suite, name, value, reference, err, tolerance, err <= tolerance};
}

using Real = long double;

Real richardson_diff(const std::function<Real(Real)>& f, Real x, Real h) {
    auto d = [&](Real s) { return (f(x + s) - f(x - s)) / (2 * s); };
    return (4 * d(h / 2) - d(h)) / 3;
}

Real richardson_mixed(const std::function<Real(Real, Real)>& f, Real x, Real y, Real hx, Real hy) {
    auto d = [&](Real s) {
        const Real sx = s * hx;
        const Real sy = s * hy;
        return (f(x + sx, y + sy) - f(x + sx, y - sy) - f(x - sx, y + sy) + f(x - sx, y - sy)) /
               (4 * sx * sy);
    };
    return (4 * d(0.5L) - d(1)) / 3;
}

// Extended-precision reference implementations used as finite-difference oracles.

Real ref_cdf(Real x) { return 0.5L * std::erfc(-x / std::sqrt(2.0L)); }

Real ref_pdf(Real x) { return std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi_v<Real>); }

Real ref_smith_v(Real y1, Real y2, Real a) {
    const Real w = a / 2 + std::log(y2 / y1) / a;
    return ref_cdf(w) / y1 + ref_cdf(a - w) / y2;
}

struct RefB {
    Real B, Bx, By, Bxy;
};

RefB ref_br(Real x, Real y, Real g) {
    const Real sg = std::sqrt(g);
    const Real a = sg / 2 + (y - x) / sg;
    const Real b = sg / 2 + (x - y) / sg;
    const Real ex = std::exp(-x);
    const Real ey = std::exp(-y);
    RefB r;
    r.B = -ex * ref_cdf(a) - ey * ref_cdf(b);
    r.Bx = ex * ref_cdf(a) + ex * ref_pdf(a) / sg - ey * ref_pdf(b) / sg;
    r.By = ey * ref_cdf(b) + ey * ref_pdf(b) / sg - ex * ref_pdf(a) / sg;
    // d/dy of Bx: phi'(a) = -a phi(a), da/dy = 1/sg, db/dy = -1/sg.
    r.Bxy = ex * ref_pdf(a) / sg - ex * a * ref_pdf(a) / g + ey * ref_pdf(b) / sg -
            ey * b * ref_pdf(b) / g;
    return r;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<CheckRow> margins_suite() {
    const std::string s = "margins";
    std::vector<CheckRow> rows;
    rows.push_back(absolute(s, "gev_cdf(0;0,1,0)", gev_cdf(0.0, {0.0, 1.0, 0.0}), std::exp(-1.0), 1e-15));
    rows.push_back(absolute(s, "gev_cdf(1;0,1,0.5)", gev_cdf(1.0, {0.0, 1.0, 0.5}),
                            0.641180388429954582, 1e-14));
    rows.push_back(absolute(s, "gev_cdf below support", gev_cdf(-3.0, {0.0, 1.0, 0.5}), 0.0, 0.0));
    double worst = 0.0;
    for (double x = -3.0; x <= 10.0; x += 0.25)
        worst = std::max(worst, std::abs(gev_cdf(x, {0.0, 1.0, 1e-9}) - std::exp(-std::exp(-x))));
    rows.push_back({s, "gev xi->0 limit on [-3,10]", worst, 0.0, worst, 1e-7, worst < 1e-7});
    rows.push_back(absolute(s, "unit_frechet_cdf(1)", unit_frechet_cdf(1.0), std::exp(-1.0), 1e-15));
    rows.push_back(relative(s, "frechet_quantile(0.95)", frechet_quantile(0.95),
                            19.4957257462236893, 1e-13));
    rows.push_back(absolute(s, "frechet round trip at 7", frechet_quantile(unit_frechet_cdf(7.0)), 7.0,
                            1e-12));
    rows.push_back(absolute(s, "gpd_cdf(1;1,0)", gpd_cdf(1.0, {1.0, 0.0}), 1.0 - std::exp(-1.0), 1e-15));
    rows.push_back(absolute(s, "gpd_cdf(1;1,0.2)", gpd_cdf(1.0, {1.0, 0.2}), 0.598122427983539095,
                            1e-14));
    rows.push_back(absolute(s, "Phi(0)", std_normal_cdf(0.0), 0.5, 0.0));
    rows.push_back(absolute(s, "Phi(0.5)", std_normal_cdf(0.5), 0.691462461274013104, 1e-15));
    rows.push_back(absolute(s, "Phi(1.7)+Phi(-1.7)", std_normal_cdf(1.7) + std_normal_cdf(-1.7), 1.0,
                            2e-16));
    rows.push_back(absolute(s, "gumbel_from_frechet(e)", gumbel_from_frechet(std::numbers::e), 1.0,
                            1e-15));
    return rows;
}

std::vector<CheckRow> maxstable_suite() {
    const std::string s = "maxstable";
    std::vector<CheckRow> rows;
    rows.push_back(absolute(s, "a for Sigma=I, d=(3,4)", mahalanobis_a(Vec2{3.0, 4.0}, {1.0, 0.0, 1.0}),
                            5.0, 1e-14));
    rows.push_back(absolute(s, "a for Sigma=(2,0;0,3), d=(1,1)",
                            mahalanobis_a(Vec2{1.0, 1.0}, {2.0, 0.0, 3.0}), 0.912870929175276856, 1e-15));
    rows.push_back(absolute(s, "smith_cdf a=50", smith_cdf(1.0, 1.0, {50.0}), std::exp(-2.0), 1e-15));
    rows.push_back(absolute(s, "smith_cdf a=0", smith_cdf(2.0, 3.0, {0.0}), std::exp(-0.5), 1e-15));
    rows.push_back(absolute(s, "smith_cdf a=1", smith_cdf(1.0, 1.0, {1.0}), 0.250843780377747006, 1e-15));
    rows.push_back(absolute(s, "V(1,1;a=1)", smith_exponent(1.0, 1.0, 1.0).v, 1.38292492254802621, 1e-14));
    rows.push_back(absolute(s, "schlather_cdf rho=0", schlather_cdf(1.0, 1.0, 0.0),
                            0.181389834649615164, 1e-15));
    rows.push_back(absolute(s, "br_cdf gamma=4", br_cdf(1.0, 1.0, 4.0), 0.185873398148184400, 1e-15));
    rows.push_back(absolute(s, "smith extremal coefficient a=1", smith_extremal_coefficient(1.0),
                            1.38292492254802621, 1e-14));
    rows.push_back(absolute(s, "schlather extremal coefficient rho=0",
                            schlather_extremal_coefficient(0.0), 1.0 + std::sqrt(0.5), 1e-15));
    double worst = 0.0;
    for (double c : {0.5, 2.0, 10.0})
        for (double a : {0.5, 1.0, 2.0})
            for (auto [y1, y2] : {std::pair{1.0, 1.0}, {0.7, 3.0}, {5.0, 0.2}})
                worst = std::max(worst, std::abs(smith_exponent(c * y1, c * y2, a).v * c -
                                                 smith_exponent(y1, y2, a).v));
    rows.push_back({s, "homogeneity V(cy)c - V(y)", worst, 0.0, worst, 1e-12, worst <= 1e-12});
    const auto partials = exponent_partial_checks();
    rows.insert(rows.end(), partials.begin(), partials.end());
    return rows;
}

std::vector<CheckRow> appendix_a_suite() {
    const std::string s = "appendix-a";
    std::vector<CheckRow> rows;
    const auto nc = normalizing_constants(std::exp(8.0));
    rows.push_back(absolute(s, "a_t at t=e^8", nc.a_t, 0.25, 1e-15));
    rows.push_back(absolute(s, "b_t at t=e^8", nc.b_t, 3.42369177641885916, 1e-14));
    const auto big = normalizing_constants(1e16);
    const double ab = big.a_t * big.b_t;
    rows.push_back({s, "|a_t b_t - 1| at t=1e16", ab, 1.0, std::abs(ab - 1.0), 0.05,
                    std::abs(ab - 1.0) < 0.05});
    rows.push_back(absolute(s, "Psi(0,0;rho=0)", second_order_psi(0.0, 0.0, 0.0), 3.0, 0.0));
    rows.push_back(absolute(s, "bvn_cdf(0,0,0)", bvn_cdf(0.0, 0.0, 0.0), 0.25, 1e-15));
    rows.push_back(absolute(s, "bvn_cdf(0,0,0.5)", bvn_cdf(0.0, 0.0, 0.5), 1.0 / 3.0, 1e-10));
    rows.push_back(absolute(s, "bvn_cdf(0.7,inf,0.3)", bvn_cdf(0.7, INFINITY, 0.3), std_normal_cdf(0.7),
                            1e-15));
    const auto conv = second_order_convergence_checks();
    rows.insert(rows.end(), conv.begin(), conv.end());
    return rows;
}

std::vector<CheckRow> appendix_b_suite() {
    const std::string s = "appendix-b";
    std::vector<CheckRow> rows;
    rows.push_back(absolute(s, "k2(0) at gamma=1", br_k2(0.0, 1.0), 0.625, 1e-15));
    for (double g : {0.5, 1.0, 4.0}) {
        for (double x : {-1.0, 0.0, 1.5}) {
            const double sg = std::sqrt(g);
            const double expected = -std::exp(-x) * std_normal_pdf(0.5 * sg) / (2.0 * sg);
            const auto d = br_gumbel_derivs(x, x, g, 1.0, 100.0);
            rows.push_back(relative(s, "dB/dtheta at x=y=" + fmt(x) + " gamma=" + fmt(g), d.B_theta,
                                    expected, 1e-12));
        }
    }
    const auto fd = br_derivative_checks();
    rows.insert(rows.end(), fd.begin(), fd.end());
    return rows;
}

}  // namespace

std::vector<CheckRow> exponent_partial_checks(double tolerance) {
    const std::string s = "maxstable";
    std::vector<CheckRow> rows;
    const double ys[] = {0.5, 1.0, 2.0, 5.0, 10.0};
    for (double a : {0.5, 1.0, 2.0}) {
        for (double y1 : ys) {
            for (double y2 : ys) {
                const auto e = smith_exponent(y1, y2, a);
                const std::string at = "(" + fmt(y1) + "," + fmt(y2) + ";a=" + fmt(a) + ")";
                const Real A = a;
                const Real v1 = richardson_diff([&](Real t) { return ref_smith_v(t, y2, A); }, y1,
                                                1e-3L * y1);
                const Real v2 = richardson_diff([&](Real t) { return ref_smith_v(y1, t, A); }, y2,
                                                1e-3L * y2);
                const Real v12 = richardson_mixed(
                    [&](Real p, Real q) { return ref_smith_v(p, q, A); }, y1, y2, 1e-2L * y1,
                    1e-2L * y2);
                rows.push_back(relative(s, "v1" + at, e.v1, static_cast<double>(v1), tolerance));
                rows.push_back(relative(s, "v2" + at, e.v2, static_cast<double>(v2), tolerance));
                rows.push_back(relative(s, "v12" + at, e.v12, static_cast<double>(v12), tolerance));
            }
        }
    }
    return rows;
}

std::vector<CheckRow> br_derivative_checks(double tolerance) {
    const std::string s = "appendix-b";
    std::vector<CheckRow> rows;
    const double M = 100.0;
    const PowerVariogram variogram{1.5, 1.2};
    for (double h : {0.5, 1.5, 3.0}) {
        const double g = variogram(h);
        const double dg[2] = {variogram.d_range(h), variogram.d_smooth(h)};
        for (double x : {-1.0, 0.0, 0.5, 2.0}) {
            for (double y : {-1.0, 0.0, 0.5, 2.0}) {
                const std::string at = "(x=" + fmt(x) + ",y=" + fmt(y) + ",gamma=" + fmt(g) + ")";
                const auto d = br_gumbel_derivs(x, y, g, 1.0, M);
                const Real G = g;
                auto B = [&](Real p, Real q) { return ref_br(p, q, G).B; };
                auto check = [&](const std::string& name, double value, Real reference) {
                    rows.push_back(relative(s, name + at, value, static_cast<double>(reference), tolerance));
                };
                check("B_x", d.B_x, richardson_diff([&](Real p) { return B(p, y); }, x, 1e-3L));
                check("B_y", d.B_y, richardson_diff([&](Real q) { return B(x, q); }, y, 1e-3L));
                check("B_xy", d.B_xy,
                      richardson_diff([&](Real q) { return ref_br(x, q, G).Bx; }, y, 1e-3L));
                auto in_gamma = [&](auto field) {
                    return richardson_diff([&](Real gg) { return field(ref_br(x, y, gg)); }, G,
                                           1e-3L * G);
                };
                check("B_theta", d.B_theta, in_gamma([](const RefB& r) { return r.B; }));
                check("B_x_theta", d.B_x_theta, in_gamma([](const RefB& r) { return r.Bx; }));
                check("B_y_theta", d.B_y_theta, in_gamma([](const RefB& r) { return r.By; }));
                check("B_xy_theta", d.B_xy_theta, in_gamma([](const RefB& r) { return r.Bxy; }));
                const Real dJ_dgamma = in_gamma(
                    [&](const RefB& r) { return r.Bxy / M + r.Bx * r.By / (M * M); });
                for (int k = 0; k < 2; ++k) {
                    const auto dk = br_gumbel_derivs(x, y, g, dg[k], M);
                    check(k == 0 ? "J_range" : "J_smooth", dk.J_theta, dJ_dgamma * dg[k]);
                }
            }
        }
    }
    return rows;
}

std::vector<CheckRow> second_order_convergence_checks() {
    const std::string s = "appendix-a";
    std::vector<CheckRow> rows;
    const auto grid = default_second_order_grid();
    for (double rho : {0.0, 0.5}) {
        double previous = INFINITY;
        bool decreasing = true;
        for (double t : {1e4, 1e8, 1e16}) {
            const auto eval = second_order_gap(rho, t, grid);
            const double dev = eval.mean_abs_deviation();
            decreasing = decreasing && dev < previous;
            rows.push_back({s, "mean |gap/A - Psi| rho=" + fmt(rho) + " t=" + fmt(t), dev, 0.0, dev,
                            INFINITY, !eval.denominator_underflow});
            previous = dev;
        }
        rows.push_back({s, "mean |gap/A - Psi| strictly decreasing in t, rho=" + fmt(rho),
                        decreasing ? 1.0 : 0.0, 1.0, decreasing ? 0.0 : 1.0, 0.0, decreasing});
    }
    return rows;
}

bool all_pass(const std::vector<CheckRow>& rows) {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

std::vector<CheckRow> verify_suite(const std::string& suite) {
    if (suite == "margins") return margins_suite();
    if (suite == "maxstable") return maxstable_suite();
    if (suite == "appendix-a") return appendix_a_suite();
    if (suite == "appendix-b") return appendix_b_suite();
    throw ConfigError("unknown verify suite '" + suite + "'");
}

}  // namespace spex
