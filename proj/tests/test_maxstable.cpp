#include <doctest.h>

#include <cmath>
#include <vector>

#include "spex/error.hpp"
#include "spex/margins.hpp"
#include "spex/maxstable.hpp"
#include "spex/rng.hpp"
#include "spex/verify.hpp"

using namespace spex;

namespace {

double smith_v(double y1, double y2, double a) { return -std::log(smith_cdf(y1, y2, {a})); }

}  // namespace

TEST_CASE("mahalanobis separation") {
    CHECK(mahalanobis_a(Vec2{3.0, 4.0}, SmithParams{1, 0, 1}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(mahalanobis_a(Vec2{1.5, -2.0}, Vec2{1.5, -2.0}, SmithParams{2, 0.5, 1}).a == 0.0);
    CHECK(mahalanobis_a(Vec2{1.0, 1.0}, SmithParams{2, 0, 3}) ==
          doctest::Approx(0.912870929175276856).epsilon(1e-14));
    CHECK_THROWS_AS(mahalanobis_a(Vec2{1.0, 0.0}, SmithParams{1, 1, 1}), ParameterError);
    CHECK_THROWS_AS(mahalanobis_a(Vec2{1.0, 0.0}, SmithParams{-1, 0, 1}), ParameterError);
}

TEST_CASE("smith distribution function") {
    CHECK(smith_cdf(1, 1, {50.0}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(smith_cdf(1, 1, {INFINITY}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(smith_cdf(2, 3, {0.0}) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(smith_cdf(1, 1, {1.0}) == doctest::Approx(0.250843780377747006).epsilon(1e-14));
    // One argument to infinity leaves the unit Frechet margin.
    CHECK(smith_cdf(2.0, 1e300, {1.3}) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK_THROWS_AS(smith_cdf(0.0, 1.0, {1.0}), DomainError);
    CHECK_THROWS_AS(smith_cdf(1.0, 1.0, {-1.0}), ParameterError);
}

TEST_CASE("smith exponent measure") {
    const auto e = smith_exponent(1, 1, 1);
    CHECK(e.v == doctest::Approx(1.38292492254802621).epsilon(1e-14));
    CHECK(smith_exponent(2, 2, 1).v == doctest::Approx(e.v / 2).epsilon(1e-15));
    const double h = 1e-5;
    const double fd = (smith_exponent(1 + h, 1, 1).v - smith_exponent(1 - h, 1, 1).v) / (2 * h);
    CHECK(e.v1 == doctest::Approx(fd).epsilon(1e-6));
    CHECK_THROWS_AS(smith_exponent(1, 1, 0.0), DegenerateError);
    CHECK_THROWS_AS(smith_exponent(1, 1, INFINITY), ParameterError);
}

TEST_CASE("exponent measure is homogeneous of order -1") {
    for (double a : {0.3, 1.0, 2.5})
        for (double y1 : {0.4, 1.0, 7.0})
            for (double y2 : {0.9, 3.0})
                for (double c : {0.5, 2.0, 10.0}) {
                    const double lhs = smith_exponent(c * y1, c * y2, a).v * c;
                    CHECK(std::abs(lhs - smith_exponent(y1, y2, a).v) < 1e-12);
                }
}

TEST_CASE("density from partials matches the mixed difference of the cdf") {
    for (double a : {0.5, 1.0, 2.0})
        for (double y1 : {0.5, 1.0, 3.0})
            for (double y2 : {0.7, 2.0, 5.0}) {
                const auto e = smith_exponent(y1, y2, a);
                const double density = std::exp(-e.v) * (e.v1 * e.v2 - e.v12);
                auto F = [&](double p, double q) { return smith_cdf(p, q, {a}); };
                auto mixed = [&](double s) {
                    const double hx = s * y1, hy = s * y2;
                    return (F(y1 + hx, y2 + hy) - F(y1 + hx, y2 - hy) - F(y1 - hx, y2 + hy) +
                            F(y1 - hx, y2 - hy)) /
                           (4 * hx * hy);
                };
                const double richardson = (4 * mixed(5e-4) - mixed(1e-3)) / 3;
                CHECK(richardson == doctest::Approx(density).epsilon(1e-5));
            }
}

TEST_CASE("analytic exponent partials pass the finite-difference gate") {
    const auto rows = exponent_partial_checks();
    CHECK(rows.size() == 5 * 5 * 3 * 3);
    for (const auto& r : rows) {
        INFO(r.name);
        CHECK(r.pass);
    }
}

TEST_CASE("schlather and brown-resnick") {
    CHECK(schlather_cdf(2, 2, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(schlather_cdf(2, 3, -1.0) == doctest::Approx(std::exp(-0.5 - 1.0 / 3)).epsilon(1e-14));
    CHECK(schlather_cdf(1, 1, 0.0) == doctest::Approx(0.181389834649615164).epsilon(1e-14));
    CHECK_THROWS_AS(schlather_cdf(1, 1, 1.5), ParameterError);
    CHECK(br_cdf(1, 2, 1e4) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
    CHECK(br_cdf(1, 1, 4.0) == doctest::Approx(0.185873398148184400).epsilon(1e-14));
    CHECK_THROWS_AS(br_cdf(1, 1, 0.0), ParameterError);
    for (double g : {0.1, 1.0, 3.7})
        for (double y1 : {0.5, 2.0})
            for (double y2 : {0.8, 6.0})
                CHECK(br_cdf(y1, y2, g) == doctest::Approx(smith_cdf(y1, y2, {std::sqrt(g)})).epsilon(1e-14));
}

TEST_CASE("bivariate laws are exchangeable and respect the Frechet bounds") {
    for (double y1 : {0.3, 1.0, 4.0})
        for (double y2 : {0.5, 2.0, 9.0}) {
            const double lower = std::exp(-1 / y1 - 1 / y2);
            const double upper = std::exp(-std::max(1 / y1, 1 / y2));
            for (double a : {0.0, 0.4, 1.7, 6.0}) {
                const double f = smith_cdf(y1, y2, {a});
                CHECK(f == doctest::Approx(smith_cdf(y2, y1, {a})).epsilon(1e-14));
                CHECK(f >= lower * (1 - 1e-14));
                CHECK(f <= upper * (1 + 1e-14));
            }
            for (double rho : {-1.0, -0.3, 0.5, 1.0}) {
                const double f = schlather_cdf(y1, y2, rho);
                CHECK(f == doctest::Approx(schlather_cdf(y2, y1, rho)).epsilon(1e-14));
                CHECK(f >= lower * (1 - 1e-14));
                CHECK(f <= upper * (1 + 1e-14));
            }
            for (double g : {0.05, 1.0, 20.0}) {
                const double f = br_cdf(y1, y2, g);
                CHECK(f == doctest::Approx(br_cdf(y2, y1, g)).epsilon(1e-14));
                CHECK(f >= lower * (1 - 1e-14));
                CHECK(f <= upper * (1 + 1e-14));
            }
        }
}

TEST_CASE("extremal coefficients") {
    CHECK(extremal_coefficient(SmithParams{2, 0, 3}, Vec2{0, 0}) == 1.0);
    CHECK(smith_extremal_coefficient(1.0) == doctest::Approx(1.38292492254802621).epsilon(1e-14));
    CHECK(schlather_extremal_coefficient(0.0) == doctest::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-15));
    CHECK(br_extremal_coefficient(4.0) == doctest::Approx(2 * std_normal_cdf(1.0)).epsilon(1e-15));
    // theta = V(1,1) for every model.
    CHECK(smith_extremal_coefficient(0.8) == doctest::Approx(smith_v(1, 1, 0.8)).epsilon(1e-13));
    const DependenceModel sch = SchlatherModel{{2.0, 1.0}};
    const DependenceModel br = BrownResnickModel{{1.5, 1.2}};
    for (double h : {0.0, 0.5, 2.0, 10.0}) {
        for (const auto* m : {&sch, &br}) {
            const double t = extremal_coefficient(*m, Vec2{h * 0.6, h * 0.8});
            CHECK(t >= 1.0);
            CHECK(t <= 2.0);
        }
    }
}

TEST_CASE("naive extremal estimator") {
    const std::vector<double> one{1.0};
    CHECK(naive_extremal_estimator(one, one) == 1.0);
    Rng rng(5);
    std::vector<double> same(100000), y1(100000), y2(100000);
    for (double& v : same) v = frechet_quantile(1e-12 + (1 - 2e-12) * rng.uniform());
    // 1/Y is standard exponential, so sd(theta_hat) ~ 1/sqrt(m) around 1.
    CHECK(std::abs(naive_extremal_estimator(same, same) - 1.0) < 3 / std::sqrt(1e5));
    for (std::size_t i = 0; i < y1.size(); ++i) {
        y1[i] = frechet_quantile(1e-12 + (1 - 2e-12) * rng.uniform());
        y2[i] = frechet_quantile(1e-12 + (1 - 2e-12) * rng.uniform());
    }
    // 1/max(Y1,Y2) is exponential with rate 2 under independence, so sd(theta_hat) ~ 2/sqrt(m).
    CHECK(std::abs(naive_extremal_estimator(y1, y2) - 2.0) < 3 * 2 / std::sqrt(1e5));
    const std::vector<double> bad{1.0, -1.0};
    CHECK_THROWS_AS(naive_extremal_estimator(bad, bad), DataError);
}

TEST_CASE("brown-resnick gumbel-margin derivatives") {
    CHECK(br_k2(0.0, 1.0) == doctest::Approx(0.625).epsilon(1e-15));
    // x = y reduction: B = -2 e^{-x} Phi(sqrt(g)/2), dB/dg = -e^{-x} phi(sqrt(g)/2) / (2 sqrt(g)).
    for (double x : {-0.5, 0.0, 1.2})
        for (double g : {0.3, 1.0, 2.2}) {
            const double dg = 0.7;
            const auto d = br_gumbel_derivs(x, x, g, dg, 100.0);
            CHECK(d.B == doctest::Approx(-2 * std::exp(-x) * std_normal_cdf(std::sqrt(g) / 2)).epsilon(1e-14));
            const double expect =
                dg * (-std::exp(-x) * std_normal_pdf(std::sqrt(g) / 2) / (2 * std::sqrt(g)));
            CHECK(d.B_theta == doctest::Approx(expect).epsilon(1e-13));
        }
    const auto d = br_gumbel_derivs(0, 0, 1, 1, 1);
    const double h = 1e-5;
    const double fd =
        (br_gumbel_derivs(h, 0, 1, 1, 1).B - br_gumbel_derivs(-h, 0, 1, 1, 1).B) / (2 * h);
    CHECK(d.B_x == doctest::Approx(fd).epsilon(1e-6));
    CHECK_THROWS_AS(br_gumbel_derivs(0, 0, 0.0, 1, 1), ParameterError);
}

TEST_CASE("brown-resnick derivative gate") {
    const auto rows = br_derivative_checks();
    CHECK(rows.size() == 3 * 4 * 4 * 9);
    for (const auto& r : rows) {
        INFO(r.name);
        CHECK(r.pass);
    }
}
