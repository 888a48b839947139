#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spex/bvn.hpp"
#include "spex/error.hpp"
#include "spex/margins.hpp"
#include "spex/second_order.hpp"
#include "spex/verify.hpp"

using namespace spex;

TEST_CASE("normalizing constants") {
    const auto c = normalizing_constants(std::exp(8.0));
    CHECK(c.a_t == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(c.b_t == doctest::Approx(3.42369177641885916).epsilon(1e-14));
    const auto big = normalizing_constants(1e16);
    CHECK(std::abs(big.a_t * big.b_t - 1) < 0.05);
    CHECK(normalizing_constants(1e4).a_t > normalizing_constants(1e8).a_t);
    CHECK(normalizing_constants(1e8).a_t > big.a_t);
    CHECK_THROWS_AS(normalizing_constants(2.0), DomainError);
    CHECK(second_order_rate(1e4) == doctest::Approx(1 / (2 * std::log(1e4))));
}

TEST_CASE("bivariate normal distribution function") {
    CHECK(std::abs(bvn_cdf(0, 0, 0) - 0.25) < 1e-15);
    CHECK(std::abs(bvn_cdf(0, 0, 0.5) - 1.0 / 3.0) < 1e-12);
    for (double r : {-0.8, 0.0, 0.4, 0.99}) {
        for (double x : {-2.5, 0.3, 1.7}) {
            CHECK(std::abs(bvn_cdf(x, INFINITY, r) - std_normal_cdf(x)) < 1e-15);
            CHECK(std::abs(bvn_cdf(INFINITY, x, r) - std_normal_cdf(x)) < 1e-15);
            CHECK(bvn_cdf(-INFINITY, x, r) == 0.0);
        }
        // Closed form on the diagonal through the arcsine rule.
        CHECK(std::abs(bvn_cdf(0, 0, r) - (0.25 + std::asin(r) / (2 * std::numbers::pi))) < 1e-14);
    }
    struct Case {
        double x, y, r, p;
    };
    for (const auto& c : {Case{0.3, -1.2, 0.6, 0.10842550424680713645},
                          Case{1.5, 2.0, -0.4, 0.9105347696248427677},
                          Case{-2.0, -2.5, 0.95, 0.0059749297978707709843},
                          Case{0.7, 0.7, -0.9, 0.51611633782474306414},
                          Case{-3.0, 1.0, 0.3, 0.0013242002405483688701}}) {
        CHECK(std::abs(bvn_cdf(c.x, c.y, c.r) - c.p) < 1e-12);
        CHECK(std::abs(bvn_cdf(c.y, c.x, c.r) - c.p) < 1e-12);
    }
    CHECK_THROWS_AS(bvn_cdf(0, 0, 1.0), ParameterError);
}

TEST_CASE("second-order gap table") {
    CHECK(second_order_psi(0, 0, 0) == 3.0);
    const auto grid = default_second_order_grid();
    CHECK(grid.size() == 25);
    struct Row {
        double rho, t, literal, normalized;
    };
    // Mean |gap/A - Psi| over the grid from a 60-digit evaluation.
    for (const auto& row : {Row{0.0, 1e4, 7.2426965212210878, 1.3519346020500204},
                            Row{0.0, 1e8, 15.751634549450192, 1.4376276970920244},
                            Row{0.0, 1e16, 32.853511667929034, 1.5250128251553988},
                            Row{0.5, 1e4, 7.1017697059768041, 1.4928614172943041},
                            Row{0.5, 1e8, 15.639511668794537, 1.5497505777476791},
                            Row{0.5, 1e16, 32.743685954245191, 1.6348385388392417}}) {
        const auto e = second_order_gap(row.rho, row.t, grid);
        CHECK_FALSE(e.denominator_underflow);
        CHECK(e.A == doctest::Approx(1 / (2 * std::log(row.t))));
        CHECK(e.mean_abs_deviation() == doctest::Approx(row.literal).epsilon(1e-8));
        CHECK(e.mean_abs_deviation_normalized() == doctest::Approx(row.normalized).epsilon(1e-8));
    }
    CHECK(second_order_gap(0.0, 1e308, grid).denominator_underflow);
}

TEST_CASE("density residual stays under an integrable envelope") {
    // Envelope C phi(c1 (x + y) + c2) with constants fitted once on this grid and frozen.
    constexpr double C = 0.08, c1 = 0.25, c2 = 0.0;
    for (double rho : {0.0, 0.5})
        for (double t : {1e4, 1e8, 1e16})
            for (const auto& g : default_second_order_grid()) {
                const double scaled = second_order_rate(t) * second_order_density_residual(rho, t, g[0], g[1]);
                CHECK(std::abs(scaled) <= C * std_normal_pdf(c1 * (g[0] + g[1]) + c2));
            }
}

TEST_CASE("convergence rows of the verification suite") {
    const auto rows = second_order_convergence_checks();
    std::size_t monotone_rows = 0;
    for (const auto& r : rows)
        if (r.name.find("decreasing") != std::string::npos) ++monotone_rows;
    CHECK(monotone_rows == 2);
    // The literal table grows with t (see the frozen values above), so these rows report failure.
    for (const auto& r : rows)
        if (r.name.find("decreasing") != std::string::npos) CHECK_FALSE(r.pass);
}
