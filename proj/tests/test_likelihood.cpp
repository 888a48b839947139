#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spex/error.hpp"
#include "spex/likelihood.hpp"
#include "spex/margins.hpp"

using namespace spex;

namespace {

struct Fixture {
    StationLayout layout = sample_stations(10, 2013);
    PairTable pairs = pair_weights(layout);
    DailyPanel panel = simulate_daily_panel(layout, {2, 0, 3}, 400, 100, 31);
    double u = threshold_for_count(panel, 200);
};

double frechet_log_density(double x) { return -2 * std::log(x) - 1 / x; }

}  // namespace

TEST_CASE("four-case pair contributions") {
    CHECK(classify_pair(1, 2, 1.5) == PairCase::SecondExceeds);
    CHECK(classify_pair(2, 1, 1.5) == PairCase::FirstExceeds);
    CHECK(classify_pair(1.5, 1.5, 1.5) == PairCase::BothBelow);
    CHECK(classify_pair(2, 3, 1.5) == PairCase::BothExceed);

    CHECK(pair_contribution(3, 4, 10, INFINITY).log_value == doctest::Approx(-0.2).epsilon(1e-15));
    const auto both = pair_contribution(12, 30, 10, INFINITY);
    CHECK(both.which == PairCase::BothExceed);
    CHECK(both.log_value == doctest::Approx(frechet_log_density(12) + frechet_log_density(30)).epsilon(1e-14));
    // Large but finite separation reaches the same factorized density.
    CHECK(pair_contribution(12, 30, 10, 200.0).log_value == doctest::Approx(both.log_value).epsilon(1e-12));

    const double u = 19.496;
    const auto one = pair_contribution(25, 3, u, 1.0);
    CHECK(one.which == PairCase::FirstExceeds);
    auto F = [&](double x) { return smith_cdf(x, u, {1.0}); };
    const double h = 1e-4 * 25;
    const double d1 = (F(25 + h) - F(25 - h)) / (2 * h), d2 = (F(25 + h / 2) - F(25 - h / 2)) / h;
    CHECK(std::exp(one.log_value) == doctest::Approx((4 * d2 - d1) / 3).epsilon(1e-5));
    const auto mirrored = pair_contribution(3, 25, u, 1.0);
    CHECK(mirrored.which == PairCase::SecondExceeds);
    CHECK(mirrored.log_value == doctest::Approx(one.log_value).epsilon(1e-14));

    CHECK(pair_contribution(2, 5, 1, 0.0).clamped);
    CHECK(pair_contribution(0.5, 0.7, 1, 0.0).log_value == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS(pair_contribution(-1, 1, 1, 1), DomainError);
}

TEST_CASE("single pair single day composite") {
    const auto layout = layout_from_sites({{0.0, 0.0}, {1000.0, 0.0}}, 1.0);
    const auto pairs = pair_weights(layout, 2000.0);
    DailyPanel panel;
    panel.data = Matrix{{2.0, 3.0}};
    const double u = 10.0;
    const CensoredComposite c(panel, pairs, u);
    CHECK(c.loglik({1, 0, 1}) == doctest::Approx(-2.0 / u).epsilon(1e-15));
    CHECK(c.case_counts()[0] == 1);
    CHECK_THROWS_AS(CensoredComposite(panel, pair_weights(layout), u), ConfigError);
}

TEST_CASE("case counts reconcile with direct threshold counting") {
    Fixture f;
    const CensoredComposite c(f.panel, f.pairs, f.u);
    std::array<std::size_t, 4> direct{};
    for (const auto& p : f.pairs.pairs) {
        if (p.weight == 0) continue;
        for (std::size_t t = 0; t < f.panel.days(); ++t)
            ++direct[static_cast<int>(classify_pair(f.panel.data(t, p.i), f.panel.data(t, p.j), f.u))];
    }
    CHECK(c.case_counts() == direct);
    CHECK(std::accumulate(direct.begin(), direct.end(), std::size_t{0}) ==
          f.pairs.weighted_count() * f.panel.days());
    CHECK(c.exceedances() == count_exceedances(f.panel, f.u));
}

TEST_CASE("raising the threshold never adds joint exceedances") {
    Fixture f;
    std::size_t prev = SIZE_MAX;
    for (std::size_t N = 3000; N >= 100; N -= 300) {
        const CensoredComposite c(f.panel, f.pairs, threshold_for_count(f.panel, N));
        CHECK(c.case_counts()[3] <= prev);
        prev = c.case_counts()[3];
    }
}

TEST_CASE("log-likelihood is linear in the weights") {
    Fixture f;
    auto doubled = f.pairs;
    for (auto& p : doubled.pairs) p.weight *= 2;
    const SmithParams theta{1.7, 0.2, 2.5};
    const double l1 = CensoredComposite(f.panel, f.pairs, f.u).loglik(theta);
    const double l2 = CensoredComposite(f.panel, doubled, f.u).loglik(theta);
    CHECK(l2 == doctest::Approx(2 * l1).epsilon(1e-14));
    CHECK(CensoredComposite(f.panel, f.pairs, f.u).loglik({1, 2, 1}) == -INFINITY);
}

TEST_CASE("configured evaluation agrees with the prepared composite") {
    Fixture f;
    CensoredConfig config;
    config.threshold = ThresholdSpec::exceedances(200);
    config.weights = &f.pairs;
    const SmithParams theta{2, 0, 3};
    const auto eval = composite_loglik(f.panel, config, theta);
    const CensoredComposite c(f.panel, f.pairs, f.u);
    CHECK(eval.loglik == c.loglik(theta));
    CHECK(eval.u == f.u);
    CHECK(eval.n_pairs_used == f.pairs.weighted_count());
    CHECK(eval.score == c.score_fd(theta));
    CHECK(composite_score(f.panel, config, theta) == eval.score);
    config.weights = nullptr;
    CHECK_THROWS_AS(composite_loglik(f.panel, config, theta), ConfigError);
}

TEST_CASE("finite-difference gradient is exact on quadratics") {
    auto q = [](const Vec3& x) {
        return 1.5 * x[0] * x[0] - 0.5 * x[0] * x[1] + 2 * x[1] * x[1] + 0.25 * x[2] * x[2] + x[0] - 3 * x[2] + 4;
    };
    const Vec3 x{0.7, -1.3, 2.2};
    const Vec3 g = fd_gradient(q, x);
    CHECK(std::abs(g[0] - (3 * x[0] - 0.5 * x[1] + 1)) < 1e-9);
    CHECK(std::abs(g[1] - (-0.5 * x[0] + 4 * x[1])) < 1e-9);
    CHECK(std::abs(g[2] - (0.5 * x[2] - 3)) < 1e-9);
    bool one_sided = false;
    auto valid = [](const Vec3& y) { return y[0] <= 0.7; };
    const Vec3 g1 = fd_gradient(q, x, valid, &one_sided);
    CHECK(one_sided);
    CHECK(std::abs(g1[0] - (3 * x[0] - 0.5 * x[1] + 1)) < 1e-5);
}

TEST_CASE("score agrees between finite differences and the analytic form") {
    Fixture f;
    const CensoredComposite c(f.panel, f.pairs, f.u);
    for (const SmithParams theta : {SmithParams{2, 0, 3}, SmithParams{1.2, -0.4, 2.0}, SmithParams{3, 1.5, 2}}) {
        const Vec3 fd = c.score_fd(theta), an = c.score_analytic(theta);
        const double scale = std::max({std::abs(an[0]), std::abs(an[1]), std::abs(an[2])});
        for (int k = 0; k < 3; ++k) CHECK(std::abs(fd[k] - an[k]) <= 1e-4 * scale);
    }
}

TEST_CASE("mahalanobis gradient matches finite differences") {
    const Vec2 h{1.3, -0.6};
    const SmithParams p{2, 0.7, 3};
    const Vec3 g = mahalanobis_gradient(h, p);
    const Vec3 fd = fd_gradient([&](const Vec3& v) { return mahalanobis_a(h, SmithParams::from_vector(v)); },
                                p.as_vector());
    for (int k = 0; k < 3; ++k) CHECK(g[k] == doctest::Approx(fd[k]).epsilon(1e-7));
}

TEST_CASE("log-likelihood increments match the score to second order") {
    Fixture f;
    const CensoredComposite c(f.panel, f.pairs, f.u);
    const SmithParams theta{2, 0.3, 3};
    const Vec3 s = c.score_analytic(theta);
    const double l0 = c.loglik(theta);
    for (const Vec3 dir : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}, Vec3{0.6, -0.3, 0.74}}) {
        double prev = INFINITY;
        for (double d : {1e-3, 1e-4}) {
            const SmithParams moved{theta.alpha + d * dir[0], theta.beta + d * dir[1], theta.gamma + d * dir[2]};
            const double lin = d * (s[0] * dir[0] + s[1] * dir[1] + s[2] * dir[2]);
            const double err = std::abs(c.loglik(moved) - l0 - lin);
            // Remainder is O(d^2): shrinking d tenfold shrinks it about a hundredfold.
            if (std::isfinite(prev)) CHECK(err < prev / 30);
            prev = err;
        }
    }
}

TEST_CASE("relabeling stations leaves likelihood and score unchanged") {
    Fixture f;
    const std::size_t n = f.layout.sites.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::rotate(perm.begin(), perm.begin() + 3, perm.end());
    StationLayout relabeled = f.layout;
    DailyPanel panel = f.panel;
    for (std::size_t k = 0; k < n; ++k) {
        relabeled.sites[perm[k]] = f.layout.sites[k];
        panel.data.col(perm[k]) = f.panel.data.col(k);
    }
    const auto pairs = pair_weights(relabeled);
    CHECK(pairs.weighted_count() == f.pairs.weighted_count());
    const SmithParams theta{1.8, 0.4, 2.6};
    const CensoredComposite a(f.panel, f.pairs, f.u), b(panel, pairs, f.u);
    CHECK(b.loglik(theta) == doctest::Approx(a.loglik(theta)).epsilon(1e-12));
    const Vec3 sa = a.score_fd(theta), sb = b.score_fd(theta);
    for (int k = 0; k < 3; ++k) CHECK(sb[k] == doctest::Approx(sa[k]).epsilon(1e-6));
}

TEST_CASE("score is centred at the true parameter") {
    const auto layout = sample_stations(20, 2013);
    const auto pairs = pair_weights(layout);
    const SmithParams theta0{2, 0, 3};
    for (std::size_t N : {1000, 15000}) {
        const std::size_t m = 100;
        std::vector<Vec3> scores(m);
        for (std::size_t r = 0; r < m; ++r) {
            const auto panel = simulate_daily_panel(layout, theta0, 1000, 100, derive_seed(77, N, r));
            scores[r] = CensoredComposite(panel, pairs, threshold_for_count(panel, N)).score_analytic(theta0);
        }
        for (int k = 0; k < 3; ++k) {
            double mean = 0, var = 0;
            for (const auto& s : scores) mean += s[k] / m;
            for (const auto& s : scores) var += (s[k] - mean) * (s[k] - mean) / (m - 1);
            INFO("N=" << N << " component " << k << " mean " << mean << " se " << std::sqrt(var / m));
            CHECK(std::abs(mean) < 3 * std::sqrt(var / m));
        }
    }
}
