#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "spex/asymptotics.hpp"
#include "spex/error.hpp"
#include "spex/margins.hpp"

using namespace spex;

namespace {

StudyConfig small_study() {
    StudyConfig s;
    s.n = 10;
    s.days = 400;
    s.days_per_year = 100;
    s.replications = 4;
    s.mc_panels = 40;
    s.exceedance_grid = {200, 400, 800};
    s.threads = 1;
    return s;
}

}  // namespace

TEST_CASE("study validation") {
    auto s = small_study();
    CHECK_NOTHROW(s.validate());
    s.exceedance_grid = {400, 200};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_study();
    s.exceedance_grid = {4000};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_study();
    s.replications = 1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("Monte Carlo Hessian at the model (i) truth") {
    StudyConfig s;
    s.mc_panels = 200;
    s.threads = 1;
    const auto H = mc_hessian(s.theta0, s, 1000);
    CHECK((H.H - H.H.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(H.positive_definite);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(H.H).eigenvalues().minCoeff() > 0);
    CHECK(H.panels == 200);
    // Standard error of the trace scales as 1/sqrt(m).
    s.mc_panels = 50;
    const auto H50 = mc_hessian(s.theta0, s, 1000);
    const double ratio = H50.trace_se / H.trace_se;
    INFO("trace se ratio " << ratio);
    CHECK(ratio > 2 * 0.7);
    CHECK(ratio < 2 * 1.3);
}

TEST_CASE("score moments") {
    auto s = small_study();
    s.mc_panels = 100;
    const auto m = mc_score_moments(s.theta0, s, 400);
    CHECK((m.cov - m.cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m.cov).eigenvalues().minCoeff() >= -1e-10 * m.cov.norm());
    for (int k = 0; k < 3; ++k) CHECK(std::abs(m.mean[k]) < 3 * m.mean_se[k]);
    // mean_se is sd/sqrt(m): quadrupling m halves it.
    s.mc_panels = 400;
    const auto m4 = mc_score_moments(s.theta0, s, 400);
    for (int k = 0; k < 3; ++k) {
        const double ratio = m.mean_se[k] / m4.mean_se[k];
        CHECK(ratio > 2 * 0.8);
        CHECK(ratio < 2 * 1.2);
    }
}

TEST_CASE("nearly uncensored score is centred and the bias vanishes") {
    auto s = small_study();
    s.n = 6;
    s.days = 200;
    s.mc_panels = 60;
    const std::size_t N = s.days * s.n - 1;
    s.exceedance_grid = {N};
    const auto theory = theoretical_bias_variance(s.theta0, s);
    REQUIRE(theory.size() == 1);
    const auto& t = theory[0];
    CHECK_FALSE(t.degenerate);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(t.score.mean[k]) < 3 * t.score.mean_se[k]);
        // Standard error of H^{-1} mean(score) is sqrt(var_k / m).
        CHECK(std::abs(t.bias[k]) < 3 * std::sqrt(t.variance[k] / s.mc_panels));
        CHECK(t.variance[k] > 0);
    }
}

TEST_CASE("theory curves, report identities and determinism") {
    auto s = small_study();
    const auto theory = theoretical_bias_variance(s.theta0, s);
    REQUIRE(theory.size() == 3);
    for (const auto& t : theory) {
        CHECK_FALSE(t.degenerate);
        for (int k = 0; k < 3; ++k) CHECK(t.variance[k] > 0);
    }
    const auto again = theoretical_bias_variance(s.theta0, s);
    for (std::size_t i = 0; i < theory.size(); ++i) {
        CHECK(theory[i].bias == again[i].bias);
        CHECK(theory[i].variance == again[i].variance);
    }
    auto threaded = s;
    threaded.threads = 3;
    const auto par = theoretical_bias_variance(s.theta0, threaded);
    for (std::size_t i = 0; i < theory.size(); ++i) CHECK(theory[i].bias == par[i].bias);

    const auto report = mse_sweep(s, theory);
    CHECK(report.rows.size() == 9);
    for (const auto& r : report.rows) {
        CHECK(r.mse == r.bias2 + r.variance);
        CHECK(r.bias2 == r.theoretical_bias * r.theoretical_bias);
        CHECK(r.mse >= r.variance);
        CHECK(std::isnan(r.empirical_bias));
    }
    CHECK(report.pooled_argmin_quantile == doctest::Approx(1.0 - double(report.pooled_argmin) / (s.days * s.n)));
}

TEST_CASE("injected truth gives zero empirical bias") {
    auto s = small_study();
    s.replications = 5;
    const Estimator truth = [&](std::size_t, const DailyPanel&, const CensoredComposite& c) {
        FitResult r;
        r.theta_hat = s.theta0;
        r.converged = true;
        r.u = c.u();
        return r;
    };
    const auto emp = empirical_bias(s.theta0, s, truth);
    REQUIRE(emp.size() == 3);
    for (const auto& e : emp) {
        CHECK(e.used == 5);
        CHECK(e.unconverged == 0);
        CHECK_FALSE(e.flagged);
        for (int k = 0; k < 3; ++k) {
            CHECK(e.bias[k] == 0.0);
            CHECK(e.ci_lo[k] == 0.0);
            CHECK(e.ci_hi[k] == 0.0);
        }
    }
}

TEST_CASE("unconverged fits are excluded and flagged") {
    auto s = small_study();
    s.replications = 5;
    const Estimator flaky = [&](std::size_t rep, const DailyPanel&, const CensoredComposite&) {
        FitResult r;
        r.theta_hat = {2.0 + 0.1 * double(rep), 0, 3};
        r.converged = rep >= 2;
        return r;
    };
    const auto emp = empirical_bias(s.theta0, s, flaky);
    for (const auto& e : emp) {
        CHECK(e.used == 3);
        CHECK(e.unconverged == 2);
        CHECK(e.flagged);
        CHECK(e.bias[0] == doctest::Approx(0.3));
        CHECK(e.ci_lo[0] <= e.bias[0]);
        CHECK(e.ci_hi[0] >= e.bias[0]);
    }
}

TEST_CASE("empirical bands shrink with the number of replications") {
    auto s = small_study();
    s.exceedance_grid = {400};
    // A fixed-law estimator isolates the band arithmetic from fitting noise.
    const Estimator noisy = [&](std::size_t rep, const DailyPanel& panel, const CensoredComposite&) {
        FitResult r;
        const double z = std_normal_quantile((rep + 0.5) / double(s.replications)) + 0 * panel.data(0, 0);
        r.theta_hat = {2 + 0.3 * z, 0.1 * z, 3 - 0.2 * z};
        r.converged = true;
        return r;
    };
    s.replications = 25;
    const auto small = empirical_bias(s.theta0, s, noisy);
    s.replications = 100;
    const auto large = empirical_bias(s.theta0, s, noisy);
    for (int k = 0; k < 3; ++k) {
        const double ratio = (small[0].ci_hi[k] - small[0].ci_lo[k]) / (large[0].ci_hi[k] - large[0].ci_lo[k]);
        CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
    }
}

TEST_CASE("extremal coefficient layers") {
    auto s = small_study();
    s.n = 20;
    const auto theory = std::vector<TheoryPoint>{{.N = 500, .bias = {0.1, 0.0, -0.1}}, {.N = 1000, .bias = {0.05, 0.0, 0.0}}};
    std::vector<EmpiricalPoint> emp(2);
    emp[0].N = 500;
    emp[0].mean_theta = {2.4, 0.1, 3.2};
    emp[0].used = emp[1].used = 10;
    emp[1].N = 1000;
    emp[1].mean_theta = {2.1, 0.0, 3.05};
    s.exceedance_grid = {500, 1000};
    const auto rows = extremal_coefficient_layers(s, theory, emp);
    CHECK(rows.size() == 100);
    for (const auto& r : rows) {
        for (double v : {r.theta_true, r.theta_theoretical, r.theta_fitted}) {
            CHECK(v >= 1.0);
            CHECK(v <= 2.0);
        }
        // Model (i) along the first axis: a = h / sqrt(alpha) = h / sqrt(2).
        CHECK(r.theta_true == doctest::Approx(2 * std_normal_cdf(r.h / (2 * std::sqrt(2.0)))).epsilon(1e-14));
        if (r.h == 0.0) {
            CHECK(r.theta_true == 1.0);
            CHECK(r.theta_theoretical == 1.0);
            CHECK(r.theta_fitted == 1.0);
        }
    }
    CHECK(rows.back().h == doctest::Approx(std::sqrt(40.0)));
    const auto gaps = layer_max_gaps(rows);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[1] < gaps[0]);
}

TEST_CASE("single-pair likelihood satisfies the information identity") {
    auto s = small_study();
    s.layout = layout_from_sites({{0.0, 0.0}, {0.6, 0.35}}, 1.0);
    s.days = 20;
    s.days_per_year = 1;
    const auto design = make_design(s);
    REQUIRE(design.pairs.weighted_count() == 1);
    // Threshold far below the data: every pair-day is a joint density term.
    const double u = 1e-3;
    const std::size_t m = 10000;
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero(), V = Eigen::Matrix3d::Zero();
    for (std::size_t r = 0; r < m; ++r) {
        const auto panel = mc_panel(s, design.layout, r);
        const CensoredComposite c(panel, design.pairs, u);
        REQUIRE(c.case_counts()[3] == s.days);
        const Vec3 g = c.score_analytic(s.theta0);
        const Eigen::Vector3d d(g[0], g[1], g[2]);
        H -= composite_hessian(c, s.theta0);
        V += d * d.transpose();
    }
    H /= double(m);
    V /= double(m);
    INFO("H\n" << H << "\nV\n" << V);
    CHECK((H - V).norm() / H.norm() < 0.1);
}
