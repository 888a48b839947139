#include "spex/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "spex/error.hpp"
#include "spex/parallel.hpp"

namespace spex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ95 = 1.959963984540054;

Eigen::Vector3d to_eigen(const Vec3& v) { return {v[0], v[1], v[2]}; }

struct MonteCarloSample {
    std::vector<std::vector<PanelDerivatives>> per_panel;  // [panel][grid index]
};

MonteCarloSample run_monte_carlo(const SmithParams& theta0, const StudyConfig& study,
                                 const std::vector<std::size_t>& grid) {
    const StudyDesign design = make_design(study);
    StudyConfig at_theta0 = study;
    at_theta0.theta0 = theta0;
    MonteCarloSample sample;
    sample.per_panel.resize(study.mc_panels);
    parallel_for(study.mc_panels, study.threads, [&](std::size_t m) {
        const DailyPanel panel = mc_panel(at_theta0, design.layout, m);
        auto& out = sample.per_panel[m];
        out.reserve(grid.size());
        for (std::size_t N : grid) out.push_back(panel_derivatives(panel, design.pairs, theta0, N));
    });
    return sample;
}

HessianEstimate summarize_hessian(const MonteCarloSample& sample, std::size_t k) {
    HessianEstimate est;
    const std::size_t m = sample.per_panel.size();
    est.panels = m;
    std::vector<double> traces(m);
    for (std::size_t i = 0; i < m; ++i) {
        est.H += sample.per_panel[i][k].neg_hessian;
        traces[i] = sample.per_panel[i][k].neg_hessian.trace();
    }
    est.H /= static_cast<double>(m);
    est.H = 0.5 * (est.H + est.H.transpose()).eval();
    if (m > 1) {
        const double mean = std::accumulate(traces.begin(), traces.end(), 0.0) / static_cast<double>(m);
        double ss = 0.0;
        for (double t : traces) ss += (t - mean) * (t - mean);
        est.trace_se = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(est.H, Eigen::EigenvaluesOnly);
    est.positive_definite = eig.eigenvalues().minCoeff() > 0.0;
    return est;
}

ScoreMoments summarize_score(const MonteCarloSample& sample, std::size_t k) {
    ScoreMoments mom;
    const std::size_t m = sample.per_panel.size();
    mom.panels = m;
    for (const auto& p : sample.per_panel) mom.mean += p[k].score;
    mom.mean /= static_cast<double>(m);
    if (m > 1) {
        for (const auto& p : sample.per_panel) {
            const Eigen::Vector3d d = p[k].score - mom.mean;
            mom.cov += d * d.transpose();
        }
        mom.cov /= static_cast<double>(m - 1);
        mom.mean_se = (mom.cov.diagonal() / static_cast<double>(m)).cwiseSqrt();
    }
    return mom;
}

double mean_threshold(const MonteCarloSample& sample, std::size_t k) {
    double s = 0.0;
    for (const auto& p : sample.per_panel) s += p[k].u;
    return s / static_cast<double>(sample.per_panel.size());
}

double extremal_coefficient_along_axis(const SmithParams& p, double h) {
    if (!p.positive_definite()) return kNaN;
    return smith_extremal_coefficient(mahalanobis_a(Vec2{h, 0.0}, p));
}

}  // namespace

void StudyConfig::validate() const {
    theta0.validate();
    if (!layout && n < 2) throw ConfigError("study: n must be >= 2");
    if (days < 1) throw ConfigError("study: days must be >= 1");
    if (days_per_year < 1) throw ConfigError("study: M must be >= 1");
    if (replications < 2) throw ConfigError("study: replications must be >= 2");
    if (mc_panels < 2) throw ConfigError("study: Monte Carlo panel count must be >= 2");
    if (exceedance_grid.empty()) throw ConfigError("study: empty exceedance grid");
    const std::size_t stations = layout ? layout->sites.size() : n;
    for (std::size_t i = 0; i < exceedance_grid.size(); ++i) {
        if (exceedance_grid[i] < 1 || exceedance_grid[i] >= days * stations)
            throw ConfigError("study: every N must satisfy 1 <= N < T n");
        if (i > 0 && exceedance_grid[i] <= exceedance_grid[i - 1])
            throw ConfigError("study: exceedance grid must be strictly increasing");
    }
    fit.validate();
}

StudyDesign make_design(const StudyConfig& study) {
    StudyDesign design;
    design.layout = study.layout ? *study.layout : sample_stations(study.n, study.layout_seed);
    design.pairs = pair_weights(design.layout);
    return design;
}

DailyPanel mc_panel(const StudyConfig& study, const StationLayout& layout, std::size_t m) {
    return simulate_daily_panel(layout, study.theta0, study.days, study.days_per_year,
                                derive_seed(study.seed, streams::kMonteCarlo, m), 1);
}

DailyPanel replication_panel(const StudyConfig& study, const StationLayout& layout, std::size_t r,
                             std::size_t days) {
    return simulate_daily_panel(layout, study.theta0, days, study.days_per_year,
                                derive_seed(study.seed, streams::kReplication, r), 1);
}

Eigen::Matrix3d composite_hessian(const CensoredComposite& composite, const SmithParams& theta) {
    const Vec3 x = theta.as_vector();
    Vec3 h{};
    for (int i = 0; i < 3; ++i) h[i] = 1e-3 * std::max(1.0, std::abs(x[i]));
    auto f = [&](int i, double si, int j, double sj) {
        Vec3 y = x;
        if (i >= 0) y[i] += si * h[i];
        if (j >= 0) y[j] += sj * h[j];
        const SmithParams p = SmithParams::from_vector(y);
        if (!p.positive_definite())
            throw DegenerateError("Hessian stencil leaves the positive-definite region");
        return composite.loglik(p);
    };
    const double f0 = f(-1, 0.0, -1, 0.0);
    Eigen::Matrix3d H;
    for (int i = 0; i < 3; ++i) {
        H(i, i) = (f(i, 1.0, -1, 0.0) - 2.0 * f0 + f(i, -1.0, -1, 0.0)) / (h[i] * h[i]);
        for (int j = 0; j < i; ++j) {
            const double v = (f(i, 1.0, j, 1.0) - f(i, 1.0, j, -1.0) - f(i, -1.0, j, 1.0) +
                              f(i, -1.0, j, -1.0)) /
                             (4.0 * h[i] * h[j]);
            H(i, j) = H(j, i) = v;
        }
    }
    return H;
}

PanelDerivatives panel_derivatives(const DailyPanel& panel, const PairTable& pairs,
                                   const SmithParams& theta, std::size_t exceedances) {
    const CensoredComposite composite(panel, pairs, threshold_for_count(panel, exceedances));
    PanelDerivatives out;
    out.u = composite.u();
    out.score = to_eigen(composite.score_fd(theta));
    out.neg_hessian = -composite_hessian(composite, theta);
    return out;
}

HessianEstimate mc_hessian(const SmithParams& theta0, const StudyConfig& study, std::size_t N) {
    study.validate();
    return summarize_hessian(run_monte_carlo(theta0, study, {N}), 0);
}

ScoreMoments mc_score_moments(const SmithParams& theta0, const StudyConfig& study, std::size_t N) {
    study.validate();
    return summarize_score(run_monte_carlo(theta0, study, {N}), 0);
}

std::vector<TheoryPoint> theoretical_bias_variance(const SmithParams& theta0,
                                                   const StudyConfig& study) {
    study.validate();
    const MonteCarloSample sample = run_monte_carlo(theta0, study, study.exceedance_grid);
    std::vector<TheoryPoint> out;
    for (std::size_t k = 0; k < study.exceedance_grid.size(); ++k) {
        TheoryPoint pt;
        pt.N = study.exceedance_grid[k];
        pt.mean_u = mean_threshold(sample, k);
        pt.hessian = summarize_hessian(sample, k);
        pt.score = summarize_score(sample, k);
        pt.degenerate = !pt.hessian.positive_definite;
        if (pt.degenerate) {
            pt.bias = {kNaN, kNaN, kNaN};
            pt.variance = {kNaN, kNaN, kNaN};
        } else {
            const Eigen::Matrix3d Hinv = pt.hessian.H.inverse();
            const Eigen::Vector3d bias = Hinv * pt.score.mean;
            const Eigen::Matrix3d sandwich = Hinv * pt.score.cov * Hinv.transpose();
            for (int i = 0; i < 3; ++i) {
                pt.bias[i] = bias(i);
                pt.variance[i] = sandwich(i, i);
            }
        }
        out.push_back(pt);
    }
    return out;
}

Estimator default_estimator(const StudyConfig& study, const PairTable& pairs) {
    return [&study, &pairs](std::size_t rep, const DailyPanel& panel,
                            const CensoredComposite& composite) {
        FitOptions options = study.fit;
        options.seed = derive_seed(study.seed, streams::kReplication, rep);
        const SmithParams init = options.init ? *options.init : default_init(panel, pairs);
        return fit_dependence(composite, init, options);
    };
}

std::vector<EmpiricalPoint> empirical_bias(const SmithParams& theta0, const StudyConfig& study,
                                           const Estimator& estimator) {
    study.validate();
    const StudyDesign design = make_design(study);
    StudyConfig at_theta0 = study;
    at_theta0.theta0 = theta0;
    const Estimator fit = estimator ? estimator : default_estimator(at_theta0, design.pairs);
    const std::size_t R = study.replications;
    const std::size_t G = study.exceedance_grid.size();
    std::vector<std::vector<FitResult>> fits(R, std::vector<FitResult>(G));
    parallel_for(R, study.threads, [&](std::size_t r) {
        const DailyPanel panel = replication_panel(at_theta0, design.layout, r, study.days);
        for (std::size_t k = 0; k < G; ++k) {
            const CensoredComposite composite(
                panel, design.pairs, threshold_for_count(panel, study.exceedance_grid[k]));
            fits[r][k] = fit(r, panel, composite);
        }
    });

    const Vec3 truth = theta0.as_vector();
    std::vector<EmpiricalPoint> out;
    for (std::size_t k = 0; k < G; ++k) {
        EmpiricalPoint pt;
        pt.N = study.exceedance_grid[k];
        double u_sum = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
            u_sum += fits[r][k].u;
            if (!fits[r][k].converged) {
                ++pt.unconverged;
                continue;
            }
            pt.estimates.push_back(fits[r][k].theta_hat);
        }
        pt.mean_u = u_sum / static_cast<double>(R);
        pt.used = pt.estimates.size();
        pt.flagged = static_cast<double>(pt.unconverged) > 0.2 * static_cast<double>(R);
        for (int i = 0; i < 3; ++i) {
            if (pt.used == 0) {
                pt.mean_theta[i] = pt.bias[i] = pt.sd[i] = pt.ci_lo[i] = pt.ci_hi[i] = kNaN;
                continue;
            }
            double s = 0.0;
            for (const auto& e : pt.estimates) s += e.as_vector()[i];
            const double mean = s / static_cast<double>(pt.used);
            double ss = 0.0;
            for (const auto& e : pt.estimates) ss += (e.as_vector()[i] - mean) * (e.as_vector()[i] - mean);
            pt.mean_theta[i] = mean;
            pt.bias[i] = mean - truth[i];
            pt.sd[i] = pt.used > 1 ? std::sqrt(ss / static_cast<double>(pt.used - 1)) : 0.0;
            const double half = kZ95 * pt.sd[i] / std::sqrt(static_cast<double>(pt.used));
            pt.ci_lo[i] = pt.bias[i] - half;
            pt.ci_hi[i] = pt.bias[i] + half;
        }
        out.push_back(std::move(pt));
    }
    return out;
}

StudyReport mse_sweep(const StudyConfig& study, const std::vector<TheoryPoint>& theory,
                      const std::vector<EmpiricalPoint>& empirical) {
    StudyReport report;
    report.model = study.model;
    const std::size_t stations = study.layout ? study.layout->sites.size() : study.n;
    report.pooled_cells = study.days * stations;
    std::array<double, 3> best{INFINITY, INFINITY, INFINITY};
    double best_pooled = INFINITY;
    for (int i = 0; i < 3; ++i) {
        for (std::size_t k = 0; k < theory.size(); ++k) {
            const TheoryPoint& tp = theory[k];
            ReportRow row;
            row.param = kParamNames[i];
            row.N = tp.N;
            row.u = tp.mean_u;
            row.theoretical_bias = tp.bias[i];
            row.bias2 = tp.bias[i] * tp.bias[i];
            row.variance = tp.variance[i];
            row.mse = row.bias2 + row.variance;
            row.empirical_bias = row.ci_lo = row.ci_hi = kNaN;
            for (const auto& ep : empirical) {
                if (ep.N != tp.N) continue;
                row.u = ep.mean_u;
                row.empirical_bias = ep.bias[i];
                row.ci_lo = ep.ci_lo[i];
                row.ci_hi = ep.ci_hi[i];
            }
            if (row.mse < best[i]) {
                best[i] = row.mse;
                report.argmin[i] = tp.N;
            }
            report.rows.push_back(row);
        }
    }
    for (const TheoryPoint& tp : theory) {
        const double pooled = tp.variance[0] + tp.variance[1] + tp.variance[2] +
                              tp.bias[0] * tp.bias[0] + tp.bias[1] * tp.bias[1] +
                              tp.bias[2] * tp.bias[2];
        if (pooled < best_pooled) {
            best_pooled = pooled;
            report.pooled_argmin = tp.N;
        }
    }
    report.pooled_argmin_quantile =
        1.0 - static_cast<double>(report.pooled_argmin) / static_cast<double>(report.pooled_cells);
    return report;
}

std::vector<ExtcoefRow> extremal_coefficient_layers(const StudyConfig& study,
                                                    const std::vector<TheoryPoint>& theory,
                                                    const std::vector<EmpiricalPoint>& empirical) {
    constexpr int kPoints = 50;
    const std::size_t stations = study.layout ? study.layout->sites.size() : study.n;
    const double h_max = std::sqrt(2.0 * static_cast<double>(stations));
    std::vector<ExtcoefRow> rows;
    for (const TheoryPoint& tp : theory) {
        const Vec3 t0 = study.theta0.as_vector();
        const SmithParams theoretical = SmithParams::from_vector(
            {t0[0] + tp.bias[0], t0[1] + tp.bias[1], t0[2] + tp.bias[2]});
        std::optional<SmithParams> fitted;
        for (const auto& ep : empirical)
            if (ep.N == tp.N && ep.used > 0) fitted = SmithParams::from_vector(ep.mean_theta);
        for (int k = 0; k < kPoints; ++k) {
            ExtcoefRow row;
            row.N = tp.N;
            row.h = h_max * k / (kPoints - 1);
            row.theta_true = extremal_coefficient_along_axis(study.theta0, row.h);
            row.theta_theoretical = tp.degenerate ? kNaN
                                                  : extremal_coefficient_along_axis(theoretical, row.h);
            row.theta_fitted = fitted ? extremal_coefficient_along_axis(*fitted, row.h) : kNaN;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<double> layer_max_gaps(const std::vector<ExtcoefRow>& rows) {
    std::vector<double> gaps;
    std::size_t current = 0;
    for (const auto& row : rows) {
        if (gaps.empty() || row.N != current) {
            gaps.push_back(0.0);
            current = row.N;
        }
        const double gap = std::abs(row.theta_fitted - row.theta_true);
        gaps.back() = std::isnan(gap) ? gap : std::max(gaps.back(), gap);
    }
    return gaps;
}

std::vector<ConsistencyPoint> consistency_sweep(const SmithParams& theta0, const StudyConfig& study,
                                                const std::vector<std::size_t>& days_list,
                                                double quantile) {
    study.validate();
    const StudyDesign design = make_design(study);
    StudyConfig at_theta0 = study;
    at_theta0.theta0 = theta0;
    const Estimator fit = default_estimator(at_theta0, design.pairs);
    const std::size_t R = study.replications;
    const Vec3 truth = theta0.as_vector();
    std::vector<ConsistencyPoint> out;
    for (std::size_t days : days_list) {
        std::vector<FitResult> fits(R);
        parallel_for(R, study.threads, [&](std::size_t r) {
            const DailyPanel panel = replication_panel(at_theta0, design.layout, r, days);
            const CensoredComposite composite(
                panel, design.pairs,
                resolve_threshold(panel, ThresholdSpec::quantile(quantile)));
            fits[r] = fit(r, panel, composite);
        });
        ConsistencyPoint pt;
        pt.days = days;
        for (int i = 0; i < 3; ++i) {
            std::vector<double> sq;
            for (const auto& f : fits) {
                if (!f.converged) continue;
                const double e = f.theta_hat.as_vector()[i] - truth[i];
                sq.push_back(e * e);
            }
            pt.used = sq.size();
            if (sq.size() < 2) {
                pt.rmse[i] = pt.rmse_se[i] = kNaN;
                continue;
            }
            const double mse = std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(sq.size());
            double ss = 0.0;
            for (double s : sq) ss += (s - mse) * (s - mse);
            const double mse_se = std::sqrt(ss / static_cast<double>(sq.size() - 1) /
                                            static_cast<double>(sq.size()));
            pt.rmse[i] = std::sqrt(mse);
            pt.rmse_se[i] = mse > 0.0 ? mse_se / (2.0 * pt.rmse[i]) : 0.0;
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace spex
