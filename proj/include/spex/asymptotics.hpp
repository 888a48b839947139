#pragma once

// Monte Carlo realization of the first-order asymptotics of the censored
// composite likelihood estimator: H = E[-D'], b = E[D], V = Cov[D] at theta0,
// bias = H^{-1} b, sandwich variance H^{-1} V H^{-1}, empirical bias from
// replicated fits, MSE curves over the exceedance count N and extremal
// coefficient layers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spex/estimate.hpp"

namespace spex {

inline constexpr std::array<const char*, 3> kParamNames = {"alpha", "beta", "gamma"};

struct StudyConfig {
    std::string model = "i";
    SmithParams theta0{2.0, 0.0, 3.0};
    std::size_t n = 20;
    std::size_t days = 1000;
    std::size_t days_per_year = 100;
    std::size_t replications = 100;
    std::vector<std::size_t> exceedance_grid{500, 1000, 1500, 2000, 2500,
                                             3000, 3500, 4000, 4500, 5000};
    std::uint64_t layout_seed = 2013;
    std::uint64_t seed = 1;
    std::size_t mc_panels = 200;
    FitOptions fit{};
    unsigned threads = 0;
    /// Replaces the sampled layout (e.g. a single-pair layout).
    std::optional<StationLayout> layout;

    void validate() const;
};

struct StudyDesign {
    StationLayout layout;
    PairTable pairs;
};

StudyDesign make_design(const StudyConfig& study);

/// Panel used for Monte Carlo integration (index m) or replication (index r).
DailyPanel mc_panel(const StudyConfig& study, const StationLayout& layout, std::size_t m);
DailyPanel replication_panel(const StudyConfig& study, const StationLayout& layout, std::size_t r,
                             std::size_t days);

struct HessianEstimate {
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    /// Monte Carlo standard error of trace(H).
    double trace_se = 0.0;
    std::size_t panels = 0;
    bool positive_definite = false;
};

struct ScoreMoments {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    /// Monte Carlo standard error of each mean component.
    Eigen::Vector3d mean_se = Eigen::Vector3d::Zero();
    std::size_t panels = 0;
};

/// Per-panel quantities at theta0 for one N (threshold = the panel's own
/// (T n - N)-th order statistic).
struct PanelDerivatives {
    Eigen::Vector3d score;
    Eigen::Matrix3d neg_hessian;
    double u = 0.0;
};

/// Central second differences of the composite log-likelihood with step
/// 1e-3 max(1, |theta_i|), symmetrized.
Eigen::Matrix3d composite_hessian(const CensoredComposite& composite, const SmithParams& theta);

PanelDerivatives panel_derivatives(const DailyPanel& panel, const PairTable& pairs,
                                   const SmithParams& theta, std::size_t exceedances);

HessianEstimate mc_hessian(const SmithParams& theta0, const StudyConfig& study, std::size_t N);
ScoreMoments mc_score_moments(const SmithParams& theta0, const StudyConfig& study, std::size_t N);

struct TheoryPoint {
    std::size_t N = 0;
    double mean_u = 0.0;
    HessianEstimate hessian;
    ScoreMoments score;
    Vec3 bias{};
    Vec3 variance{};
    /// H not positive definite: bias and variance are NaN.
    bool degenerate = false;
};

/// One set of Monte Carlo panels is simulated and reused for every N on the grid.
std::vector<TheoryPoint> theoretical_bias_variance(const SmithParams& theta0,
                                                   const StudyConfig& study);

struct EmpiricalPoint {
    std::size_t N = 0;
    double mean_u = 0.0;
    Vec3 mean_theta{};
    Vec3 bias{};
    Vec3 sd{};
    Vec3 ci_lo{};
    Vec3 ci_hi{};
    std::size_t used = 0;
    std::size_t unconverged = 0;
    /// More than 20% of the fits at this N did not converge.
    bool flagged = false;
    std::vector<SmithParams> estimates;
};

/// Estimator hook: replication index, its panel and the prepared likelihood.
using Estimator =
    std::function<FitResult(std::size_t rep, const DailyPanel& panel, const CensoredComposite& composite)>;

/// Default estimator: fit_dependence from default_init with a replication-specific seed.
Estimator default_estimator(const StudyConfig& study, const PairTable& pairs);

/// Replication r uses one panel for every N on the grid.
std::vector<EmpiricalPoint> empirical_bias(const SmithParams& theta0, const StudyConfig& study,
                                           const Estimator& estimator = {});

struct ReportRow {
    std::string param;
    std::size_t N = 0;
    double u = 0.0;
    double empirical_bias = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double theoretical_bias = 0.0;
    double bias2 = 0.0;
    double variance = 0.0;
    double mse = 0.0;
};

struct StudyReport {
    std::string model;
    std::size_t pooled_cells = 0;
    std::vector<ReportRow> rows;
    /// Argmin of mse over N per parameter, and of the sum over parameters.
    std::array<std::size_t, 3> argmin{};
    std::size_t pooled_argmin = 0;
    /// Pooled quantile implied by the pooled argmin: 1 - N/(T n).
    double pooled_argmin_quantile = 0.0;
};

/// mse = bias^2 + variance per parameter and N; empirical columns are NaN
/// when no empirical curve is given.
StudyReport mse_sweep(const StudyConfig& study, const std::vector<TheoryPoint>& theory,
                      const std::vector<EmpiricalPoint>& empirical = {});

struct ExtcoefRow {
    std::size_t N = 0;
    double h = 0.0;
    double theta_true = 0.0;
    double theta_theoretical = 0.0;
    double theta_fitted = 0.0;
};

/// 50 separations on [0, sqrt(2n)] along the first coordinate axis; curves use
/// theta0, theta0 + theoretical bias and the mean fitted theta per N.
std::vector<ExtcoefRow> extremal_coefficient_layers(const StudyConfig& study,
                                                    const std::vector<TheoryPoint>& theory,
                                                    const std::vector<EmpiricalPoint>& empirical);

/// max_h |theta_fitted - theta_true| per N, in grid order; NaN where no fitted curve exists.
std::vector<double> layer_max_gaps(const std::vector<ExtcoefRow>& rows);

struct ConsistencyPoint {
    std::size_t days = 0;
    Vec3 rmse{};
    Vec3 rmse_se{};
    std::size_t used = 0;
};

/// Component RMSE of theta-hat over study.replications fits for each panel
/// length, thresholding every panel at the pooled quantile q.
std::vector<ConsistencyPoint> consistency_sweep(const SmithParams& theta0, const StudyConfig& study,
                                                const std::vector<std::size_t>& days_list,
                                                double quantile);

}  // namespace spex
