#pragma once

// Threshold-censored pairwise composite likelihood for the Smith model.
// Each pair-day contributes the bivariate CDF F(u,u) when both values are at
// or below u, a first partial when one exceeds, and the joint density when
// both exceed; F is the unit Frechet Smith distribution function.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "spex/design.hpp"
#include "spex/maxstable.hpp"
#include "spex/simulate.hpp"

namespace spex {

/// Floor applied to log contributions whose density underflows.
inline constexpr double kLogFloor = -745.0;

enum class PairCase : int { BothBelow = 0, FirstExceeds = 1, SecondExceeds = 2, BothExceed = 3 };

PairCase classify_pair(double x1, double x2, double u);

struct PairTerm {
    double log_value = 0.0;
    PairCase which = PairCase::BothBelow;
    bool clamped = false;
};

/// Log contribution of one pair-day. a = +inf selects the independence branch
/// and a = 0 the complete-dependence branch.
PairTerm pair_contribution(double x1, double x2, double u, double a);

enum class ScoreMethod { FiniteDifference, Analytic };

struct CensoredConfig {
    ThresholdSpec threshold = ThresholdSpec::quantile(0.95);
    const PairTable* weights = nullptr;
    ScoreMethod score = ScoreMethod::FiniteDifference;
};

struct CompositeEval {
    double loglik = 0.0;
    Vec3 score{};
    std::size_t n_pairs_used = 0;
    std::array<std::size_t, 4> case_counts{};
    std::size_t clamped = 0;
    /// True when a finite-difference step left the positive-definite region.
    bool one_sided = false;
    double u = 0.0;
};

/// Panel, pair table and threshold preprocessed for repeated evaluation over
/// theta. Days with both values at or below u share one closed-form term per
/// pair, so the cost scales with the number of pair-days with an exceedance.
class CensoredComposite {
public:
    CensoredComposite(const DailyPanel& panel, const PairTable& pairs, double u);

    double u() const { return u_; }
    std::size_t weighted_pairs() const { return pairs_.size(); }
    const std::array<std::size_t, 4>& case_counts() const { return case_counts_; }
    std::size_t exceedances() const { return exceedances_; }

    /// Composite log-likelihood; -inf when theta is not positive definite.
    double loglik(const SmithParams& theta) const;
    double loglik(const SmithParams& theta, std::size_t& clamped) const;

    /// Central differences with step max(1e-6, 1e-6 |theta_i|); one-sided where
    /// the central step leaves the positive-definite region.
    Vec3 score_fd(const SmithParams& theta, bool* one_sided = nullptr) const;
    Vec3 score_analytic(const SmithParams& theta) const;

    CompositeEval evaluate(const SmithParams& theta,
                           ScoreMethod method = ScoreMethod::FiniteDifference) const;

private:
    struct Obs {
        double y1;
        double y2;
        double log_y1;
        double log_y2;
        PairCase which;
    };
    struct Pair {
        Vec2 offset;
        double weight;
        std::size_t below_days;
        std::vector<Obs> obs;
    };

    double pair_loglik(const Pair& pair, double a, std::size_t& clamped,
                       std::vector<double>& buffer) const;
    double pair_dloglik_da(const Pair& pair, double a, std::vector<double>& buffer) const;

    double u_;
    double log_u_;
    std::vector<Pair> pairs_;
    std::array<std::size_t, 4> case_counts_{};
    std::size_t exceedances_ = 0;
};

/// Resolves the configured threshold and evaluates l(theta) with its score.
CompositeEval composite_loglik(const DailyPanel& panel, const CensoredConfig& config,
                               const SmithParams& theta);
Vec3 composite_score(const DailyPanel& panel, const CensoredConfig& config,
                     const SmithParams& theta, bool* one_sided = nullptr);

/// Central-difference gradient of f at x with step max(1e-6, 1e-6 |x_i|).
/// Falls back to a one-sided difference (and sets *one_sided) where a central
/// step is rejected by `valid`.
Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x,
                 const std::function<bool(const Vec3&)>& valid = {}, bool* one_sided = nullptr);

/// d a / d(alpha, beta, gamma) for the pair offset h.
Vec3 mahalanobis_gradient(const Vec2& offset, const SmithParams& p);

}  // namespace spex
