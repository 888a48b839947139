#include "spex/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spex/error.hpp"
#include "spex/margins.hpp"
#include "spex/numeric.hpp"

namespace spex {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640561763986139747363778;

double log_std_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double log_add(double a, double b) {
    const double hi = std::max(a, b);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// Unclamped log contribution for y1, y2 already censored at u (the censored
/// coordinate carries the value u). May return -inf on underflow.
double log_term(double y1, double y2, double log_y1, double log_y2, PairCase which, double a) {
    if (std::isinf(a)) {
        const double base = -1.0 / y1 - 1.0 / y2;
        switch (which) {
            case PairCase::BothBelow: return base;
            case PairCase::FirstExceeds: return base - 2.0 * log_y1;
            case PairCase::SecondExceeds: return base - 2.0 * log_y2;
            case PairCase::BothExceed: return base - 2.0 * log_y1 - 2.0 * log_y2;
        }
    }
    if (a == 0.0) {
        // F = exp(-1/min(y1,y2)) has no density off the diagonal.
        if (which == PairCase::BothBelow) return -1.0 / std::min(y1, y2);
        return -std::numeric_limits<double>::infinity();
    }
    const double w = 0.5 * a + (log_y2 - log_y1) / a;
    const double v = a - w;
    const double V = std_normal_cdf_unclamped(w) / y1 + std_normal_cdf_unclamped(v) / y2;
    switch (which) {
        case PairCase::BothBelow: return -V;
        case PairCase::FirstExceeds: return std_normal_log_cdf(w) - 2.0 * log_y1 - V;
        case PairCase::SecondExceeds: return std_normal_log_cdf(v) - 2.0 * log_y2 - V;
        case PairCase::BothExceed: {
            const double t1 = std_normal_log_cdf(w) + std_normal_log_cdf(v) - 2.0 * log_y1 -
                              2.0 * log_y2;
            const double t2 = log_std_normal_pdf(w) - std::log(a) - 2.0 * log_y1 - log_y2;
            return log_add(t1, t2) - V;
        }
    }
    return -std::numeric_limits<double>::infinity();
}

/// d/da of log_term for 0 < a < inf.
double dlog_term_da(double y1, double y2, double log_y1, double log_y2, PairCase which, double a) {
    const double L = log_y2 - log_y1;
    const double w = 0.5 * a + L / a;
    const double v = a - w;
    const double dw = 0.5 - L / (a * a);
    const double dv = 0.5 + L / (a * a);
    const double dV = std_normal_pdf(w) / y1;
    (void)y2;
    switch (which) {
        case PairCase::BothBelow: return -dV;
        case PairCase::FirstExceeds:
            return std::exp(log_std_normal_pdf(w) - std_normal_log_cdf(w)) * dw - dV;
        case PairCase::SecondExceeds:
            return std::exp(log_std_normal_pdf(v) - std_normal_log_cdf(v)) * dv - dV;
        case PairCase::BothExceed: {
            const double lw = std_normal_log_cdf(w);
            const double lv = std_normal_log_cdf(v);
            const double t1 = lw + lv - 2.0 * log_y1 - 2.0 * log_y2;
            const double t2 = log_std_normal_pdf(w) - std::log(a) - 2.0 * log_y1 - log_y2;
            const double lp = log_add(t1, t2);
            const double mills_w = std::exp(log_std_normal_pdf(w) - lw);
            const double mills_v = std::exp(log_std_normal_pdf(v) - lv);
            const double d1 = mills_w * dw + mills_v * dv;
            const double d2 = -w * dw - 1.0 / a;
            return std::exp(t1 - lp) * d1 + std::exp(t2 - lp) * d2 - dV;
        }
    }
    return 0.0;
}

}  // namespace

PairCase classify_pair(double x1, double x2, double u) {
    const bool e1 = x1 > u;
    const bool e2 = x2 > u;
    if (e1 && e2) return PairCase::BothExceed;
    if (e1) return PairCase::FirstExceeds;
    if (e2) return PairCase::SecondExceeds;
    return PairCase::BothBelow;
}

PairTerm pair_contribution(double x1, double x2, double u, double a) {
    if (!(x1 > 0.0) || !(x2 > 0.0) || !(u > 0.0) || !std::isfinite(u))
        throw DomainError("pair_contribution: observations and threshold must be positive");
    if (std::isnan(a) || a < 0.0) throw DomainError("pair_contribution: a must be >= 0");
    PairTerm term;
    term.which = classify_pair(x1, x2, u);
    const double y1 = x1 > u ? x1 : u;
    const double y2 = x2 > u ? x2 : u;
    double value = log_term(y1, y2, std::log(y1), std::log(y2), term.which, a);
    if (!(value >= kLogFloor)) {
        value = kLogFloor;
        term.clamped = true;
    }
    term.log_value = value;
    return term;
}

Vec3 mahalanobis_gradient(const Vec2& offset, const SmithParams& p) {
    const double det = p.determinant();
    const double z1 = (p.gamma * offset[0] - p.beta * offset[1]) / det;
    const double z2 = (p.alpha * offset[1] - p.beta * offset[0]) / det;
    const double a = std::sqrt(offset[0] * z1 + offset[1] * z2);
    if (a == 0.0) return {0.0, 0.0, 0.0};
    return {-z1 * z1 / (2.0 * a), -z1 * z2 / a, -z2 * z2 / (2.0 * a)};
}

CensoredComposite::CensoredComposite(const DailyPanel& panel, const PairTable& pairs, double u)
    : u_(u), log_u_(std::log(u)) {
    if (!(u > 0.0) || !std::isfinite(u)) throw ConfigError("threshold u must be finite and > 0");
    const std::size_t days = panel.days();
    for (const auto& sp : pairs.pairs) {
        if (sp.i >= panel.stations() || sp.j >= panel.stations())
            throw ConfigError("pair table refers to a station outside the panel");
        if (sp.weight == 0.0) continue;
        Pair pair{sp.offset, sp.weight, 0, {}};
        for (std::size_t t = 0; t < days; ++t) {
            const double x1 = panel.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(sp.i));
            const double x2 = panel.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(sp.j));
            if (!(x1 > 0.0) || !(x2 > 0.0)) throw DataError("panel entries must be positive");
            const PairCase which = classify_pair(x1, x2, u);
            ++case_counts_[static_cast<int>(which)];
            if (which == PairCase::BothBelow) {
                ++pair.below_days;
                continue;
            }
            const double y1 = x1 > u ? x1 : u;
            const double y2 = x2 > u ? x2 : u;
            pair.obs.push_back({y1, y2, std::log(y1), std::log(y2), which});
        }
        pairs_.push_back(std::move(pair));
    }
    if (pairs_.empty()) throw ConfigError("composite likelihood: no pair has a nonzero weight");
    exceedances_ = static_cast<std::size_t>((panel.data.array() > u).count());
}

double CensoredComposite::pair_loglik(const Pair& pair, double a, std::size_t& clamped,
                                      std::vector<double>& buffer) const {
    buffer.clear();
    if (pair.below_days > 0) {
        double both_below = log_term(u_, u_, log_u_, log_u_, PairCase::BothBelow, a);
        buffer.push_back(static_cast<double>(pair.below_days) * both_below);
    }
    for (const auto& o : pair.obs) {
        double value = log_term(o.y1, o.y2, o.log_y1, o.log_y2, o.which, a);
        if (!(value >= kLogFloor)) {
            value = kLogFloor;
            ++clamped;
        }
        buffer.push_back(value);
    }
    return pair.weight * pairwise_sum(buffer);
}

double CensoredComposite::pair_dloglik_da(const Pair& pair, double a,
                                          std::vector<double>& buffer) const {
    buffer.clear();
    if (pair.below_days > 0)
        buffer.push_back(static_cast<double>(pair.below_days) *
                         dlog_term_da(u_, u_, log_u_, log_u_, PairCase::BothBelow, a));
    for (const auto& o : pair.obs)
        buffer.push_back(dlog_term_da(o.y1, o.y2, o.log_y1, o.log_y2, o.which, a));
    return pair.weight * pairwise_sum(buffer);
}

double CensoredComposite::loglik(const SmithParams& theta) const {
    std::size_t clamped = 0;
    return loglik(theta, clamped);
}

double CensoredComposite::loglik(const SmithParams& theta, std::size_t& clamped) const {
    if (!theta.positive_definite()) return -std::numeric_limits<double>::infinity();
    std::vector<double> per_pair(pairs_.size());
    std::vector<double> buffer;
    for (std::size_t k = 0; k < pairs_.size(); ++k)
        per_pair[k] = pair_loglik(pairs_[k], mahalanobis_a(pairs_[k].offset, theta), clamped, buffer);
    return pairwise_sum(per_pair);
}

Vec3 CensoredComposite::score_fd(const SmithParams& theta, bool* one_sided) const {
    return fd_gradient([this](const Vec3& x) { return loglik(SmithParams::from_vector(x)); },
                       theta.as_vector(),
                       [](const Vec3& x) { return SmithParams::from_vector(x).positive_definite(); },
                       one_sided);
}

Vec3 CensoredComposite::score_analytic(const SmithParams& theta) const {
    theta.validate();
    std::array<std::vector<double>, 3> parts;
    for (auto& p : parts) p.resize(pairs_.size());
    std::vector<double> buffer;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        const double a = mahalanobis_a(pairs_[k].offset, theta);
        if (a == 0.0) throw DegenerateError("analytic score undefined for coincident stations");
        const double dl = pair_dloglik_da(pairs_[k], a, buffer);
        const Vec3 da = mahalanobis_gradient(pairs_[k].offset, theta);
        for (int c = 0; c < 3; ++c) parts[c][k] = dl * da[c];
    }
    return {pairwise_sum(parts[0]), pairwise_sum(parts[1]), pairwise_sum(parts[2])};
}

CompositeEval CensoredComposite::evaluate(const SmithParams& theta, ScoreMethod method) const {
    theta.validate();
    CompositeEval eval;
    eval.u = u_;
    eval.loglik = loglik(theta, eval.clamped);
    eval.score = method == ScoreMethod::Analytic ? score_analytic(theta)
                                                 : score_fd(theta, &eval.one_sided);
    eval.n_pairs_used = pairs_.size();
    eval.case_counts = case_counts_;
    return eval;
}

CompositeEval composite_loglik(const DailyPanel& panel, const CensoredConfig& config,
                               const SmithParams& theta) {
    if (config.weights == nullptr) throw ConfigError("composite likelihood: no pair table given");
    const double u = resolve_threshold(panel, config.threshold);
    CensoredComposite composite(panel, *config.weights, u);
    return composite.evaluate(theta, config.score);
}

Vec3 composite_score(const DailyPanel& panel, const CensoredConfig& config,
                     const SmithParams& theta, bool* one_sided) {
    if (config.weights == nullptr) throw ConfigError("composite likelihood: no pair table given");
    CensoredComposite composite(panel, *config.weights, resolve_threshold(panel, config.threshold));
    theta.validate();
    if (config.score == ScoreMethod::Analytic) {
        if (one_sided) *one_sided = false;
        return composite.score_analytic(theta);
    }
    return composite.score_fd(theta, one_sided);
}

Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x,
                 const std::function<bool(const Vec3&)>& valid, bool* one_sided) {
    Vec3 g{};
    bool any_one_sided = false;
    double f0 = std::numeric_limits<double>::quiet_NaN();
    auto center = [&] {
        if (std::isnan(f0)) f0 = f(x);
        return f0;
    };
    for (int i = 0; i < 3; ++i) {
        const double h = std::max(1e-6, 1e-6 * std::abs(x[i]));
        Vec3 up = x;
        Vec3 down = x;
        up[i] += h;
        down[i] -= h;
        const bool up_ok = !valid || valid(up);
        const bool down_ok = !valid || valid(down);
        if (up_ok && down_ok) {
            g[i] = (f(up) - f(down)) / (2.0 * h);
        } else if (up_ok) {
            g[i] = (f(up) - center()) / h;
            any_one_sided = true;
        } else if (down_ok) {
            g[i] = (center() - f(down)) / h;
            any_one_sided = true;
        } else {
            throw DegenerateError("fd_gradient: no valid step around the evaluation point");
        }
    }
    if (one_sided) *one_sided = any_one_sided;
    return g;
}

}  // namespace spex
