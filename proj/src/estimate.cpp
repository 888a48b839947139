#include "spex/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "spex/error.hpp"
#include "spex/margins.hpp"
#include "spex/nelder_mead.hpp"
#include "spex/rng.hpp"

namespace spex {

void FitOptions::validate() const {
    if (!(tol_f > 0.0) || !(tol_x > 0.0)) throw ConfigError("fit tolerances must be > 0");
    if (max_evals < 4) throw ConfigError("fit max_evals must be >= 4");
    if (!(jitter >= 1.0)) throw ConfigError("fit jitter must be >= 1");
}

Vec3 reparameterize(const SmithParams& p) {
    p.validate();
    const double l11 = std::sqrt(p.alpha);
    const double l21 = p.beta / l11;
    const double l22 = std::sqrt(p.gamma - l21 * l21);
    return {std::log(l11), l21, std::log(l22)};
}

SmithParams inverse_reparameterize(const Vec3& raw) {
    const double l11 = std::exp(raw[0]);
    const double l21 = raw[1];
    const double l22 = std::exp(raw[2]);
    return {l11 * l11, l21 * l11, l21 * l21 + l22 * l22};
}

SmithParams default_init(const DailyPanel& panel, const PairTable& pairs) {
    const StationPair* nearest = nullptr;
    for (const auto& p : pairs.pairs)
        if (p.weight != 0.0 && p.distance > 0.0 && (!nearest || p.distance < nearest->distance))
            nearest = &p;
    if (!nearest) return {1.0, 0.0, 1.0};
    const auto days = static_cast<Eigen::Index>(panel.days());
    std::vector<double> y1(panel.days()), y2(panel.days());
    for (Eigen::Index t = 0; t < days; ++t) {
        y1[t] = panel.data(t, static_cast<Eigen::Index>(nearest->i));
        y2[t] = panel.data(t, static_cast<Eigen::Index>(nearest->j));
    }
    const double theta = std::clamp(naive_extremal_estimator(y1, y2), 1.05, 1.95);
    const double a = 2.0 * std_normal_quantile(theta / 2.0);
    const double s2 = (nearest->distance / a) * (nearest->distance / a);
    return {s2, 0.0, s2};
}

FitResult fit_dependence(const CensoredComposite& composite, const SmithParams& init,
                         const FitOptions& options) {
    options.validate();
    init.validate();
    FitResult result;
    result.init = init;
    result.case_counts = composite.case_counts();
    result.n_exceed = composite.exceedances();
    result.u = composite.u();

    auto objective = [&](std::span<const double> x) {
        return -composite.loglik(inverse_reparameterize({x[0], x[1], x[2]}));
    };
    NelderMeadOptions nm;
    nm.max_evals = options.max_evals;
    nm.tol_f = options.tol_f;
    nm.tol_x = options.tol_x;

    Vec3 start = reparameterize(init);
    result.loglik_at_init = composite.loglik(inverse_reparameterize(start));
    result.loglik_at_opt = result.loglik_at_init;
    Vec3 best = start;
    for (std::size_t run = 0; run <= options.restarts; ++run) {
        if (run > 0) {
            Rng rng(derive_seed(options.seed, streams::kRestart, run));
            start = best;
            for (double& r : start) r *= std::pow(options.jitter, 2.0 * rng.uniform() - 1.0);
        }
        const auto nm_result = nelder_mead(objective, {start[0], start[1], start[2]}, nm);
        result.evals += nm_result.evals;
        result.converged = result.converged || nm_result.converged;
        if (-nm_result.f > result.loglik_at_opt) {
            result.loglik_at_opt = -nm_result.f;
            best = {nm_result.x[0], nm_result.x[1], nm_result.x[2]};
        }
    }
    result.theta_hat = inverse_reparameterize(best);
    return result;
}

FitResult fit_dependence(const DailyPanel& panel, const CensoredConfig& config,
                         const FitOptions& options) {
    if (config.weights == nullptr) throw ConfigError("fit: no pair table given");
    const CensoredComposite composite(panel, *config.weights,
                                      resolve_threshold(panel, config.threshold));
    const SmithParams init = options.init ? *options.init : default_init(panel, *config.weights);
    return fit_dependence(composite, init, options);
}

}  // namespace spex
