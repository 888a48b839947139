#pragma once

// Maximum censored pairwise composite likelihood estimation of the Smith
// covariance (alpha, beta, gamma) by Nelder-Mead in log-Cholesky coordinates.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "spex/likelihood.hpp"

namespace spex {

struct FitOptions {
    /// Starting point; the moment-based default_init is used when empty.
    std::optional<SmithParams> init;
    std::size_t max_evals = 2000;
    double tol_f = 1e-6;
    double tol_x = 1e-5;
    /// Extra runs started from the best point so far with jittered raw coordinates.
    std::size_t restarts = 3;
    /// Multiplicative jitter factor: each raw coordinate is scaled by jitter^U, U ~ Uniform(-1,1).
    double jitter = 1.2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct FitResult {
    SmithParams theta_hat{};
    double loglik_at_opt = 0.0;
    double loglik_at_init = 0.0;
    SmithParams init{};
    bool converged = false;
    std::size_t evals = 0;
    std::array<std::size_t, 4> case_counts{};
    std::size_t n_exceed = 0;
    double u = 0.0;
};

/// Log-Cholesky coordinates (log L11, L21, log L22) with Sigma = L L'.
Vec3 reparameterize(const SmithParams& p);
SmithParams inverse_reparameterize(const Vec3& raw);

/// Isotropic start: the naive extremal coefficient of the closest weighted pair,
/// clamped to [1.05, 1.95], is inverted through 2 Phi(a/2) and matched to its distance.
SmithParams default_init(const DailyPanel& panel, const PairTable& pairs);

FitResult fit_dependence(const CensoredComposite& composite, const SmithParams& init,
                         const FitOptions& options);
FitResult fit_dependence(const DailyPanel& panel, const CensoredConfig& config,
                         const FitOptions& options);

}  // namespace spex
