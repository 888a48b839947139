#pragma once

// Smith (Gaussian extreme value) process simulation at station sites via the
// storm construction Y(s) = max_i zeta_i phi_Sigma(s - U_i), daily panels,
// thresholds and annual block maxima.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spex/design.hpp"
#include "spex/maxstable.hpp"
#include "spex/rng.hpp"

namespace spex {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Storm centres are drawn on the inflated region extended by
/// margin_factor * sqrt(largest eigenvalue of Sigma) on every side.
inline constexpr double kDefaultMarginFactor = 6.0;

class SmithFieldSampler {
public:
    SmithFieldSampler(std::span<const Vec2> sites, double lambda_n, const SmithParams& params,
                      double margin_factor = kDefaultMarginFactor);
    SmithFieldSampler(const StationLayout& layout, const SmithParams& params,
                      double margin_factor = kDefaultMarginFactor)
        : SmithFieldSampler(layout.sites, layout.lambda_n, params, margin_factor) {}

    std::size_t stations() const { return sites_.size(); }
    double margin() const { return margin_; }
    double half_width() const { return half_width_; }

    /// One field realization written to out (size = stations()).
    void sample(Rng& rng, std::span<double> out) const;

    /// Coupled realization: `outer` uses every storm, `inner` only storms whose
    /// centre falls in the region built with inner_margin_factor (<= the sampler's).
    /// The inner field is distributed as a sampler built with inner_margin_factor.
    void sample_nested(Rng& rng, double inner_margin_factor, std::span<double> outer,
                       std::span<double> inner) const;

    /// Number of storms drawn by the last call on this thread (diagnostics).
    static std::size_t last_storm_count();

private:
    void run(Rng& rng, double inner_half_width, std::span<double> outer,
             std::span<double> inner) const;

    std::vector<Vec2> sites_;
    SmithParams params_;
    double inv_det_ = 0.0;
    double peak_density_ = 0.0;
    double margin_ = 0.0;
    double half_width_ = 0.0;
    double area_ = 0.0;
};

/// One Smith field at the layout's stations.
std::vector<double> simulate_smith_field(const StationLayout& layout, const SmithParams& params,
                                         std::uint64_t seed);

/// T x n observations on unit Frechet margins with provenance.
struct DailyPanel {
    Matrix data;
    std::size_t days_per_year = 1;
    std::string model = "smith";
    SmithParams params{};
    std::uint64_t seed = 0;

    std::size_t days() const { return static_cast<std::size_t>(data.rows()); }
    std::size_t stations() const { return static_cast<std::size_t>(data.cols()); }
};

/// T independent Smith fields; day t uses the substream derive_seed(seed, day, t),
/// so the result is identical for every worker count.
DailyPanel simulate_daily_panel(const StationLayout& layout, const SmithParams& params,
                                std::size_t days, std::size_t days_per_year, std::uint64_t seed,
                                unsigned threads = 1);

struct ThresholdSpec {
    enum class Mode { Quantile, ExceedanceCount, Absolute };
    Mode mode = Mode::Quantile;
    double value = 0.95;

    static ThresholdSpec quantile(double q) { return {Mode::Quantile, q}; }
    static ThresholdSpec exceedances(std::size_t n) {
        return {Mode::ExceedanceCount, static_cast<double>(n)};
    }
    static ThresholdSpec absolute(double u) { return {Mode::Absolute, u}; }
};

/// The (T*n - N)-th order statistic of the pooled entries: exactly N entries
/// exceed it when there are no ties, fewer otherwise.
double threshold_for_count(const DailyPanel& panel, std::size_t exceedances);

/// Exceedance count implied by a pooled quantile q: round((1-q) T n), clamped to [1, T n - 1].
std::size_t exceedances_for_quantile(const DailyPanel& panel, double q);

/// Absolute threshold for any ThresholdSpec mode.
double resolve_threshold(const DailyPanel& panel, const ThresholdSpec& spec);

std::size_t count_exceedances(const DailyPanel& panel, double u);

/// Block maxima over consecutive M-day blocks: (T/M) x n.
Matrix annual_maxima(const DailyPanel& panel);

}  // namespace spex
