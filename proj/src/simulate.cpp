#include "spex/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spex/error.hpp"
#include "spex/parallel.hpp"

namespace spex {

namespace {

constexpr std::size_t kMaxStorms = 50'000'000;

thread_local std::size_t tl_storm_count = 0;

}  // namespace

SmithFieldSampler::SmithFieldSampler(std::span<const Vec2> sites, double lambda_n,
                                     const SmithParams& params, double margin_factor)
    : sites_(sites.begin(), sites.end()), params_(params) {
    params.validate();
    if (sites_.empty()) throw ConfigError("SmithFieldSampler: no stations");
    if (!(lambda_n > 0.0)) throw ConfigError("SmithFieldSampler: lambda_n must be > 0");
    if (!(margin_factor >= 0.0)) throw ConfigError("SmithFieldSampler: margin factor must be >= 0");
    const double det = params.determinant();
    inv_det_ = 1.0 / det;
    peak_density_ = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
    margin_ = margin_factor * std::sqrt(params.max_eigenvalue());
    half_width_ = 0.5 * lambda_n + margin_;
    for (const auto& s : sites_)
        half_width_ = std::max(half_width_, std::max(std::abs(s[0]), std::abs(s[1])) + margin_);
    area_ = 4.0 * half_width_ * half_width_;
}

std::size_t SmithFieldSampler::last_storm_count() { return tl_storm_count; }

void SmithFieldSampler::sample(Rng& rng, std::span<double> out) const {
    run(rng, half_width_, out, out);
}

void SmithFieldSampler::sample_nested(Rng& rng, double inner_margin_factor,
                                      std::span<double> outer, std::span<double> inner) const {
    const double inner_margin = inner_margin_factor * std::sqrt(params_.max_eigenvalue());
    if (!(inner_margin <= margin_))
        throw ConfigError("sample_nested: inner margin exceeds the sampler margin");
    run(rng, half_width_ - (margin_ - inner_margin), outer, inner);
}

void SmithFieldSampler::run(Rng& rng, double inner_half_width, std::span<double> outer,
                            std::span<double> inner) const {
    const std::size_t n = sites_.size();
    if (outer.size() != n || inner.size() != n)
        throw ConfigError("SmithFieldSampler: output size does not match station count");
    const bool nested = outer.data() != inner.data();
    std::fill(outer.begin(), outer.end(), 0.0);
    std::fill(inner.begin(), inner.end(), 0.0);

    const double a = params_.alpha;
    const double b = params_.beta;
    const double c = params_.gamma;
    double arrival = 0.0;
    double inner_min = 0.0;
    std::size_t storms = 0;
    for (;;) {
        arrival += rng.exponential();
        const double zeta = area_ / arrival;
        const double peak = zeta * peak_density_;
        // Every later storm is weaker, so none can raise any station above its current value.
        if (peak < inner_min) break;
        if (++storms > kMaxStorms) throw DegenerateError("Smith simulation did not terminate");
        const double ux = half_width_ * (2.0 * rng.uniform() - 1.0);
        const double uy = half_width_ * (2.0 * rng.uniform() - 1.0);
        const bool in_inner = !nested || (std::abs(ux) <= inner_half_width &&
                                          std::abs(uy) <= inner_half_width);
        bool touched_inner = false;
        for (std::size_t k = 0; k < n; ++k) {
            const double dx = sites_[k][0] - ux;
            const double dy = sites_[k][1] - uy;
            const double q = (c * dx * dx - 2.0 * b * dx * dy + a * dy * dy) * inv_det_;
            const double value = peak * std::exp(-0.5 * q);
            if (value > outer[k]) outer[k] = value;
            if (nested && in_inner && value > inner[k]) {
                inner[k] = value;
                touched_inner = true;
            }
            if (!nested && value == outer[k]) touched_inner = true;
        }
        if (touched_inner) inner_min = *std::min_element(inner.begin(), inner.end());
    }
    tl_storm_count = storms;
}

std::vector<double> simulate_smith_field(const StationLayout& layout, const SmithParams& params,
                                         std::uint64_t seed) {
    SmithFieldSampler sampler(layout, params);
    std::vector<double> out(layout.sites.size());
    Rng rng(derive_seed(seed, streams::kField));
    sampler.sample(rng, out);
    return out;
}

DailyPanel simulate_daily_panel(const StationLayout& layout, const SmithParams& params,
                                std::size_t days, std::size_t days_per_year, std::uint64_t seed,
                                unsigned threads) {
    if (days < 1) throw ConfigError("simulate_daily_panel: need at least one day");
    if (days_per_year < 1) throw ConfigError("simulate_daily_panel: M must be >= 1");
    SmithFieldSampler sampler(layout, params);
    DailyPanel panel;
    panel.data.resize(static_cast<Eigen::Index>(days), static_cast<Eigen::Index>(layout.sites.size()));
    panel.days_per_year = days_per_year;
    panel.params = params;
    panel.seed = seed;
    parallel_for(days, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, streams::kDay, t));
        sampler.sample(rng, std::span<double>(panel.data.row(static_cast<Eigen::Index>(t)).data(),
                                              panel.stations()));
    });
    return panel;
}

double threshold_for_count(const DailyPanel& panel, std::size_t exceedances) {
    const std::size_t pooled = static_cast<std::size_t>(panel.data.size());
    if (exceedances < 1 || exceedances >= pooled)
        throw ConfigError("threshold_for_count: need 1 <= N < T*n (N=" +
                          std::to_string(exceedances) + ", T*n=" + std::to_string(pooled) + ")");
    std::vector<double> values(panel.data.data(), panel.data.data() + pooled);
    const std::size_t rank = pooled - exceedances;  // 1-based order statistic
    auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(values.begin(), nth, values.end());
    return *nth;
}

std::size_t exceedances_for_quantile(const DailyPanel& panel, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("threshold quantile must lie in (0,1)");
    const double pooled = static_cast<double>(panel.data.size());
    const double target = std::round((1.0 - q) * pooled);
    return static_cast<std::size_t>(std::clamp(target, 1.0, pooled - 1.0));
}

double resolve_threshold(const DailyPanel& panel, const ThresholdSpec& spec) {
    switch (spec.mode) {
        case ThresholdSpec::Mode::Quantile:
            return threshold_for_count(panel, exceedances_for_quantile(panel, spec.value));
        case ThresholdSpec::Mode::ExceedanceCount: {
            if (!(spec.value >= 1.0) || spec.value != std::floor(spec.value))
                throw ConfigError("exceedance count must be a positive integer");
            return threshold_for_count(panel, static_cast<std::size_t>(spec.value));
        }
        case ThresholdSpec::Mode::Absolute:
            if (!(spec.value > 0.0) || !std::isfinite(spec.value))
                throw ConfigError("absolute threshold must be finite and > 0");
            return spec.value;
    }
    throw ConfigError("unknown threshold mode");
}

std::size_t count_exceedances(const DailyPanel& panel, double u) {
    return static_cast<std::size_t>((panel.data.array() > u).count());
}

Matrix annual_maxima(const DailyPanel& panel) {
    const std::size_t M = panel.days_per_year;
    if (M < 1 || panel.days() % M != 0)
        throw ConfigError("annual_maxima: M must divide the number of days");
    const std::size_t years = panel.days() / M;
    Matrix out(static_cast<Eigen::Index>(years), panel.data.cols());
    for (std::size_t y = 0; y < years; ++y)
        out.row(static_cast<Eigen::Index>(y)) =
            panel.data.middleRows(static_cast<Eigen::Index>(y * M), static_cast<Eigen::Index>(M))
                .colwise()
                .maxCoeff();
    return out;
}

}  // namespace spex
