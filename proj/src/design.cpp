#include "spex/design.hpp"

#include <cmath>

#include "spex/error.hpp"
#include "spex/rng.hpp"

namespace spex {

std::size_t PairTable::weighted_count() const {
    std::size_t count = 0;
    for (const auto& p : pairs)
        if (p.weight > 0.0) ++count;
    return count;
}

double default_cutoff(std::size_t n) { return 0.5 * std::sqrt(2.0 * static_cast<double>(n)); }

StationLayout sample_stations(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ConfigError("sample_stations: need at least 2 stations");
    StationLayout layout;
    layout.n = n;
    layout.lambda_n = std::sqrt(static_cast<double>(n));
    layout.seed = seed;
    layout.sites.reserve(n);
    Rng rng(derive_seed(seed, streams::kLayout));
    for (std::size_t i = 0; i < n; ++i) {
        // 0.5 - U with U in [0,1) lies in (-1/2, 1/2].
        const double x = 0.5 - rng.uniform();
        const double y = 0.5 - rng.uniform();
        layout.sites.push_back({layout.lambda_n * x, layout.lambda_n * y});
    }
    return layout;
}

StationLayout layout_from_sites(std::vector<Vec2> sites, double lambda_n, std::uint64_t seed) {
    if (sites.size() < 2) throw ConfigError("layout needs at least 2 stations");
    if (!(lambda_n > 0.0)) throw ConfigError("layout inflation factor must be > 0");
    StationLayout layout;
    layout.n = sites.size();
    layout.lambda_n = lambda_n;
    layout.sites = std::move(sites);
    layout.seed = seed;
    return layout;
}

PairTable pair_weights(const StationLayout& layout) {
    return pair_weights(layout, default_cutoff(layout.n));
}

PairTable pair_weights(const StationLayout& layout, double delta0) {
    if (!(delta0 > 0.0)) throw ConfigError("pair_weights: cutoff must be > 0");
    PairTable table;
    table.delta0 = delta0;
    const std::size_t n = layout.sites.size();
    table.pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            StationPair p;
            p.i = i;
            p.j = j;
            p.offset = {layout.sites[i][0] - layout.sites[j][0],
                        layout.sites[i][1] - layout.sites[j][1]};
            p.distance = std::hypot(p.offset[0], p.offset[1]);
            p.weight = p.distance <= delta0 ? 1.0 : 0.0;
            table.pairs.push_back(p);
        }
    }
    return table;
}

}  // namespace spex
