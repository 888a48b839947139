#pragma once

// Stochastic sampling design under increasing-domain asymptotics: stations
// x_i ~ Uniform((-1/2,1/2]^2), scaled sites s_i = lambda_n x_i with
// lambda_n = sqrt(n), and 0/1 pair weights with cutoff delta0 = sqrt(2n)/2.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spex/numeric.hpp"

namespace spex {

struct StationLayout {
    std::size_t n = 0;
    double lambda_n = 1.0;
    std::vector<Vec2> sites;  ///< scaled coordinates
    std::uint64_t seed = 0;
};

struct StationPair {
    std::size_t i = 0;
    std::size_t j = 0;
    Vec2 offset{};  ///< s_i - s_j
    double distance = 0.0;
    double weight = 0.0;
};

struct PairTable {
    std::vector<StationPair> pairs;
    double delta0 = 0.0;

    std::size_t weighted_count() const;
};

/// Half diagonal of the inflated square sqrt(n)(-1/2,1/2]^2.
double default_cutoff(std::size_t n);

StationLayout sample_stations(std::size_t n, std::uint64_t seed);

/// Layout from explicit scaled coordinates (e.g. a stations CSV).
StationLayout layout_from_sites(std::vector<Vec2> sites, double lambda_n, std::uint64_t seed = 0);

/// All n(n-1)/2 pairs in (i<j) order with weight 1 iff distance <= delta0.
PairTable pair_weights(const StationLayout& layout);
PairTable pair_weights(const StationLayout& layout, double delta0);

}  // namespace spex
