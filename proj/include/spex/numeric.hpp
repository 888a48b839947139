#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace spex {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// Pairwise (tree) summation; the reduction shape depends only on the length.
inline double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kLeaf = 8;
    if (values.size() <= kLeaf) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace spex
