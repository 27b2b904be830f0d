#pragma once

#include <cstdint>
#include <functional>

#include "rsk/gridfn.hpp"

namespace rsk::testing {

// Runs body(rng, i) n times from one seed.
inline void for_all(int n, std::uint64_t seed, const std::function<void(Rng&, int)>& body) {
    Rng rng(seed);
    for (int i = 0; i < n; ++i) body(rng, i);
}

// Step function with random values on random groups of consecutive cells.
inline GridFunction gen_step(const Grid& grid, Rng& rng) {
    std::vector<double> v(grid.size());
    std::size_t k = 0;
    while (k < v.size()) {
        std::size_t run = 1 + static_cast<std::size_t>(rng.uniform() * 40);
        double val = rng.uniform() < 0.2 ? 0.0 : rng.exponential();
        for (std::size_t j = 0; j < run && k < v.size(); ++j, ++k) v[k] = val;
    }
    return GridFunction(grid, std::move(v));
}

inline GridFunction gen_nonincreasing(const Grid& grid, Rng& rng) {
    std::vector<double> v(grid.size());
    double level = 0.0;
    for (std::size_t k = v.size(); k-- > 0;) {
        if (rng.uniform() < 0.1) level += rng.exponential();
        v[k] = level;
    }
    if (v[0] == 0.0) v[0] = 1.0;
    return GridFunction(grid, std::move(v));
}

inline double rel(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace rsk::testing
