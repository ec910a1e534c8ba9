#pragma once

#include <cstdint>
#include <vector>

#include "ocp/spec.hpp"

namespace ocp {

// Ordered pair of window indices (0-based time steps).
struct WindowPair {
    int w_first = 0;
    int w_second = 0;
    friend bool operator==(const WindowPair&, const WindowPair&) = default;
};

// Exact joint distribution of (X^w_U, X^{w'}_U) over a support of ordered
// window pairs. Tables are conditional on the window pair; `weights` mixes the
// support (uniform in exact_pair_distribution), so the whole object sums to 1.
struct PairDistribution {
    std::vector<int> subset;               // sorted global feature indices U
    std::vector<WindowPair> support;
    std::vector<double> weights;           // per support pair, sum to 1
    std::vector<std::vector<double>> tables;  // tables[i][(v << k) | v'], size 4^k

    int bits() const { return static_cast<int>(subset.size()); }
    // Joint probability of (w_i, v, v') including the support weight.
    double prob(std::size_t pair_idx, std::uint32_t v, std::uint32_t vp) const {
        return weights[pair_idx] * tables[pair_idx][(v << bits()) | vp];
    }
};

// Exact joint law of the window-pair values restricted to `subset` at windows
// (t1, t2), computed by factorizing over independent feature groups (a driver
// with its linked drivers and noisy children forms one group, each background
// feature its own group). Index layout: (v1 << k) | v2 with bit i of v1/v2
// holding subset[i] at t1/t2. No Monte Carlo error.
std::vector<double> value_pair_table(const DistributionSpec& spec, int t1, int t2,
                                     const std::vector<int>& subset,
                                     std::size_t budget = kDefaultTableBudget);

// Exact marginal law of X^t_subset, size 2^k.
std::vector<double> single_time_table(const DistributionSpec& spec, int t,
                                      const std::vector<int>& subset,
                                      std::size_t budget = kDefaultTableBudget);

PairDistribution exact_pair_distribution(const DistributionSpec& spec,
                                         const std::vector<WindowPair>& support,
                                         const std::vector<int>& subset,
                                         std::size_t budget = kDefaultTableBudget);

// All feature indices of a spec, sorted.
std::vector<int> all_features(const DistributionSpec& spec);

}  // namespace ocp
