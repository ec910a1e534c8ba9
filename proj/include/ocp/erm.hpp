#pragma once

#include <cstdint>
#include <vector>

#include "ocp/logistic.hpp"
#include "ocp/sampling.hpp"

namespace ocp {

// Aggregated pair sample: counts over (x_first bits, x_second bits, label).
// The value support is tiny (4^d * 2), so every per-subset fit runs on a
// weighted dataset whose size is independent of the number of pairs.
struct PairCounts {
    int d = 0;
    std::vector<double> counts;  // [y][(v1 << d) | v2], y index 0 -> -1

    static PairCounts from_pairs(const std::vector<LabeledPair>& pairs, int d);
    // Marginal counts over a sorted subset of features, same layout with d0 bits.
    PairCounts project(const std::vector<int>& subset) const;
    // Weighted featurized dataset (deterministic row order).
    Dataset to_dataset() const;
    double total() const;
};

struct SolverOptions {
    Regularization reg{Regularization::Kind::L2, 1e-3};
    double tol = 1e-8;
    int max_iter = 5000;
};

// Enumerates all size-k subsets of {0..d-1} in lexicographic order.
std::vector<std::vector<int>> enumerate_subsets(int d, int k);

struct SubsetSearchResult {
    std::vector<int> subset;
    double empirical_risk = 1.0;
};

// Exhaustive subset ERM: fits one logistic model per size-d0 subset on the
// pair sample and returns the subset minimizing the empirical 0-1 risk, ties
// broken toward the lexicographically smallest index list.
SubsetSearchResult erm_subset_search(const std::vector<LabeledPair>& pairs, int d, int d0,
                                     const SolverOptions& solver = {},
                                     std::size_t subset_budget = 100000);
SubsetSearchResult erm_subset_search(const PairCounts& counts, int d0,
                                     const SolverOptions& solver = {},
                                     std::size_t subset_budget = 100000);

struct FeatureSelection {
    std::vector<int> features;           // selected original features, sorted
    std::vector<double> aggregate_weights;  // sum of |w| over the 4 blocks, per selected feature
    double lambda = 0.0;
    bool warning = false;                // bisection failed to land in the target band
};

// L1 path over the full feature set: bisects lambda until the number of
// original features with any nonzero block lands in target +/- slack.
FeatureSelection l1_select(const std::vector<LabeledPair>& pairs, int d, int target_count,
                           int count_slack, const SolverOptions& solver = {},
                           int max_rounds = 60);

// |found intersect truth|.
int recovery_score(const std::vector<int>& found, const std::vector<int>& truth);

}  // namespace ocp
