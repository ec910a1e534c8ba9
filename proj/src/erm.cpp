#include "ocp/erm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace ocp {

PairCounts PairCounts::from_pairs(const std::vector<LabeledPair>& pairs, int d) {
    if (d > 13) throw BudgetExceeded("pair count table over " + std::to_string(d) + " features");
    PairCounts pc;
    pc.d = d;
    pc.counts.assign(std::size_t{2} << (2 * d), 0.0);
    const std::size_t half = pc.counts.size() / 2;
    for (const auto& p : pairs) {
        std::uint32_t v1 = 0, v2 = 0;
        for (int j = 0; j < d; ++j) {
            v1 |= static_cast<std::uint32_t>(p.x_first[j]) << j;
            v2 |= static_cast<std::uint32_t>(p.x_second[j]) << j;
        }
        pc.counts[(p.y > 0 ? half : 0) + ((static_cast<std::size_t>(v1) << d) | v2)] += 1.0;
    }
    return pc;
}

PairCounts PairCounts::project(const std::vector<int>& subset) const {
    const int k = static_cast<int>(subset.size());
    PairCounts out;
    out.d = k;
    out.counts.assign(std::size_t{2} << (2 * k), 0.0);
    const std::size_t half_in = counts.size() / 2;
    const std::size_t half_out = out.counts.size() / 2;
    const std::uint32_t n = std::uint32_t{1} << d;
    for (int yi = 0; yi < 2; ++yi) {
        for (std::uint32_t v1 = 0; v1 < n; ++v1) {
            std::uint32_t p1 = 0;
            for (int i = 0; i < k; ++i) p1 |= ((v1 >> subset[i]) & 1u) << i;
            for (std::uint32_t v2 = 0; v2 < n; ++v2) {
                const double c = counts[yi * half_in + ((static_cast<std::size_t>(v1) << d) | v2)];
                if (c == 0.0) continue;
                std::uint32_t p2 = 0;
                for (int i = 0; i < k; ++i) p2 |= ((v2 >> subset[i]) & 1u) << i;
                out.counts[yi * half_out + ((static_cast<std::size_t>(p1) << k) | p2)] += c;
            }
        }
    }
    return out;
}

Dataset PairCounts::to_dataset() const {
    Dataset data;
    data.dim = 4 * d;
    const std::size_t half = counts.size() / 2;
    for (std::size_t idx = 0; idx < half; ++idx) {
        const double c_neg = counts[idx];
        const double c_pos = counts[half + idx];
        if (c_neg == 0.0 && c_pos == 0.0) continue;
        const std::uint32_t v1 = static_cast<std::uint32_t>(idx >> d);
        const std::uint32_t v2 = static_cast<std::uint32_t>(idx) & ((std::uint32_t{1} << d) - 1);
        const auto f = featurize_bits(v1, v2, d);
        if (c_neg > 0.0) data.push(f, -1, c_neg);
        if (c_pos > 0.0) data.push(f, +1, c_pos);
    }
    return data;
}

double PairCounts::total() const {
    double t = 0.0;
    for (double c : counts) t += c;
    return t;
}

std::vector<std::vector<int>> enumerate_subsets(int d, int k) {
    if (k < 0 || k > d) throw std::invalid_argument("subset size out of range");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == d - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

namespace {

struct SparseCount {
    std::uint32_t v1, v2;
    int y;
    double c;
};

}  // namespace

SubsetSearchResult erm_subset_search(const PairCounts& counts, int d0,
                                     const SolverOptions& solver, std::size_t subset_budget) {
    const auto subsets = enumerate_subsets(counts.d, d0);
    if (subsets.size() > subset_budget)
        throw BudgetExceeded("subset search over " + std::to_string(subsets.size()) +
                             " candidates exceeds the budget");
    const int d = counts.d;
    // Sparse view of the aggregated sample; the hot path below touches only
    // value pairs that actually occurred.
    std::vector<SparseCount> sparse;
    const std::size_t half = counts.counts.size() / 2;
    for (std::size_t idx = 0; idx < counts.counts.size(); ++idx) {
        const double c = counts.counts[idx];
        if (c == 0.0) continue;
        const std::size_t pair_idx = idx % half;
        sparse.push_back({static_cast<std::uint32_t>(pair_idx >> d),
                          static_cast<std::uint32_t>(pair_idx) & ((std::uint32_t{1} << d) - 1),
                          idx < half ? -1 : 1, c});
    }

    SubsetSearchResult best;
    best.empirical_risk = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> ext(std::size_t{1} << d);
    for (const auto& subset : subsets) {
        const int k = d0;
        for (std::uint32_t v = 0; v < ext.size(); ++v) {
            std::uint32_t p = 0;
            for (int i = 0; i < k; ++i) p |= ((v >> subset[i]) & 1u) << i;
            ext[v] = p;
        }
        PairCounts small;
        small.d = k;
        small.counts.assign(std::size_t{2} << (2 * k), 0.0);
        const std::size_t small_half = small.counts.size() / 2;
        for (const auto& s : sparse) {
            const std::size_t pi = (static_cast<std::size_t>(ext[s.v1]) << k) | ext[s.v2];
            small.counts[(s.y > 0 ? small_half : 0) + pi] += s.c;
        }
        const Dataset data = small.to_dataset();
        const LinearModel model = train_logistic(data, solver.reg, solver.tol, solver.max_iter);
        const double risk = zero_one_risk(data, model);
        if (risk < best.empirical_risk) {
            best.empirical_risk = risk;
            best.subset = subset;
        }
    }
    return best;
}

SubsetSearchResult erm_subset_search(const std::vector<LabeledPair>& pairs, int d, int d0,
                                     const SolverOptions& solver, std::size_t subset_budget) {
    if (pairs.empty()) throw std::invalid_argument("empty pair sample");
    return erm_subset_search(PairCounts::from_pairs(pairs, d), d0, solver, subset_budget);
}

namespace {

// Features with any of their 4 blocks nonzero.
std::vector<int> selected_features(const LinearModel& m, int d) {
    std::vector<int> out;
    for (int j = 0; j < d; ++j) {
        bool nz = false;
        for (int blk = 0; blk < 4; ++blk)
            if (m.weights[blk * d + j] != 0.0) nz = true;
        if (nz) out.push_back(j);
    }
    return out;
}

}  // namespace

FeatureSelection l1_select(const std::vector<LabeledPair>& pairs, int d, int target_count,
                           int count_slack, const SolverOptions& solver, int max_rounds) {
    if (target_count < 1) throw std::invalid_argument("target_count must be >= 1");
    const Dataset data = PairCounts::from_pairs(pairs, d).to_dataset();
    const Regularization::Kind l1 = Regularization::Kind::L1;

    auto fit = [&](double lambda) {
        return train_logistic(data, {l1, lambda}, solver.tol, solver.max_iter);
    };

    // Bracket: lo keeps at least target features, hi drops below target.
    double lo = 1e-10, hi = 1.0;
    LinearModel m_hi = fit(hi);
    int rounds = 0;
    while (static_cast<int>(selected_features(m_hi, d).size()) > target_count && rounds++ < 20) {
        hi *= 8.0;
        m_hi = fit(hi);
    }

    FeatureSelection best;
    int best_dist = std::numeric_limits<int>::max();
    auto consider = [&](double lambda, const LinearModel& m) {
        const auto feats = selected_features(m, d);
        const int dist = std::abs(static_cast<int>(feats.size()) - target_count);
        if (dist < best_dist) {
            best_dist = dist;
            best.features = feats;
            best.lambda = lambda;
            best.aggregate_weights.clear();
            for (int j : feats) {
                double agg = 0.0;
                for (int blk = 0; blk < 4; ++blk) agg += std::abs(m.weights[blk * d + j]);
                best.aggregate_weights.push_back(agg);
            }
        }
    };
    consider(hi, m_hi);
    consider(lo, fit(lo));

    for (int r = 0; r < max_rounds && best_dist > count_slack; ++r) {
        const double mid = std::sqrt(lo * hi);  // geometric bisection
        const LinearModel m = fit(mid);
        const int count = static_cast<int>(selected_features(m, d).size());
        consider(mid, m);
        if (count > target_count)
            lo = mid;
        else
            hi = mid;
    }
    best.warning = best_dist > count_slack;
    return best;
}

int recovery_score(const std::vector<int>& found, const std::vector<int>& truth) {
    const std::set<int> t(truth.begin(), truth.end());
    int score = 0;
    for (int f : found) score += t.count(f) ? 1 : 0;
    return score;
}

}  // namespace ocp
