#include "ocp/pair_table.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace ocp {

namespace {

// One entry of a group's contribution: value masks already scattered into the
// positions of the requested subset, at t1 and t2 respectively.
struct GroupEntry {
    std::uint32_t v1 = 0;
    std::uint32_t v2 = 0;
    double p = 1.0;
};

struct GroupMembers {
    std::vector<int> driver_positions;           // subset positions carrying the root column
    std::vector<std::pair<int, double>> noisy;   // (subset position, epsilon)
};

// Distribution over (root column at t1, root column at t2) for the driver
// identified by `root`, from exhaustive enumeration of activation (and, for
// the violation knob, deactivation) outcomes.
std::array<double, 4> root_pair_law(const DistributionSpec& spec, int root, int t1, int t2) {
    const auto& dr = spec.drivers[root];
    const int tau = spec.tau;
    const double p = dr.activation_prob;
    const double q = dr.deactivation_prob;
    std::array<double, 4> law{};  // index r1 * 2 + r2
    law[0] += 1.0 - p;            // never activates
    for (int a = 0; a < tau; ++a) {
        const double base = p / tau;
        if (q == 0.0) {
            const int r1 = a <= t1 ? 1 : 0;
            const int r2 = a <= t2 ? 1 : 0;
            law[r1 * 2 + r2] += base;
        } else {
            double survive = 1.0;
            for (int off = a + 1; off < tau; ++off) {
                const double pr = base * survive * q;  // off at time `off`
                const int r1 = (a <= t1 && t1 < off) ? 1 : 0;
                const int r2 = (a <= t2 && t2 < off) ? 1 : 0;
                law[r1 * 2 + r2] += pr;
                survive *= 1.0 - q;
            }
            const int r1 = a <= t1 ? 1 : 0;  // stays on through the horizon
            const int r2 = a <= t2 ? 1 : 0;
            law[r1 * 2 + r2] += base * survive;
        }
    }
    return law;
}

std::array<double, 2> root_single_law(const DistributionSpec& spec, int root, int t) {
    const auto pair = root_pair_law(spec, root, t, t);
    return {pair[0] + pair[1], pair[2] + pair[3]};
}

// Expands the noisy members of a driver group around a fixed root outcome.
void expand_noisy(const GroupMembers& gm, std::uint32_t base1, std::uint32_t base2, double base_p,
                  int r1, int r2, bool same_time, std::vector<GroupEntry>& out) {
    std::vector<GroupEntry> cur{{base1, base2, base_p}};
    for (const auto& [pos, eps] : gm.noisy) {
        std::vector<GroupEntry> next;
        next.reserve(cur.size() * (same_time ? 2 : 4));
        const double agree1 = 1.0 - eps;
        for (const auto& e : cur) {
            if (same_time) {
                for (int c = 0; c < 2; ++c) {
                    const double pc = (c == r1) ? agree1 : eps;
                    next.push_back({e.v1 | (static_cast<std::uint32_t>(c) << pos),
                                    e.v2 | (static_cast<std::uint32_t>(c) << pos), e.p * pc});
                }
            } else {
                for (int c1 = 0; c1 < 2; ++c1) {
                    const double p1 = (c1 == r1) ? agree1 : eps;
                    for (int c2 = 0; c2 < 2; ++c2) {
                        const double p2 = (c2 == r2) ? agree1 : eps;
                        next.push_back({e.v1 | (static_cast<std::uint32_t>(c1) << pos),
                                        e.v2 | (static_cast<std::uint32_t>(c2) << pos),
                                        e.p * p1 * p2});
                    }
                }
            }
        }
        cur = std::move(next);
    }
    out.insert(out.end(), cur.begin(), cur.end());
}

std::vector<GroupEntry> driver_group_entries(const DistributionSpec& spec, int root,
                                             const GroupMembers& gm, int t1, int t2) {
    const bool same_time = t1 == t2;
    const auto law = root_pair_law(spec, root, t1, t2);
    std::vector<GroupEntry> out;
    for (int r1 = 0; r1 < 2; ++r1) {
        for (int r2 = 0; r2 < 2; ++r2) {
            const double pr = law[r1 * 2 + r2];
            if (pr == 0.0) continue;
            std::uint32_t base1 = 0, base2 = 0;
            for (int pos : gm.driver_positions) {
                base1 |= static_cast<std::uint32_t>(r1) << pos;
                base2 |= static_cast<std::uint32_t>(r2) << pos;
            }
            expand_noisy(gm, base1, base2, pr, r1, r2, same_time, out);
        }
    }
    return out;
}

double markov_marginal(const BackgroundFeature& bf, int t) {
    return 0.5 + (bf.init_prob - 0.5) * std::pow(2.0 * bf.param - 1.0, t);
}

std::vector<GroupEntry> background_entries(const BackgroundFeature& bf, int pos, int t1, int t2) {
    std::vector<GroupEntry> out;
    auto push = [&](int a, int b, double p) {
        if (p <= 0.0) return;
        out.push_back({static_cast<std::uint32_t>(a) << pos, static_cast<std::uint32_t>(b) << pos, p});
    };
    switch (bf.kind) {
        case BackgroundKind::Periodic: {
            const double m1 = (t1 % 2 == 0) ? bf.init_prob : 1.0 - bf.init_prob;
            const int parity = ((t2 - t1) % 2 + 2) % 2;
            push(1, 1 ^ parity, m1);
            push(0, parity, 1.0 - m1);
            break;
        }
        case BackgroundKind::MarkovStay: {
            if (t1 == t2) {
                const double m = markov_marginal(bf, t1);
                push(1, 1, m);
                push(0, 0, 1.0 - m);
                break;
            }
            const int ts = std::min(t1, t2), tl = std::max(t1, t2);
            const double m = markov_marginal(bf, ts);
            const double flip = (1.0 - std::pow(2.0 * bf.param - 1.0, tl - ts)) / 2.0;
            for (int a = 0; a < 2; ++a) {
                const double pa = a ? m : 1.0 - m;
                for (int b = 0; b < 2; ++b) {
                    const double pab = pa * (a == b ? 1.0 - flip : flip);
                    if (t1 < t2)
                        push(a, b, pab);
                    else
                        push(b, a, pab);
                }
            }
            break;
        }
        case BackgroundKind::IIDBernoulli: {
            if (t1 == t2) {
                push(1, 1, bf.param);
                push(0, 0, 1.0 - bf.param);
                break;
            }
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    push(a, b, (a ? bf.param : 1.0 - bf.param) * (b ? bf.param : 1.0 - bf.param));
            break;
        }
    }
    return out;
}

// Root driver index for a (possibly linked) driver.
int root_of(const DistributionSpec& spec, int driver) {
    const int link = spec.drivers[driver].linked_to;
    return link >= 0 ? link : driver;
}

void check_budget(std::size_t k, std::size_t n_pairs, std::size_t budget) {
    if (k > 15 || (std::size_t{1} << (2 * k)) > budget / std::max<std::size_t>(n_pairs, 1))
        throw BudgetExceeded("exact table of " + std::to_string(n_pairs) + " x 4^" +
                             std::to_string(k) + " entries exceeds the configured budget");
}

}  // namespace

std::vector<int> all_features(const DistributionSpec& spec) {
    std::vector<int> idx(spec.num_features());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

std::vector<double> value_pair_table(const DistributionSpec& spec, int t1, int t2,
                                     const std::vector<int>& subset, std::size_t budget) {
    const std::size_t k = subset.size();
    check_budget(k, 1, budget);
    if (t1 < 0 || t1 >= spec.tau || t2 < 0 || t2 >= spec.tau)
        throw std::invalid_argument("window index out of range");

    const int nd = spec.driver_count();
    const int nn = static_cast<int>(spec.noisy.size());

    // Collect per-group restricted members, keyed by root driver; background
    // features form singleton groups.
    std::vector<GroupMembers> driver_groups(spec.drivers.size());
    std::vector<bool> group_used(spec.drivers.size(), false);
    std::vector<std::vector<GroupEntry>> group_entries;
    for (std::size_t pos = 0; pos < subset.size(); ++pos) {
        const int j = subset[pos];
        if (j < 0 || j >= spec.num_features()) throw std::invalid_argument("feature index out of range");
        if (j < nd) {
            const int root = root_of(spec, j);
            driver_groups[root].driver_positions.push_back(static_cast<int>(pos));
            group_used[root] = true;
        } else if (j < nd + nn) {
            const auto& nf = spec.noisy[j - nd];
            const int root = root_of(spec, nf.parent);
            driver_groups[root].noisy.push_back({static_cast<int>(pos), nf.epsilon});
            group_used[root] = true;
        } else {
            group_entries.push_back(
                background_entries(spec.background[j - nd - nn], static_cast<int>(pos), t1, t2));
        }
    }
    for (std::size_t root = 0; root < spec.drivers.size(); ++root) {
        if (group_used[root])
            group_entries.push_back(
                driver_group_entries(spec, static_cast<int>(root), driver_groups[root], t1, t2));
    }

    // Convolve group contributions; groups occupy disjoint bit positions.
    std::vector<double> table(std::size_t{1} << (2 * k), 0.0);
    const std::uint32_t mask = (k == 0) ? 0 : ((std::uint32_t{1} << k) - 1);
    table[0] = 1.0;
    for (const auto& entries : group_entries) {
        std::vector<double> next(table.size(), 0.0);
        for (std::size_t idx = 0; idx < table.size(); ++idx) {
            const double w = table[idx];
            if (w == 0.0) continue;
            const std::uint32_t v1 = static_cast<std::uint32_t>(idx) >> k;
            const std::uint32_t v2 = static_cast<std::uint32_t>(idx) & mask;
            for (const auto& e : entries)
                next[(static_cast<std::size_t>(v1 | e.v1) << k) | (v2 | e.v2)] += w * e.p;
        }
        table = std::move(next);
    }
    return table;
}

std::vector<double> single_time_table(const DistributionSpec& spec, int t,
                                      const std::vector<int>& subset, std::size_t budget) {
    const auto pair = value_pair_table(spec, t, t, subset, budget);
    const std::size_t k = subset.size();
    std::vector<double> out(std::size_t{1} << k, 0.0);
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = pair[(v << k) | v];
    return out;
}

PairDistribution exact_pair_distribution(const DistributionSpec& spec,
                                         const std::vector<WindowPair>& support,
                                         const std::vector<int>& subset, std::size_t budget) {
    if (support.empty()) throw std::invalid_argument("window support must be non-empty");
    check_budget(subset.size(), support.size(), budget);
    PairDistribution dist;
    dist.subset = subset;
    dist.support = support;
    dist.weights.assign(support.size(), 1.0 / static_cast<double>(support.size()));
    dist.tables.reserve(support.size());
    for (const auto& wp : support)
        dist.tables.push_back(value_pair_table(spec, wp.w_first, wp.w_second, subset, budget));
    return dist;
}

}  // namespace ocp
