#include "ocp/downstream.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ocp/erm.hpp"
#include "ocp/pair_table.hpp"
#include "ocp/parallel.hpp"
#include "ocp/rng.hpp"

namespace ocp {

void DownstreamTask::validate(int d) const {
    if (target_subset.empty()) throw std::invalid_argument("downstream task needs a target subset");
    for (int j : target_subset)
        if (j < 0 || j >= d) throw std::invalid_argument("target feature index out of range");
    if (!(label_noise >= 0.0 && label_noise < 0.5))
        throw std::invalid_argument("label_noise must be in [0, 0.5)");
    if (threshold < 0 || threshold > static_cast<int>(target_subset.size()))
        throw std::invalid_argument("threshold out of range");
}

int DownstreamTask::clean_label(std::uint32_t target_bits) const {
    return std::popcount(target_bits) >= threshold ? 1 : 0;
}

std::vector<LabeledExample> make_labeled_dataset(const DistributionSpec& spec,
                                                 const DownstreamTask& task, int n,
                                                 RngStream& rng) {
    if (n < 1) throw std::invalid_argument("dataset size must be >= 1");
    task.validate(spec.num_features());
    std::vector<LabeledExample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Trajectory traj = sample_trajectory(spec, rng);
        const int t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(spec.tau)));
        LabeledExample ex;
        ex.x.resize(static_cast<std::size_t>(traj.d));
        for (int j = 0; j < traj.d; ++j) ex.x[j] = traj.at(t, j);
        ex.y = task.clean_label(traj.pack(t, task.target_subset));
        if (task.label_noise > 0.0 && rng.bernoulli(task.label_noise)) ex.y = 1 - ex.y;
        out.push_back(std::move(ex));
    }
    return out;
}

namespace {

// Counts over (restricted bits, label) -> weighted raw-bit dataset.
Dataset aggregate_examples(const std::vector<LabeledExample>& data,
                           const std::vector<int>& subset) {
    const int k = static_cast<int>(subset.size());
    std::vector<double> counts(std::size_t{2} << k, 0.0);
    const std::size_t half = counts.size() / 2;
    for (const auto& ex : data) {
        std::uint32_t v = 0;
        for (int i = 0; i < k; ++i) v |= static_cast<std::uint32_t>(ex.x[subset[i]]) << i;
        counts[(ex.y ? half : 0) + v] += 1.0;
    }
    Dataset ds;
    ds.dim = k;
    std::vector<double> f(static_cast<std::size_t>(k));
    for (std::size_t v = 0; v < half; ++v) {
        for (int i = 0; i < k; ++i) f[i] = static_cast<double>((v >> i) & 1);
        if (counts[v] > 0.0) ds.push(f, -1, counts[v]);
        if (counts[half + v] > 0.0) ds.push(f, +1, counts[half + v]);
    }
    return ds;
}

}  // namespace

LinearModel finetune(const std::vector<int>& representation,
                     const std::vector<LabeledExample>& data, const SolverOptions& solver) {
    if (data.empty()) throw std::invalid_argument("finetune needs a non-empty dataset");
    const Dataset ds = aggregate_examples(data, representation);
    return train_logistic(ds, solver.reg, solver.tol, solver.max_iter);
}

DirectErmResult direct_erm(const std::vector<LabeledExample>& data, int d, int d0,
                           const SolverOptions& solver, std::size_t subset_budget) {
    if (data.empty()) throw std::invalid_argument("direct_erm needs a non-empty dataset");
    const auto subsets = enumerate_subsets(d, d0);
    if (subsets.size() > subset_budget)
        throw BudgetExceeded("direct ERM over " + std::to_string(subsets.size()) + " subsets");
    DirectErmResult best;
    best.empirical_risk = std::numeric_limits<double>::infinity();
    for (const auto& subset : subsets) {
        const Dataset ds = aggregate_examples(data, subset);
        LinearModel model = train_logistic(ds, solver.reg, solver.tol, solver.max_iter);
        const double risk = zero_one_risk(ds, model);
        if (risk < best.empirical_risk) {
            best.empirical_risk = risk;
            best.subset = subset;
            best.model = std::move(model);
        }
    }
    return best;
}

double exact_downstream_risk(const LinearModel& model, const std::vector<int>& subset,
                             const DistributionSpec& spec, const DownstreamTask& task,
                             std::size_t budget) {
    task.validate(spec.num_features());
    // Joint support: selected features plus the task's target features.
    std::vector<int> joint = subset;
    joint.insert(joint.end(), task.target_subset.begin(), task.target_subset.end());
    std::sort(joint.begin(), joint.end());
    joint.erase(std::unique(joint.begin(), joint.end()), joint.end());
    const int kj = static_cast<int>(joint.size());
    const int k = static_cast<int>(subset.size());

    std::vector<int> subset_pos(k), target_pos(task.target_subset.size());
    for (int i = 0; i < k; ++i)
        subset_pos[i] = static_cast<int>(std::lower_bound(joint.begin(), joint.end(), subset[i]) -
                                         joint.begin());
    for (std::size_t i = 0; i < task.target_subset.size(); ++i)
        target_pos[i] = static_cast<int>(
            std::lower_bound(joint.begin(), joint.end(), task.target_subset[i]) - joint.begin());

    const double eta = task.label_noise;
    double risk = 0.0;
    std::vector<double> f(static_cast<std::size_t>(k));
    for (int t = 0; t < spec.tau; ++t) {
        const auto table = single_time_table(spec, t, joint, budget);
        for (std::uint32_t v = 0; v < (std::uint32_t{1} << kj); ++v) {
            const double p = table[v];
            if (p == 0.0) continue;
            for (int i = 0; i < k; ++i) f[i] = static_cast<double>((v >> subset_pos[i]) & 1);
            const int pred = model.decide(f) > 0 ? 1 : 0;
            std::uint32_t tb = 0;
            for (std::size_t i = 0; i < target_pos.size(); ++i)
                tb |= ((v >> target_pos[i]) & 1u) << i;
            const int clean = task.clean_label(tb);
            risk += p * (pred == clean ? eta : 1.0 - eta);
        }
    }
    return risk / spec.tau;
}

double exact_rule_risk(const DistributionSpec& spec, const DownstreamTask& task,
                       std::size_t budget) {
    LinearModel rule;
    rule.weights.assign(task.target_subset.size(), 1.0);
    rule.bias = 0.5 - task.threshold;
    return exact_downstream_risk(rule, task.target_subset, spec, task, budget);
}

std::vector<ExcessRiskRow> excess_risk_curves(const DistributionSpec& spec,
                                              const DownstreamTask& task, Scheme scheme,
                                              int m_unlabeled, const std::vector<int>& n_grid,
                                              int replicates, std::uint64_t master_seed,
                                              const SolverOptions& solver, int threads) {
    spec.validate();
    task.validate(spec.num_features());
    const int d = spec.num_features();
    const int d0 = static_cast<int>(task.target_subset.size());
    const double bayes = task.label_noise;

    std::vector<std::vector<ExcessRiskRow>> per_rep(static_cast<std::size_t>(replicates));
    parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t r) {
        // Pretraining phase: m trajectories, one pair each, subset ERM.
        RngStream rng_pre = RngStream::derive(master_seed, {0x7072u, r});
        std::vector<LabeledPair> pairs;
        pairs.reserve(static_cast<std::size_t>(m_unlabeled));
        for (int i = 0; i < m_unlabeled; ++i) {
            const Trajectory traj = sample_trajectory(spec, rng_pre);
            pairs.push_back(sample_pair(scheme, traj, nullptr, rng_pre, i));
        }
        const auto pretrain = erm_subset_search(pairs, d, d0, solver);

        for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
            RngStream rng_lab = RngStream::derive(master_seed, {0x6c61u, r, ni});
            const auto data = make_labeled_dataset(spec, task, n_grid[ni], rng_lab);

            const LinearModel ft = finetune(pretrain.subset, data, solver);
            ExcessRiskRow pt;
            pt.n = n_grid[ni];
            pt.replicate = static_cast<int>(r);
            pt.learner = "pretrain";
            pt.subset = pretrain.subset;
            pt.exact_risk = exact_downstream_risk(ft, pretrain.subset, spec, task);
            pt.excess = pt.exact_risk - bayes;
            per_rep[r].push_back(std::move(pt));

            const auto direct = direct_erm(data, d, d0, solver);
            ExcessRiskRow ds;
            ds.n = n_grid[ni];
            ds.replicate = static_cast<int>(r);
            ds.learner = "direct";
            ds.subset = direct.subset;
            ds.exact_risk = exact_downstream_risk(direct.model, direct.subset, spec, task);
            ds.excess = ds.exact_risk - bayes;
            per_rep[r].push_back(std::move(ds));
        }
    });

    // Deterministic assembly: ordered by (n, replicate, learner).
    std::vector<ExcessRiskRow> rows;
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni)
        for (int r = 0; r < replicates; ++r)
            for (std::size_t j = 0; j < per_rep[r].size(); ++j)
                if (per_rep[r][j].n == n_grid[ni]) rows.push_back(per_rep[r][j]);
    return rows;
}

std::vector<ExcessSummaryRow> summarize_excess(const std::vector<ExcessRiskRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("cannot summarize an empty comparison");
    std::vector<ExcessSummaryRow> out;
    // Rows are ordered (n, replicate, pretrain-then-direct).
    std::size_t i = 0;
    while (i < rows.size()) {
        ExcessSummaryRow s;
        s.n = rows[i].n;
        while (i < rows.size() && rows[i].n == s.n) {
            if (i + 1 >= rows.size() || rows[i].learner != "pretrain" ||
                rows[i + 1].learner != "direct" || rows[i].replicate != rows[i + 1].replicate)
                throw std::logic_error("unexpected row ordering in excess-risk table");
            s.mean_pretrain += rows[i].excess;
            s.mean_direct += rows[i + 1].excess;
            if (rows[i].exact_risk <= rows[i + 1].exact_risk + 1e-12) s.win_rate += 1.0;
            ++s.count;
            i += 2;
        }
        s.mean_pretrain /= s.count;
        s.mean_direct /= s.count;
        s.win_rate /= s.count;
        out.push_back(s);
    }
    return out;
}

void write_excess_summary_csv(std::ostream& out, const std::vector<ExcessSummaryRow>& rows) {
    out << "n,mean_excess_pretrain,mean_excess_direct,win_rate_pretrain,count\n";
    char buf[64];
    for (const auto& row : rows) {
        out << row.n << ',';
        std::snprintf(buf, sizeof buf, "%.17g", row.mean_pretrain);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", row.mean_direct);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", row.win_rate);
        out << buf << ',' << row.count << "\n";
    }
}

void write_excess_csv(std::ostream& out, const std::vector<ExcessRiskRow>& rows) {
    out << "n,replicate,learner,subset,exact_risk,excess\n";
    char buf[64];
    for (const auto& row : rows) {
        out << row.n << ',' << row.replicate << ',' << row.learner << ',';
        for (std::size_t i = 0; i < row.subset.size(); ++i)
            out << (i ? ";" : "") << row.subset[i];
        std::snprintf(buf, sizeof buf, "%.17g", row.exact_risk);
        out << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.17g", row.excess);
        out << ',' << buf << "\n";
    }
}

}  // namespace ocp
