#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ocp/erm.hpp"
#include "ocp/logistic.hpp"
#include "ocp/spec.hpp"

namespace ocp {

class RngStream;

// Synthetic downstream task: label = 1 iff at least `threshold` of the target
// features are active, flipped independently with probability `label_noise`.
// The Bayes classifier is a function of the target features and its risk is
// exactly `label_noise`.
struct DownstreamTask {
    std::vector<int> target_subset;  // ground-truth S, sorted
    int threshold = 1;
    double label_noise = 0.0;

    void validate(int d) const;
    int clean_label(std::uint32_t target_bits) const;  // rule on packed target values
};

struct LabeledExample {
    std::vector<std::uint8_t> x;  // full feature vector X^T
    int y = 0;                    // downstream label in {0,1}
};

// One (X^T, Y^T) per trajectory, T uniform.
std::vector<LabeledExample> make_labeled_dataset(const DistributionSpec& spec,
                                                 const DownstreamTask& task, int n,
                                                 RngStream& rng);

// Logistic fit over the raw restricted feature vector (downstream
// featurization, not the pair featurization). Labels {0,1} map to {-1,+1}.
LinearModel finetune(const std::vector<int>& representation,
                     const std::vector<LabeledExample>& data, const SolverOptions& solver = {});

struct DirectErmResult {
    LinearModel model;
    std::vector<int> subset;
    double empirical_risk = 1.0;
};

// Exhaustive subset search minimizing empirical downstream 0-1 risk,
// lexicographic ties.
DirectErmResult direct_erm(const std::vector<LabeledExample>& data, int d, int d0,
                           const SolverOptions& solver = {}, std::size_t subset_budget = 100000);

// Exact downstream 0-1 risk R(f, g) of `model` over `subset`, from the
// per-time marginal law of the features (T uniform), including label noise.
double exact_downstream_risk(const LinearModel& model, const std::vector<int>& subset,
                             const DistributionSpec& spec, const DownstreamTask& task,
                             std::size_t budget = kDefaultTableBudget);

// Exact risk of the task's Bayes rule (equals label_noise) and of constant
// classifiers; used for calibration checks.
double exact_rule_risk(const DistributionSpec& spec, const DownstreamTask& task,
                       std::size_t budget = kDefaultTableBudget);

struct ExcessRiskRow {
    int n = 0;
    int replicate = 0;
    std::string learner;  // "pretrain" or "direct"
    std::vector<int> subset;
    double exact_risk = 0.0;
    double excess = 0.0;
};

// Pretrain-then-finetune vs direct ERM comparison at varying labeled sizes.
std::vector<ExcessRiskRow> excess_risk_curves(const DistributionSpec& spec,
                                              const DownstreamTask& task, Scheme scheme,
                                              int m_unlabeled, const std::vector<int>& n_grid,
                                              int replicates, std::uint64_t master_seed,
                                              const SolverOptions& solver = {}, int threads = 0);

void write_excess_csv(std::ostream& out, const std::vector<ExcessRiskRow>& rows);

// Per-n means and the fraction of replicates where the pretrained learner does
// at least as well as direct ERM (tolerance 1e-12 on the exact risks).
struct ExcessSummaryRow {
    int n = 0;
    double mean_pretrain = 0.0;
    double mean_direct = 0.0;
    double win_rate = 0.0;
    int count = 0;
};

std::vector<ExcessSummaryRow> summarize_excess(const std::vector<ExcessRiskRow>& rows);
void write_excess_summary_csv(std::ostream& out, const std::vector<ExcessSummaryRow>& rows);

}  // namespace ocp
