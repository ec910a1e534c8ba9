#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ocp/sampling.hpp"
#include "ocp/spec.hpp"

namespace ocp {

// Exact population quantities for one (scheme, spec, subset) triple.
struct RiskReport {
    Scheme scheme = Scheme::OCP;
    std::vector<int> subset;
    double err_U = 0.0;   // exact Bayes 0-1 risk using features U
    double err_S = 0.0;   // baseline risk of the true driver set
    double excess = 0.0;  // err_U - err_S
    // E[m_U] (OCP) or E[m'_U] (OCP-biased); unset for PCL.
    std::optional<double> m_expectation;
    // Decomposition cross-check value: err(S) + E[m], when applicable.
    std::optional<double> decomposed_err;
    double prob_s_equal = 0.0;  // P[X^W_S = X^{W'}_S] under the scheme's window law
};

struct BoundReport {
    double epsilon0 = 0.0;
    double m_bound = 0.0;  // required unlabeled sample count, natural log
    int d = 0;
    int d0 = 0;
    double delta = 0.0;
    double vc_f = 0.0;  // reported VC(F), display-only input for the labeled rate
};

void to_json(nlohmann::json& j, const BoundReport& r);

// Exact Bayes 0-1 risk of the contrastive task restricted to `subset`,
// computed generically from the joint (Z_U, Y) law; for OCP and OCP-biased
// also evaluates the confusion-mass decomposition as a cross-check.
RiskReport population_risk(Scheme scheme, const DistributionSpec& spec,
                           const std::vector<int>& subset,
                           std::size_t budget = kDefaultTableBudget);

struct OptimalSubsetResult {
    std::vector<int> subset;
    double err = 0.0;
    bool is_unique = false;
    double gap_to_second = 0.0;
};

// Exhaustive argmin of population risk over all size-d0 subsets. Uniqueness is
// decided with tolerance 1e-10 on the gap to the runner-up.
OptimalSubsetResult optimal_subset(Scheme scheme, const DistributionSpec& spec, int d0,
                                   std::size_t budget = kDefaultTableBudget);

// min over subsets U with S not contained in U of err(U) - err(S).
double epsilon_zero(Scheme scheme, const DistributionSpec& spec, int d0,
                    std::size_t budget = kDefaultTableBudget);

// Theorem-style unlabeled sample bound 2(ln C(d,d0) + ln(4/delta)) / epsilon0^2.
double unlabeled_sample_bound(double epsilon0, int d, int d0, double delta);

// E[m_U] (variant OCP) or E[m'_U] (variant OCPBiased) for a subset.
double m_expectation(const DistributionSpec& spec, const std::vector<int>& subset, Scheme variant,
                     std::size_t budget = kDefaultTableBudget);

// Risk reports for all size-d0 subsets, in lexicographic subset order.
std::vector<RiskReport> risk_table(Scheme scheme, const DistributionSpec& spec, int d0,
                                   std::size_t budget = kDefaultTableBudget);

double log_binomial(int n, int k);

}  // namespace ocp
