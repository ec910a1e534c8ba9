#include "ocp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "ocp/erm.hpp"
#include "ocp/pair_table.hpp"

namespace ocp {

namespace {

// Relation of the S-patterns of a value pair.
enum class SRel { Equal, Up, Down, Incomparable };

SRel s_relation(std::uint32_t s1, std::uint32_t s2) {
    if (s1 == s2) return SRel::Equal;
    if ((s1 & ~s2) == 0) return SRel::Up;
    if ((s2 & ~s1) == 0) return SRel::Down;
    return SRel::Incomparable;
}

// Bit-extraction table: ext[v] = bits of v at the given positions, packed.
std::vector<std::uint32_t> extraction_table(int d, const std::vector<int>& positions) {
    std::vector<std::uint32_t> ext(std::size_t{1} << d, 0);
    for (std::uint32_t v = 0; v < ext.size(); ++v) {
        std::uint32_t p = 0;
        for (std::size_t i = 0; i < positions.size(); ++i)
            p |= ((v >> positions[i]) & 1u) << i;
        ext[v] = p;
    }
    return ext;
}

RiskReport report_from_law(const LabeledValueLaw& law, Scheme scheme,
                           const std::vector<int>& drivers, const std::vector<int>& subset) {
    const int d = law.bits();
    const int k = static_cast<int>(subset.size());
    const int ks = static_cast<int>(drivers.size());
    const auto ext_u = extraction_table(d, subset);
    const auto ext_s = extraction_table(d, drivers);

    const std::size_t pair_count = std::size_t{1} << (2 * k);
    std::vector<double> mass_neg(pair_count, 0.0), mass_pos(pair_count, 0.0);
    std::vector<double> up_mass(pair_count, 0.0), down_mass(pair_count, 0.0);
    std::vector<double> s_mass_neg(std::size_t{1} << (2 * ks), 0.0),
        s_mass_pos(std::size_t{1} << (2 * ks), 0.0);
    double p_eq = 0.0, p_up = 0.0;

    const std::uint32_t n = std::uint32_t{1} << d;
    const std::size_t half = law.p.size() / 2;
    for (std::uint32_t v1 = 0; v1 < n; ++v1) {
        for (std::uint32_t v2 = 0; v2 < n; ++v2) {
            const std::size_t idx = (static_cast<std::size_t>(v1) << d) | v2;
            const double pn = law.p[idx];
            const double pp = law.p[half + idx];
            if (pn == 0.0 && pp == 0.0) continue;
            const std::size_t u_idx =
                (static_cast<std::size_t>(ext_u[v1]) << k) | ext_u[v2];
            mass_neg[u_idx] += pn;
            mass_pos[u_idx] += pp;
            const std::uint32_t s1 = ext_s[v1], s2 = ext_s[v2];
            s_mass_neg[(static_cast<std::size_t>(s1) << ks) | s2] += pn;
            s_mass_pos[(static_cast<std::size_t>(s1) << ks) | s2] += pp;
            switch (s_relation(s1, s2)) {
                case SRel::Equal: p_eq += pn + pp; break;
                case SRel::Up:
                    p_up += pn + pp;
                    up_mass[u_idx] += pn + pp;
                    break;
                case SRel::Down: down_mass[u_idx] += pn + pp; break;
                case SRel::Incomparable: break;
            }
        }
    }

    RiskReport report;
    report.scheme = scheme;
    report.subset = subset;
    report.prob_s_equal = p_eq;
    for (std::size_t i = 0; i < pair_count; ++i)
        report.err_U += std::min(mass_neg[i], mass_pos[i]);
    for (std::size_t i = 0; i < s_mass_neg.size(); ++i)
        report.err_S += std::min(s_mass_neg[i], s_mass_pos[i]);
    report.excess = report.err_U - report.err_S;

    if (scheme == Scheme::OCP || scheme == Scheme::OCPBiased) {
        // E[m_U] / E[m'_U]: confusion mass restricted to value pairs that
        // agree on the observed part of S.
        std::uint32_t us_mask = 0;
        for (int i = 0; i < k; ++i)
            if (std::find(drivers.begin(), drivers.end(), subset[i]) != drivers.end())
                us_mask |= std::uint32_t{1} << i;
        const double up_factor = scheme == Scheme::OCPBiased ? 1.0 / 3.0 : 1.0;
        double m = 0.0;
        for (std::size_t i = 0; i < pair_count; ++i) {
            const std::uint32_t p = static_cast<std::uint32_t>(i >> k);
            const std::uint32_t q = static_cast<std::uint32_t>(i) & ((std::uint32_t{1} << k) - 1);
            if ((p & us_mask) != (q & us_mask)) continue;
            m += std::min(up_factor * up_mass[i], down_mass[i]);
        }
        report.m_expectation = m;
        const double base = scheme == Scheme::OCPBiased ? 0.5 * p_eq + p_up / 3.0 : 0.5 * p_eq;
        report.decomposed_err = base + m;
    }
    return report;
}

}  // namespace

RiskReport population_risk(Scheme scheme, const DistributionSpec& spec,
                           const std::vector<int>& subset, std::size_t budget) {
    const auto law = scheme_pair_law(scheme, spec, all_features(spec), budget);
    return report_from_law(law, scheme, spec.driver_indices(), subset);
}

std::vector<RiskReport> risk_table(Scheme scheme, const DistributionSpec& spec, int d0,
                                   std::size_t budget) {
    const auto law = scheme_pair_law(scheme, spec, all_features(spec), budget);
    const auto drivers = spec.driver_indices();
    std::vector<RiskReport> out;
    for (const auto& subset : enumerate_subsets(spec.num_features(), d0))
        out.push_back(report_from_law(law, scheme, drivers, subset));
    return out;
}

OptimalSubsetResult optimal_subset(Scheme scheme, const DistributionSpec& spec, int d0,
                                   std::size_t budget) {
    constexpr double kUniqueTol = 1e-10;
    const auto reports = risk_table(scheme, spec, d0, budget);
    OptimalSubsetResult best;
    best.err = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) {
        if (r.err_U < best.err) {
            second = best.err;
            best.err = r.err_U;
            best.subset = r.subset;
        } else {
            second = std::min(second, r.err_U);
        }
    }
    best.gap_to_second = second - best.err;
    best.is_unique = best.gap_to_second > kUniqueTol;
    return best;
}

double epsilon_zero(Scheme scheme, const DistributionSpec& spec, int d0, std::size_t budget) {
    const auto reports = risk_table(scheme, spec, d0, budget);
    const auto drivers = spec.driver_indices();
    double eps = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) {
        const bool contains_s = std::includes(r.subset.begin(), r.subset.end(),
                                              drivers.begin(), drivers.end());
        if (!contains_s) eps = std::min(eps, r.excess);
    }
    if (!std::isfinite(eps))
        throw std::invalid_argument("no subset of this size can miss part of S");
    return eps;
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double unlabeled_sample_bound(double epsilon0, int d, int d0, double delta) {
    if (!(epsilon0 > 0.0))
        throw std::invalid_argument("epsilon0 must be positive (non-identifiable configuration)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
    if (d0 < 0 || d0 > d) throw std::invalid_argument("d0 must be in [0,d]");
    return 2.0 * (log_binomial(d, d0) + std::log(4.0 / delta)) / (epsilon0 * epsilon0);
}

double m_expectation(const DistributionSpec& spec, const std::vector<int>& subset, Scheme variant,
                     std::size_t budget) {
    if (variant != Scheme::OCP && variant != Scheme::OCPBiased)
        throw std::invalid_argument("m_expectation is defined for OCP and OCP-biased only");
    const auto report = population_risk(variant, spec, subset, budget);
    return *report.m_expectation;
}

void to_json(nlohmann::json& j, const BoundReport& r) {
    j = nlohmann::json{{"epsilon0", r.epsilon0}, {"m_bound", r.m_bound}, {"d", r.d},
                       {"d0", r.d0},             {"delta", r.delta},     {"vc_f", r.vc_f}};
}

}  // namespace ocp
