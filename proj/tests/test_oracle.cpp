#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ocp/assumptions.hpp"
#include "ocp/erm.hpp"
#include "ocp/oracle.hpp"
#include "ocp/pair_table.hpp"
#include "ocp/rng.hpp"
#include "ocp/sampling.hpp"
#include "ocp/spec.hpp"

using namespace ocp;

namespace {

bool contains_all(const std::vector<int>& u, const std::vector<int>& s) {
    return std::includes(u.begin(), u.end(), s.begin(), s.end());
}

// Independent computation of P[X^W_S = X^{W'}_S] under the positive window law.
double prob_equal_on(const DistributionSpec& spec, const std::vector<int>& S) {
    double p_eq = 0.0;
    for (const auto& [wp, wprob] : window_law(Scheme::OCP, spec.tau, +1)) {
        const auto table = value_pair_table(spec, wp.w_first, wp.w_second, S);
        const int k = static_cast<int>(S.size());
        for (std::uint32_t v = 0; v < (std::uint32_t{1} << k); ++v)
            p_eq += wprob * table[(static_cast<std::size_t>(v) << k) | v];
    }
    return p_eq;
}

DistributionSpec random_valid_spec(RngStream& rng) {
    DistributionSpec s;
    s.tau = 3 + static_cast<int>(rng.uniform_int(3));
    const int nd = 2;
    for (int i = 0; i < nd; ++i) s.drivers.push_back({0.2 + 0.6 * rng.uniform()});
    s.noisy.push_back({static_cast<int>(rng.uniform_int(nd)), 0.1 + 0.8 * rng.uniform()});
    const int kind = static_cast<int>(rng.uniform_int(3));
    if (kind == 0)
        s.background.push_back({BackgroundKind::Periodic, 0.0});
    else if (kind == 1)
        s.background.push_back({BackgroundKind::MarkovStay, 0.1 + 0.8 * rng.uniform()});
    else
        s.background.push_back({BackgroundKind::IIDBernoulli, 0.1 + 0.8 * rng.uniform()});
    return s;
}

}  // namespace

TEST_CASE("toy risks match hand calculations") {
    DistributionSpec toy;
    toy.tau = 2;
    toy.drivers.push_back({1.0});
    const auto r_ocp = population_risk(Scheme::OCP, toy, {0});
    CHECK(r_ocp.err_U == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(r_ocp.err_S == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(r_ocp.prob_s_equal == doctest::Approx(0.5).epsilon(1e-14));

    const auto r_b = population_risk(Scheme::OCPBiased, toy, {0});
    CHECK(r_b.err_U == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("Bayes-risk identity against an independent equality probability") {
    for (const char* name : {"dist1", "dist2"}) {
        const DistributionSpec spec = DistributionSpec::preset(name);
        const auto S = spec.driver_indices();
        const auto r = population_risk(Scheme::OCP, spec, S);
        const double p_eq = prob_equal_on(spec, S);
        CHECK(std::abs(r.err_S - 0.5 * p_eq) <= 1e-12);
        CHECK(std::abs(r.prob_s_equal - p_eq) <= 1e-12);
    }
}

TEST_CASE("decomposition identities over every subset of both presets") {
    for (const char* name : {"dist1", "dist2"}) {
        const DistributionSpec spec = DistributionSpec::preset(name);
        const auto S = spec.driver_indices();
        const int d0 = spec.driver_count();
        for (Scheme scheme : {Scheme::OCP, Scheme::OCPBiased}) {
            for (const auto& r : risk_table(scheme, spec, d0)) {
                REQUIRE(r.m_expectation.has_value());
                REQUIRE(r.decomposed_err.has_value());
                REQUIRE(std::abs(r.err_U - *r.decomposed_err) <= 1e-12);
                REQUIRE(r.err_U >= -1e-15);
                REQUIRE(r.err_U <= 0.5 + 1e-15);
                const bool covers = contains_all(r.subset, S);
                if (covers)
                    REQUIRE(std::abs(*r.m_expectation) <= 1e-14);
                else
                    REQUIRE(*r.m_expectation > 0.0);
            }
        }
        // m'_U <= m_U for matching subsets.
        const auto t_ocp = risk_table(Scheme::OCP, spec, d0);
        const auto t_b = risk_table(Scheme::OCPBiased, spec, d0);
        REQUIRE(t_ocp.size() == t_b.size());
        for (std::size_t i = 0; i < t_ocp.size(); ++i) {
            REQUIRE(t_ocp[i].subset == t_b[i].subset);
            REQUIRE(*t_b[i].m_expectation <= *t_ocp[i].m_expectation + 1e-14);
        }
    }
}

TEST_CASE("optimal subsets: S unique for OCP and biased; PCL prefers the periodic feature") {
    for (const char* name : {"dist1", "dist2"}) {
        const DistributionSpec spec = DistributionSpec::preset(name);
        for (Scheme s : {Scheme::OCP, Scheme::OCPBiased}) {
            const auto opt = optimal_subset(s, spec, spec.driver_count());
            CHECK(opt.subset == spec.driver_indices());
            CHECK(opt.is_unique);
            CHECK(opt.gap_to_second > 1e-6);
        }
    }
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    const auto pcl = optimal_subset(Scheme::PCL, d1, 4);
    CHECK(std::find(pcl.subset.begin(), pcl.subset.end(), 7) != pcl.subset.end());
    CHECK(recovery_score(pcl.subset, d1.driver_indices()) <= 3);
    // A periodic-containing subset strictly beats S under PCL.
    const auto rs = population_risk(Scheme::PCL, d1, d1.driver_indices());
    CHECK(pcl.err < rs.err_U);
}

TEST_CASE("epsilon0: positivity, scheme ordering, degenerate zero") {
    for (const char* name : {"dist1", "dist2"}) {
        const DistributionSpec spec = DistributionSpec::preset(name);
        const double e_ocp = epsilon_zero(Scheme::OCP, spec, spec.driver_count());
        const double e_b = epsilon_zero(Scheme::OCPBiased, spec, spec.driver_count());
        CHECK(e_ocp > 0.0);
        CHECK(e_b > 0.0);
        CHECK(e_ocp > e_b);
    }

    // A driver that never fires is interchangeable with anything constant.
    DistributionSpec degenerate;
    degenerate.tau = 4;
    degenerate.drivers.push_back({0.5});
    degenerate.drivers.push_back({0.0});
    degenerate.background.push_back({BackgroundKind::IIDBernoulli, 0.5});
    const double e0 = epsilon_zero(Scheme::OCP, degenerate, 2);
    CHECK(e0 <= 1e-14);
    CHECK_THROWS_AS(unlabeled_sample_bound(e0, 3, 2, 0.05), std::invalid_argument);
}

TEST_CASE("sample bound formula") {
    CHECK(unlabeled_sample_bound(0.1, 8, 4, 0.05) == doctest::Approx(1726.1).epsilon(1e-4));
    const double b1 = unlabeled_sample_bound(0.05, 10, 3, 0.1);
    const double b2 = unlabeled_sample_bound(0.1, 10, 3, 0.1);
    CHECK(b1 / b2 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(unlabeled_sample_bound(0.1, 8, 4, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(unlabeled_sample_bound(0.0, 8, 4, 0.05), std::invalid_argument);
    CHECK(log_binomial(8, 4) == doctest::Approx(std::log(70.0)).epsilon(1e-12));
}

TEST_CASE("risk table order and m_expectation accessor") {
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    const auto table = risk_table(Scheme::PCL, d1, 4);
    REQUIRE(table.size() == 70);
    const auto subsets = enumerate_subsets(8, 4);
    for (std::size_t i = 0; i < table.size(); ++i) {
        REQUIRE(table[i].subset == subsets[i]);
        REQUIRE_FALSE(table[i].m_expectation.has_value());  // no PCL decomposition
    }
    CHECK(m_expectation(d1, d1.driver_indices(), Scheme::OCP) ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK(m_expectation(d1, {0, 1, 2, 7}, Scheme::OCP) > 0.0);
}

TEST_CASE("Monte Carlo cross-check of the plug-in Bayes risk") {
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    RngStream rng(71);
    const int n = 100000;
    for (const auto& U :
         {std::vector<int>{0, 1, 2, 3}, std::vector<int>{1, 3, 4, 7}, std::vector<int>{2, 5, 6}}) {
        for (Scheme s : {Scheme::OCP, Scheme::PCL, Scheme::OCPBiased}) {
            const auto report = population_risk(s, d1, U);
            const LabeledValueLaw law = scheme_pair_law(s, d1, U);
            const int k = law.bits();
            long long wrong = 0;
            for (int i = 0; i < n; ++i) {
                const Trajectory t = sample_trajectory(d1, rng);
                const LabeledPair p = sample_pair(s, t, nullptr, rng, i);
                std::uint32_t v = 0, vp = 0;
                for (int b = 0; b < k; ++b) {
                    v |= static_cast<std::uint32_t>(p.x_first[U[b]]) << b;
                    vp |= static_cast<std::uint32_t>(p.x_second[U[b]]) << b;
                }
                const int pred = law.at(+1, v, vp) > law.at(-1, v, vp) ? 1 : -1;
                wrong += pred != p.y;
            }
            const double hat = static_cast<double>(wrong) / n;
            const double se = std::sqrt(report.err_U * (1 - report.err_U) / n);
            REQUIRE(std::abs(hat - report.err_U) <= 3 * se + 1e-9);
        }
    }
}

TEST_CASE("OCP and OCP-biased share the argmin on random well-formed specs") {
    RngStream rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        const DistributionSpec spec = random_valid_spec(rng);
        REQUIRE(verify_assumptions(spec).all_hold());
        const int d0 = spec.driver_count();
        const auto a = optimal_subset(Scheme::OCP, spec, d0);
        const auto b = optimal_subset(Scheme::OCPBiased, spec, d0);
        REQUIRE(a.subset == b.subset);
        REQUIRE(a.subset == spec.driver_indices());
    }
}
