#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "ocp/pair_table.hpp"
#include "ocp/rng.hpp"
#include "ocp/sampling.hpp"
#include "ocp/spec.hpp"

using namespace ocp;

TEST_CASE("scheme names round trip") {
    for (Scheme s : {Scheme::OCP, Scheme::PCL, Scheme::OCPBiased, Scheme::PatientContrastive})
        CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_THROWS_AS(scheme_from_name("nope"), std::invalid_argument);
}

TEST_CASE("window laws: positives shared, negatives per scheme") {
    const int tau = 10;
    const auto pos_ocp = window_law(Scheme::OCP, tau, +1);
    const auto pos_pcl = window_law(Scheme::PCL, tau, +1);
    const auto pos_b = window_law(Scheme::OCPBiased, tau, +1);
    REQUIRE(pos_ocp.size() == 9);
    CHECK(pos_ocp == pos_pcl);
    CHECK(pos_ocp == pos_b);
    for (const auto& [wp, p] : pos_ocp) {
        CHECK(wp.w_second == wp.w_first + 1);
        CHECK(p == doctest::Approx(1.0 / 9).epsilon(1e-15));
    }

    // OCP negatives: the same consecutive pairs reversed.
    for (const auto& [wp, p] : window_law(Scheme::OCP, tau, -1)) {
        CHECK(wp.w_second == wp.w_first - 1);
        CHECK(p == doctest::Approx(1.0 / 9).epsilon(1e-15));
    }

    // PCL negatives: uniform over ordered distinct pairs; consecutive mass 18/90.
    const auto neg_pcl = window_law(Scheme::PCL, tau, -1);
    REQUIRE(neg_pcl.size() == 90);
    double consecutive = 0.0, total = 0.0;
    for (const auto& [wp, p] : neg_pcl) {
        CHECK(wp.w_first != wp.w_second);
        CHECK(p == doctest::Approx(1.0 / 90).epsilon(1e-15));
        total += p;
        if (std::abs(wp.w_first - wp.w_second) == 1) consecutive += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(consecutive == doctest::Approx(0.2).epsilon(1e-13));

    // Biased negatives: consecutive pairs, either order.
    double up = 0.0, down = 0.0;
    for (const auto& [wp, p] : window_law(Scheme::OCPBiased, tau, -1)) {
        REQUIRE(std::abs(wp.w_first - wp.w_second) == 1);
        (wp.w_second > wp.w_first ? up : down) += p;
    }
    CHECK(up == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(down == doctest::Approx(0.5).epsilon(1e-13));

    CHECK_THROWS(window_law(Scheme::PatientContrastive, tau, -1));
}

TEST_CASE("sample_pair structural guarantees") {
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    RngStream rng(41);
    const int n = 20000;
    int positives = 0;
    for (int i = 0; i < n; ++i) {
        const Trajectory traj = sample_trajectory(d1, rng);
        const LabeledPair p = sample_pair(Scheme::OCP, traj, nullptr, rng, i);
        positives += p.y > 0;
        if (p.y > 0)
            REQUIRE(p.w_second == p.w_first + 1);
        else
            REQUIRE(p.w_second == p.w_first - 1);
        // Periodic feature differs across any consecutive pair (index 7).
        REQUIRE(p.x_first[7] != p.x_second[7]);
        REQUIRE(p.source_first == p.source_second);
    }
    const double freq = static_cast<double>(positives) / n;
    CHECK(std::abs(freq - 0.5) <= 4.0 / (2.0 * std::sqrt(double(n))));

    RngStream rng2(43);
    for (int i = 0; i < 5000; ++i) {
        const Trajectory traj = sample_trajectory(d1, rng2);
        const LabeledPair p = sample_pair(Scheme::PCL, traj, nullptr, rng2, i);
        if (p.y > 0)
            REQUIRE(p.w_second == p.w_first + 1);
        else
            REQUIRE(p.w_first != p.w_second);
        const LabeledPair b = sample_pair(Scheme::OCPBiased, traj, nullptr, rng2, i);
        REQUIRE(std::abs(b.w_first - b.w_second) == 1);
        if (b.y > 0) REQUIRE(b.w_second == b.w_first + 1);
    }
}

TEST_CASE("patient-contrastive pairs need a pool; negatives cross trajectories") {
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    RngStream rng(47);
    std::vector<Trajectory> pool;
    for (int i = 0; i < 16; ++i) pool.push_back(sample_trajectory(d1, rng));

    CHECK_THROWS_AS(sample_pair(Scheme::PatientContrastive, pool[0], nullptr, rng, 0),
                    std::invalid_argument);

    for (int i = 0; i < 4000; ++i) {
        const int id = static_cast<int>(rng.uniform_int(pool.size()));
        const LabeledPair p = sample_pair(Scheme::PatientContrastive, pool[id], &pool, rng, id);
        if (p.y > 0) {
            REQUIRE(p.source_first == p.source_second);
            REQUIRE(p.w_second == p.w_first + 1);
        } else {
            REQUIRE(p.source_first != p.source_second);
        }
    }
}

TEST_CASE("positive window frequencies match the shared law") {
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    std::map<Scheme, std::vector<int>> hist;
    RngStream rng(53);
    const int n = 30000;
    for (Scheme s : {Scheme::OCP, Scheme::PCL, Scheme::OCPBiased}) {
        auto& h = hist[s];
        h.assign(9, 0);
        int got = 0;
        while (got < n) {
            const Trajectory traj = sample_trajectory(d1, rng);
            const LabeledPair p = sample_pair(s, traj, nullptr, rng, got);
            if (p.y > 0) {
                ++h[p.w_first];
                ++got;
            }
        }
    }
    for (const auto& [s, h] : hist)
        for (int w = 0; w < 9; ++w) {
            const double freq = static_cast<double>(h[w]) / n;
            const double se = std::sqrt((1.0 / 9) * (8.0 / 9) / n);
            REQUIRE(std::abs(freq - 1.0 / 9) <= 4 * se);
        }
}

TEST_CASE("scheme_pair_law closed forms and label prior") {
    // OCP over a single periodic feature, tau=2: four equal quarters.
    DistributionSpec periodic;
    periodic.tau = 2;
    periodic.background.push_back({BackgroundKind::Periodic, 0.0});
    const LabeledValueLaw law = scheme_pair_law(Scheme::OCP, periodic, {0});
    CHECK(law.at(+1, 0, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(law.at(+1, 1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(law.at(-1, 0, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(law.at(-1, 1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(law.at(+1, 0, 0) == doctest::Approx(0.0).epsilon(1e-15));

    // Label prior is exactly 1/2 on dist1 restricted to S.
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    const LabeledValueLaw ls = scheme_pair_law(Scheme::OCP, d1, {0, 1, 2, 3});
    double pos = 0.0, total = 0.0;
    for (std::uint32_t v = 0; v < 16; ++v)
        for (std::uint32_t vp = 0; vp < 16; ++vp) {
            pos += ls.at(+1, v, vp);
            total += ls.at(+1, v, vp) + ls.at(-1, v, vp);
        }
    CHECK(pos == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

    // PCL positives never agree on the periodic feature.
    const LabeledValueLaw lp = scheme_pair_law(Scheme::PCL, d1, {7});
    CHECK(lp.at(+1, 0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(lp.at(+1, 1, 1) == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS(scheme_pair_law(Scheme::PatientContrastive, d1, {0}));
}

TEST_CASE("scheme_pair_law equals manual mixing of exact pair tables") {
    const DistributionSpec d2 = DistributionSpec::preset("dist2");
    const std::vector<int> U{0, 2, 5, 6};
    const int k = 4;
    for (Scheme s : {Scheme::OCP, Scheme::PCL, Scheme::OCPBiased}) {
        const LabeledValueLaw law = scheme_pair_law(s, d2, U);
        for (int y : {-1, +1}) {
            std::vector<double> manual(std::size_t{1} << (2 * k), 0.0);
            for (const auto& [wp, wprob] : window_law(s, d2.tau, y)) {
                const auto table = value_pair_table(d2, wp.w_first, wp.w_second, U);
                for (std::size_t i = 0; i < table.size(); ++i)
                    manual[i] += 0.5 * wprob * table[i];
            }
            for (std::uint32_t v = 0; v < 16; ++v)
                for (std::uint32_t vp = 0; vp < 16; ++vp)
                    REQUIRE(std::abs(law.at(y, v, vp) - manual[(v << k) | vp]) <= 1e-12);
        }
    }
}

TEST_CASE("sampled pair values track the exact law") {
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    const std::vector<int> U{2, 7};
    const LabeledValueLaw law = scheme_pair_law(Scheme::OCPBiased, d1, U);
    RngStream rng(59);
    const int n = 200000;
    std::vector<double> counts(32, 0.0);
    for (int i = 0; i < n; ++i) {
        const Trajectory traj = sample_trajectory(d1, rng);
        const LabeledPair p = sample_pair(Scheme::OCPBiased, traj, nullptr, rng, i);
        std::uint32_t v = 0, vp = 0;
        for (int b = 0; b < 2; ++b) {
            v |= static_cast<std::uint32_t>(p.x_first[U[b]]) << b;
            vp |= static_cast<std::uint32_t>(p.x_second[U[b]]) << b;
        }
        counts[(p.y > 0 ? 16 : 0) + (v << 2 | vp)] += 1.0;
    }
    int fails = 0;
    for (int y : {-1, +1})
        for (std::uint32_t v = 0; v < 4; ++v)
            for (std::uint32_t vp = 0; vp < 4; ++vp) {
                const double p = law.at(y, v, vp);
                const double hat = counts[(y > 0 ? 16 : 0) + (v << 2 | vp)] / n;
                const double se = std::sqrt(std::max(p * (1 - p) / n, 1e-18));
                if (std::abs(hat - p) > 3 * se) ++fails;
            }
    CHECK(fails <= 2);
}

TEST_CASE("pairs CSV layout") {
    const DistributionSpec d1 = DistributionSpec::preset("dist1");
    RngStream rng(61);
    const Trajectory traj = sample_trajectory(d1, rng);
    std::vector<LabeledPair> pairs{sample_pair(Scheme::OCP, traj, nullptr, rng, 0)};
    std::ostringstream out;
    write_pairs_csv(out, pairs);
    std::istringstream in(out.str());
    std::string header, line;
    std::getline(in, header);
    CHECK(header.substr(0, 34) == "scheme,y,w_first,w_second,x_first_");
    std::getline(in, line);
    CHECK(line.substr(0, 4) == "ocp,");
    // Windows are 1-based in exports.
    const auto& p = pairs[0];
    CHECK(line.find("," + std::to_string(p.w_first + 1) + "," +
                    std::to_string(p.w_second + 1) + ",") != std::string::npos);
}
