#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ocp/harness.hpp"
#include "ocp/spec.hpp"

using namespace ocp;

namespace {

SweepConfig tiny_config() {
    SweepConfig c;
    c.spec = DistributionSpec::preset("dist1");
    c.m_grid = {50};
    c.replicates = 1;
    c.master_seed = 5;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("sweep config validation") {
    SweepConfig c = tiny_config();
    c.replicates = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = tiny_config();
    c.m_grid = {100, 50};  // not ascending
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = tiny_config();
    c.m_grid.clear();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = tiny_config();
    c.schemes.clear();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    c = tiny_config();
    c.d0 = 9;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("one replicate, one size: exactly one row per scheme") {
    const SweepResult r = run_sweep(tiny_config());
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) {
        CHECK(row.m == 50);
        CHECK(row.replicate == 0);
        CHECK(row.recovered >= 0);
        CHECK(row.recovered <= 4);
        CHECK(row.subset.size() == 4);
        CHECK(row.wall_time >= 0.0);
    }
    CHECK(r.rows[0].scheme == Scheme::OCP);
    CHECK(r.rows[1].scheme == Scheme::PCL);
    CHECK(r.rows[2].scheme == Scheme::OCPBiased);
}

TEST_CASE("summaries: means, population sd, empty input") {
    SweepResult r;
    for (int i = 0; i < 3; ++i) {
        SweepRow row;
        row.scheme = Scheme::OCP;
        row.m = 100;
        row.replicate = i;
        row.recovered = 4;
        r.rows.push_back(row);
    }
    auto s = summarize(r);
    REQUIRE(s.size() == 1);
    CHECK(s[0].mean == 4.0);
    CHECK(s[0].sd == 0.0);
    CHECK(s[0].count == 3);

    r.rows.resize(2);
    r.rows[0].recovered = 3;
    r.rows[1].recovered = 4;
    s = summarize(r);
    CHECK(s[0].mean == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(s[0].sd == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(summarize(SweepResult{}), std::invalid_argument);
}

TEST_CASE("sweeps are byte-reproducible across worker counts") {
    SweepConfig c = tiny_config();
    c.m_grid = {50, 100};
    c.replicates = 3;
    c.threads = 1;
    const SweepResult a = run_sweep(c);
    c.threads = 4;
    const SweepResult b = run_sweep(c);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        REQUIRE(a.rows[i].subset == b.rows[i].subset);
        REQUIRE(a.rows[i].recovered == b.rows[i].recovered);
    }
    std::ostringstream csv_a, csv_b, sum_a, sum_b;
    write_sweep_csv(csv_a, a);
    write_sweep_csv(csv_b, b);
    CHECK(csv_a.str() == csv_b.str());
    write_summary_csv(sum_a, summarize(a));
    write_summary_csv(sum_b, summarize(b));
    CHECK(sum_a.str() == sum_b.str());

    std::istringstream in(csv_a.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "scheme,m,replicate,recovered,subset");
}

TEST_CASE("extending the m grid preserves existing cells") {
    SweepConfig c = tiny_config();
    c.replicates = 2;
    c.m_grid = {50};
    const SweepResult small = run_sweep(c);
    c.m_grid = {50, 100};
    const SweepResult big = run_sweep(c);
    // Rows are (scheme, m, replicate) ordered; m=50 rows of `big` must match.
    for (std::size_t s = 0; s < 3; ++s)
        for (int rep = 0; rep < 2; ++rep) {
            const auto& a = small.rows[s * 2 + rep];
            const auto& b = big.rows[s * 4 + rep];
            REQUIRE(a.m == 50);
            REQUIRE(b.m == 50);
            REQUIRE(a.subset == b.subset);
        }
}

TEST_CASE("failed sweeps flush partial rows with a resume marker") {
    SweepConfig c;
    c.spec.tau = 4;
    for (int i = 0; i < 14; ++i) c.spec.background.push_back({BackgroundKind::IIDBernoulli, 0.5});
    c.spec.drivers.push_back({0.5});
    c.d0 = 1;
    c.m_grid = {10};
    c.replicates = 1;
    c.out_path = "partial_probe.csv";
    CHECK_THROWS_AS(run_sweep(c), BudgetExceeded);
    const std::string flushed = slurp("partial_probe.csv.partial");
    CHECK(flushed.find("# resume") != std::string::npos);
    std::remove("partial_probe.csv.partial");
}

TEST_CASE("quick run-all bundle writes the full file set") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ocp_runall_probe";
    fs::remove_all(dir);
    RunAllOptions opts;
    opts.out_dir = dir.string();
    opts.master_seed = 3;
    opts.quick = true;
    opts.check = false;
    CHECK(run_all(opts));
    for (const char* f :
         {"sweep_dist1.csv", "summary_dist1.csv", "sweep_dist2.csv", "summary_dist2.csv",
          "oracle_dist1.csv", "oracle_dist2.csv", "bound_dist1_ocp.json",
          "bound_dist2_ocp_biased.json", "downstream_dist1.csv", "downstream_summary_dist1.csv",
          "manifest.json"})
        CHECK_MESSAGE(fs::exists(dir / f), f);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["master_seed"] == 3);
    CHECK(manifest["checks"].is_array());
    CHECK(manifest["wall_time_seconds"].get<double>() > 0.0);
    fs::remove_all(dir);
}
