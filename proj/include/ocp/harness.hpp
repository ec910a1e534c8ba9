#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ocp/erm.hpp"
#include "ocp/sampling.hpp"
#include "ocp/spec.hpp"

namespace ocp {

struct SweepConfig {
    std::string spec_name = "dist1";
    DistributionSpec spec;
    std::vector<Scheme> schemes{Scheme::OCP, Scheme::PCL, Scheme::OCPBiased};
    std::vector<int> m_grid{50, 100, 200, 400, 600, 800, 1000, 2000, 4000, 8000, 16000};
    int replicates = 100;
    int d0 = 4;
    std::uint64_t master_seed = 1;
    int threads = 0;
    SolverOptions solver{};
    // When set, a failed sweep flushes finished rows to `out_path + ".partial"`
    // with a `# resume <count>` marker before rethrowing.
    std::string out_path;

    void validate() const;
};

struct SweepRow {
    Scheme scheme;
    int m = 0;
    int replicate = 0;
    int recovered = 0;
    std::vector<int> subset;
    double wall_time = 0.0;  // seconds
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (scheme, m, replicate)
};

// Per-(scheme, m, replicate): samples m trajectories, one pair per trajectory,
// runs the exhaustive subset ERM, records |subset intersect S|. Substreams are
// derived per cell so the result is byte-reproducible for any worker count.
SweepResult run_sweep(const SweepConfig& config);

struct SummaryRow {
    Scheme scheme;
    int m = 0;
    double mean = 0.0;
    double sd = 0.0;  // population convention
    int count = 0;
};

std::vector<SummaryRow> summarize(const SweepResult& result);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct RunAllOptions {
    std::string out_dir = "out";
    std::uint64_t master_seed = 1;
    int threads = 0;
    bool check = false;       // evaluate built-in sanity thresholds
    bool quick = false;       // reduced grids for smoke runs
};

// Executes the full bundle: both preset sweeps, oracle subset tables,
// assumption verification, the epsilon0/bound reports and the downstream
// comparison; writes CSVs plus a JSON manifest. Returns false when `check`
// is set and a sanity threshold failed.
bool run_all(const RunAllOptions& options);

}  // namespace ocp
