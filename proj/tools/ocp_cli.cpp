// Command-line front end. Exit codes: 0 success, 1 config error,
// 2 budget exceeded, 3 check failure (run-all --check).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ocp/assumptions.hpp"
#include "ocp/downstream.hpp"
#include "ocp/erm.hpp"
#include "ocp/harness.hpp"
#include "ocp/oracle.hpp"
#include "ocp/rng.hpp"
#include "ocp/sampling.hpp"
#include "ocp/spec.hpp"

namespace {

using namespace ocp;

std::vector<Scheme> parse_schemes(const std::vector<std::string>& names) {
    std::vector<Scheme> out;
    for (const auto& n : names) out.push_back(scheme_from_name(n));
    if (out.empty()) throw std::invalid_argument("no schemes given");
    return out;
}

std::ofstream open_out(const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return f;
}

std::vector<LabeledPair> sample_pairs(const DistributionSpec& spec, Scheme scheme, int m,
                                      RngStream& rng) {
    std::vector<LabeledPair> pairs;
    pairs.reserve(static_cast<std::size_t>(m));
    if (scheme == Scheme::PatientContrastive) {
        std::vector<Trajectory> pool;
        pool.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) pool.push_back(sample_trajectory(spec, rng));
        for (int i = 0; i < m; ++i) pairs.push_back(sample_pair(scheme, pool[i], &pool, rng, i));
    } else {
        for (int i = 0; i < m; ++i) {
            const Trajectory traj = sample_trajectory(spec, rng);
            pairs.push_back(sample_pair(scheme, traj, nullptr, rng, i));
        }
    }
    return pairs;
}

void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajs) {
    if (trajs.empty()) return;
    out << "trajectory,t";
    for (int j = 0; j < trajs.front().d; ++j) out << ",f" << j;
    out << "\n";
    for (std::size_t i = 0; i < trajs.size(); ++i)
        for (int t = 0; t < trajs[i].tau; ++t) {
            out << i << ',' << t + 1;
            for (int j = 0; j < trajs[i].d; ++j) out << ',' << int(trajs[i].at(t, j));
            out << "\n";
        }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order-contrastive pretraining simulator"};
    app.require_subcommand(1);

    std::string spec_name = "dist1";
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_path = "out";
    std::vector<std::string> scheme_names{"ocp", "pcl", "ocp_biased"};
    std::vector<int> m_grid{50, 100, 200, 400, 600, 800, 1000, 2000, 4000, 8000, 16000};
    int replicates = 100;
    int d0 = -1;  // default: driver count of the spec

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--spec", spec_name, "dist1, dist2 or a JSON spec path");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
        cmd->add_option("--out", out_path, "output file or directory");
    };

    auto* simulate = app.add_subcommand("simulate", "dump trajectories or labeled pairs");
    int sim_count = 10;
    std::string sim_scheme;
    add_common(simulate);
    simulate->add_option("--count", sim_count, "number of trajectories");
    simulate->add_option("--scheme", sim_scheme, "dump one labeled pair per trajectory instead");

    auto* sweep = app.add_subcommand("sweep", "recovery sweep over sample sizes");
    add_common(sweep);
    sweep->add_option("--schemes", scheme_names, "schemes")->delimiter(',');
    sweep->add_option("--m-grid", m_grid, "unlabeled sample sizes")->delimiter(',');
    sweep->add_option("--replicates", replicates, "replicates per cell");
    sweep->add_option("--d0", d0, "subset size (default: driver count)");

    auto* oracle = app.add_subcommand("oracle", "population risk tables, epsilon0 and bound");
    double delta = 0.05;
    add_common(oracle);
    oracle->add_option("--schemes", scheme_names, "schemes")->delimiter(',');
    oracle->add_option("--d0", d0, "subset size (default: driver count)");
    oracle->add_option("--delta", delta, "confidence level for the sample bound");

    auto* verify = app.add_subcommand("verify", "check the distributional assumptions");
    add_common(verify);

    auto* downstream = app.add_subcommand("downstream", "excess-risk curves");
    std::string ds_scheme = "ocp";
    int ds_m = 16000, ds_threshold = -1;
    double ds_noise = 0.1;
    std::vector<int> n_grid{25, 50, 100, 200, 400};
    add_common(downstream);
    downstream->add_option("--scheme", ds_scheme, "pretraining scheme");
    downstream->add_option("--m", ds_m, "unlabeled pretraining sample size");
    downstream->add_option("--n-grid", n_grid, "labeled sample sizes")->delimiter(',');
    downstream->add_option("--replicates", replicates, "replicates");
    downstream->add_option("--noise", ds_noise, "label noise");
    downstream->add_option("--threshold", ds_threshold,
                           "active-driver threshold (default: half the drivers)");

    auto* select = app.add_subcommand("select", "L1 feature selection path");
    std::string sel_scheme = "ocp";
    int sel_m = 2000, target_count = -1, count_slack = 0;
    add_common(select);
    select->add_option("--scheme", sel_scheme, "sampling scheme");
    select->add_option("--m", sel_m, "pair sample size");
    select->add_option("--target-count", target_count, "target feature count (default: drivers)");
    select->add_option("--slack", count_slack, "acceptable deviation from the target count");

    auto* run_all_cmd = app.add_subcommand("run-all", "full result bundle");
    bool check = false, quick = false;
    add_common(run_all_cmd);
    run_all_cmd->add_flag("--check", check, "evaluate sanity thresholds; exit 3 on failure");
    run_all_cmd->add_flag("--quick", quick, "reduced grids for smoke runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        namespace fs = std::filesystem;
        if (simulate->parsed()) {
            const DistributionSpec spec = DistributionSpec::load(spec_name);
            RngStream rng = RngStream::derive(seed, {0x73696du});
            auto f = open_out(out_path);
            if (sim_scheme.empty()) {
                std::vector<Trajectory> trajs;
                for (int i = 0; i < sim_count; ++i) trajs.push_back(sample_trajectory(spec, rng));
                write_trajectories_csv(f, trajs);
            } else {
                const auto pairs =
                    sample_pairs(spec, scheme_from_name(sim_scheme), sim_count, rng);
                write_pairs_csv(f, pairs);
            }
        } else if (sweep->parsed()) {
            const DistributionSpec spec = DistributionSpec::load(spec_name);
            SweepConfig sc;
            sc.spec_name = spec_name;
            sc.spec = spec;
            sc.schemes = parse_schemes(scheme_names);
            sc.m_grid = m_grid;
            sc.replicates = replicates;
            sc.d0 = d0 > 0 ? d0 : spec.driver_count();
            sc.master_seed = seed;
            sc.threads = threads;
            fs::create_directories(out_path);
            sc.out_path = (fs::path(out_path) / "sweep.csv").string();
            const SweepResult result = run_sweep(sc);
            auto f = open_out(fs::path(out_path) / "sweep.csv");
            write_sweep_csv(f, result);
            auto g = open_out(fs::path(out_path) / "summary.csv");
            write_summary_csv(g, summarize(result));
        } else if (oracle->parsed()) {
            const DistributionSpec spec = DistributionSpec::load(spec_name);
            const int k = d0 > 0 ? d0 : spec.driver_count();
            fs::create_directories(out_path);
            auto f = open_out(fs::path(out_path) / "oracle.csv");
            f << "scheme,subset,err,excess,m_expectation\n";
            for (const std::string& sn : scheme_names) {
                const Scheme s = scheme_from_name(sn);
                for (const auto& r : risk_table(s, spec, k)) {
                    f << scheme_name(s) << ',';
                    for (std::size_t i = 0; i < r.subset.size(); ++i)
                        f << (i ? ";" : "") << r.subset[i];
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%.17g", r.err_U);
                    f << ',' << buf;
                    std::snprintf(buf, sizeof buf, "%.17g", r.excess);
                    f << ',' << buf << ',';
                    if (r.m_expectation) {
                        std::snprintf(buf, sizeof buf, "%.17g", *r.m_expectation);
                        f << buf;
                    }
                    f << "\n";
                }
            }
            for (const std::string& sn : scheme_names) {
                const Scheme s = scheme_from_name(sn);
                if (s == Scheme::PCL || s == Scheme::PatientContrastive) continue;
                BoundReport br;
                br.epsilon0 = epsilon_zero(s, spec, k);
                br.d = spec.num_features();
                br.d0 = k;
                br.delta = delta;
                br.vc_f = 4.0 * k + 1;
                br.m_bound = unlabeled_sample_bound(br.epsilon0, br.d, br.d0, br.delta);
                nlohmann::json j;
                to_json(j, br);
                auto g = open_out(fs::path(out_path) / ("bound_" + scheme_name(s) + ".json"));
                g << j.dump(2) << "\n";
            }
        } else if (verify->parsed()) {
            const DistributionSpec spec = DistributionSpec::load(spec_name);
            const AssumptionReport r = verify_assumptions(spec);
            nlohmann::json j{{"irreversible", r.irreversible},
                             {"exchange_symmetric", r.exchange_symmetric},
                             {"lone_activation", r.lone_activation},
                             {"all_hold", r.all_hold()}};
            if (r.irreversible_witness)
                j["irreversible_witness"] = r.irreversible_witness->describe(spec.num_features());
            if (r.exchange_witness)
                j["exchange_witness"] = r.exchange_witness->describe(spec.num_features());
            if (r.lone_activation_failure) j["lone_activation_failure"] = *r.lone_activation_failure;
            std::cout << j.dump(2) << "\n";
        } else if (downstream->parsed()) {
            const DistributionSpec spec = DistributionSpec::load(spec_name);
            DownstreamTask task;
            task.target_subset = spec.driver_indices();
            task.threshold = ds_threshold > 0 ? ds_threshold : spec.driver_count() / 2;
            task.label_noise = ds_noise;
            const auto rows = excess_risk_curves(spec, task, scheme_from_name(ds_scheme), ds_m,
                                                 n_grid, replicates, seed, {}, threads);
            auto f = open_out(out_path);
            write_excess_csv(f, rows);
            auto g = open_out(out_path + ".summary.csv");
            write_excess_summary_csv(g, summarize_excess(rows));
        } else if (select->parsed()) {
            const DistributionSpec spec = DistributionSpec::load(spec_name);
            RngStream rng = RngStream::derive(seed, {0x73656cu});
            const auto pairs = sample_pairs(spec, scheme_from_name(sel_scheme), sel_m, rng);
            const int target = target_count > 0 ? target_count : spec.driver_count();
            const FeatureSelection sel =
                l1_select(pairs, spec.num_features(), target, count_slack);
            nlohmann::json j{{"features", sel.features},
                             {"aggregate_weights", sel.aggregate_weights},
                             {"lambda", sel.lambda},
                             {"warning", sel.warning}};
            auto f = open_out(out_path);
            f << j.dump(2) << "\n";
            std::cout << j.dump(2) << "\n";
        } else if (run_all_cmd->parsed()) {
            RunAllOptions opts;
            opts.out_dir = out_path;
            opts.master_seed = seed;
            opts.threads = threads;
            opts.check = check;
            opts.quick = quick;
            if (!run_all(opts)) return 3;
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
