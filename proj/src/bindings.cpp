#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "ocp/assumptions.hpp"
#include "ocp/downstream.hpp"
#include "ocp/erm.hpp"
#include "ocp/harness.hpp"
#include "ocp/oracle.hpp"
#include "ocp/rng.hpp"
#include "ocp/sampling.hpp"
#include "ocp/spec.hpp"

namespace py = pybind11;
using namespace ocp;

namespace {

DistributionSpec resolve_spec(const std::string& name_or_json) {
    // Accepts a preset name, a file path, or an inline JSON document.
    if (!name_or_json.empty() && name_or_json.front() == '{') {
        DistributionSpec spec;
        from_json(nlohmann::json::parse(name_or_json), spec);
        spec.validate();
        return spec;
    }
    return DistributionSpec::load(name_or_json);
}

py::dict risk_dict(const RiskReport& r) {
    py::dict d;
    d["scheme"] = scheme_name(r.scheme);
    d["subset"] = r.subset;
    d["err"] = r.err_U;
    d["err_s"] = r.err_S;
    d["excess"] = r.excess;
    d["prob_s_equal"] = r.prob_s_equal;
    if (r.m_expectation) d["m_expectation"] = *r.m_expectation;
    if (r.decomposed_err) d["decomposed_err"] = *r.decomposed_err;
    return d;
}

}  // namespace

PYBIND11_MODULE(ocpsim, m) {
    m.doc() = "Order-contrastive pretraining simulator";

    m.def("spec_json", [](const std::string& spec) {
        nlohmann::json j;
        to_json(j, resolve_spec(spec));
        return j.dump();
    },
          py::arg("spec"), "Resolve a spec name/path/document to its canonical JSON.");

    m.def("sample_trajectories",
          [](const std::string& spec, int n, std::uint64_t seed) {
              const DistributionSpec s = resolve_spec(spec);
              RngStream rng = RngStream::derive(seed, {0x7079u});
              std::vector<std::vector<std::vector<int>>> out;
              for (int i = 0; i < n; ++i) {
                  const Trajectory t = sample_trajectory(s, rng);
                  std::vector<std::vector<int>> rows(t.tau, std::vector<int>(t.d));
                  for (int a = 0; a < t.tau; ++a)
                      for (int b = 0; b < t.d; ++b) rows[a][b] = t.at(a, b);
                  out.push_back(std::move(rows));
              }
              return out;
          },
          py::arg("spec"), py::arg("n"), py::arg("seed") = 1);

    m.def("sample_pairs",
          [](const std::string& spec, const std::string& scheme, int m, std::uint64_t seed) {
              const DistributionSpec s = resolve_spec(spec);
              const Scheme sc = scheme_from_name(scheme);
              RngStream rng = RngStream::derive(seed, {0x70797Au});
              std::vector<Trajectory> pool;
              if (sc == Scheme::PatientContrastive) {
                  pool.reserve(static_cast<std::size_t>(m));
                  for (int i = 0; i < m; ++i) pool.push_back(sample_trajectory(s, rng));
              }
              py::list out;
              for (int i = 0; i < m; ++i) {
                  const Trajectory traj =
                      sc == Scheme::PatientContrastive ? pool[i] : sample_trajectory(s, rng);
                  const LabeledPair p = sample_pair(
                      sc, traj, sc == Scheme::PatientContrastive ? &pool : nullptr, rng, i);
                  py::dict d;
                  d["x_first"] = std::vector<int>(p.x_first.begin(), p.x_first.end());
                  d["x_second"] = std::vector<int>(p.x_second.begin(), p.x_second.end());
                  d["w_first"] = p.w_first + 1;
                  d["w_second"] = p.w_second + 1;
                  d["y"] = p.y;
                  out.append(d);
              }
              return out;
          },
          py::arg("spec"), py::arg("scheme"), py::arg("m"), py::arg("seed") = 1);

    m.def("population_risk",
          [](const std::string& spec, const std::string& scheme, const std::vector<int>& subset) {
              return risk_dict(population_risk(scheme_from_name(scheme), resolve_spec(spec),
                                               subset));
          },
          py::arg("spec"), py::arg("scheme"), py::arg("subset"));

    m.def("risk_table",
          [](const std::string& spec, const std::string& scheme, int d0) {
              py::list out;
              for (const auto& r : risk_table(scheme_from_name(scheme), resolve_spec(spec), d0))
                  out.append(risk_dict(r));
              return out;
          },
          py::arg("spec"), py::arg("scheme"), py::arg("d0"));

    m.def("optimal_subset",
          [](const std::string& spec, const std::string& scheme, int d0) {
              const auto r = optimal_subset(scheme_from_name(scheme), resolve_spec(spec), d0);
              py::dict d;
              d["subset"] = r.subset;
              d["err"] = r.err;
              d["is_unique"] = r.is_unique;
              d["gap_to_second"] = r.gap_to_second;
              return d;
          },
          py::arg("spec"), py::arg("scheme"), py::arg("d0"));

    m.def("epsilon_zero",
          [](const std::string& spec, const std::string& scheme, int d0) {
              return epsilon_zero(scheme_from_name(scheme), resolve_spec(spec), d0);
          },
          py::arg("spec"), py::arg("scheme"), py::arg("d0"));

    m.def("unlabeled_sample_bound", &unlabeled_sample_bound, py::arg("epsilon0"), py::arg("d"),
          py::arg("d0"), py::arg("delta"));

    m.def("verify_assumptions",
          [](const std::string& spec) {
              const AssumptionReport r = verify_assumptions(resolve_spec(spec));
              py::dict d;
              d["irreversible"] = r.irreversible;
              d["exchange_symmetric"] = r.exchange_symmetric;
              d["lone_activation"] = r.lone_activation;
              d["all_hold"] = r.all_hold();
              return d;
          },
          py::arg("spec"));

    m.def("erm_subset_search",
          [](const std::string& spec, const std::string& scheme, int m, int d0,
             std::uint64_t seed) {
              const DistributionSpec s = resolve_spec(spec);
              RngStream rng = RngStream::derive(seed, {0x65726Du});
              std::vector<LabeledPair> pairs;
              const Scheme sc = scheme_from_name(scheme);
              for (int i = 0; i < m; ++i) {
                  const Trajectory traj = sample_trajectory(s, rng);
                  pairs.push_back(sample_pair(sc, traj, nullptr, rng, i));
              }
              const auto res = erm_subset_search(pairs, s.num_features(), d0);
              py::dict d;
              d["subset"] = res.subset;
              d["empirical_risk"] = res.empirical_risk;
              d["recovered"] = recovery_score(res.subset, s.driver_indices());
              return d;
          },
          py::arg("spec"), py::arg("scheme"), py::arg("m"), py::arg("d0"), py::arg("seed") = 1);

    m.def("run_sweep",
          [](const std::string& spec, const std::vector<std::string>& schemes,
             const std::vector<int>& m_grid, int replicates, int d0, std::uint64_t seed,
             int threads) {
              SweepConfig c;
              c.spec = resolve_spec(spec);
              c.spec_name = spec;
              c.schemes.clear();
              for (const auto& s : schemes) c.schemes.push_back(scheme_from_name(s));
              c.m_grid = m_grid;
              c.replicates = replicates;
              c.d0 = d0 > 0 ? d0 : c.spec.driver_count();
              c.master_seed = seed;
              c.threads = threads;
              py::list out;
              for (const auto& row : run_sweep(c).rows) {
                  py::dict d;
                  d["scheme"] = scheme_name(row.scheme);
                  d["m"] = row.m;
                  d["replicate"] = row.replicate;
                  d["recovered"] = row.recovered;
                  d["subset"] = row.subset;
                  out.append(d);
              }
              return out;
          },
          py::arg("spec"), py::arg("schemes"), py::arg("m_grid"), py::arg("replicates"),
          py::arg("d0") = -1, py::arg("seed") = 1, py::arg("threads") = 0);
}
