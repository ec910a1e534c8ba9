#include "ocp/spec.hpp"

#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ocp/rng.hpp"

namespace ocp {

std::vector<int> DistributionSpec::driver_indices() const {
    std::vector<int> idx(drivers.size());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

void DistributionSpec::validate() const {
    if (tau < 2) throw std::invalid_argument("tau must be >= 2");
    for (std::size_t i = 0; i < drivers.size(); ++i) {
        const auto& dr = drivers[i];
        if (dr.activation_prob < 0.0 || dr.activation_prob > 1.0)
            throw std::invalid_argument("driver activation_prob must be in [0,1]");
        if (dr.deactivation_prob < 0.0 || dr.deactivation_prob > 1.0)
            throw std::invalid_argument("driver deactivation_prob must be in [0,1]");
        if (dr.linked_to >= 0) {
            if (dr.linked_to >= static_cast<int>(i))
                throw std::invalid_argument("driver linked_to must reference an earlier driver");
            if (drivers[dr.linked_to].linked_to >= 0)
                throw std::invalid_argument("driver links must not chain");
        }
    }
    for (const auto& nf : noisy) {
        if (nf.parent < 0 || nf.parent >= driver_count())
            throw std::invalid_argument("noisy parent must be a valid driver index");
        if (!(nf.epsilon > 0.0 && nf.epsilon < 1.0))
            throw std::invalid_argument("noisy epsilon must be in (0,1)");
    }
    for (const auto& bf : background) {
        if (bf.param < 0.0 || bf.param > 1.0)
            throw std::invalid_argument("background param must be in [0,1]");
        if (bf.init_prob < 0.0 || bf.init_prob > 1.0)
            throw std::invalid_argument("background init_prob must be in [0,1]");
    }
    if (num_features() == 0) throw std::invalid_argument("spec has no features");
}

DistributionSpec DistributionSpec::preset(const std::string& name) {
    DistributionSpec spec;
    spec.tau = 10;
    spec.drivers = {{0.4}, {0.4}, {0.6}, {0.6}};
    if (name == "dist1") {
        spec.noisy = {{0, 0.7}, {1, 0.7}, {2, 0.7}};
        spec.background = {{BackgroundKind::Periodic, 0.0, 0.5}};
    } else if (name == "dist2") {
        spec.noisy = {{0, 0.55}, {1, 0.55}};
        spec.background = {{BackgroundKind::MarkovStay, 0.3, 0.5}};
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    spec.validate();
    return spec;
}

DistributionSpec DistributionSpec::load(const std::string& name_or_path) {
    if (name_or_path == "dist1" || name_or_path == "dist2") return preset(name_or_path);
    std::ifstream in(name_or_path);
    if (!in) throw std::invalid_argument("cannot open spec file: " + name_or_path);
    nlohmann::json j;
    in >> j;
    DistributionSpec spec = j.get<DistributionSpec>();
    spec.validate();
    return spec;
}

namespace {

std::string kind_name(BackgroundKind k) {
    switch (k) {
        case BackgroundKind::Periodic: return "periodic";
        case BackgroundKind::MarkovStay: return "markov_stay";
        case BackgroundKind::IIDBernoulli: return "iid_bernoulli";
    }
    return "iid_bernoulli";
}

BackgroundKind kind_from_name(const std::string& s) {
    if (s == "periodic") return BackgroundKind::Periodic;
    if (s == "markov_stay") return BackgroundKind::MarkovStay;
    if (s == "iid_bernoulli") return BackgroundKind::IIDBernoulli;
    throw std::invalid_argument("unknown background kind: " + s);
}

}  // namespace

void to_json(nlohmann::json& j, const DistributionSpec& spec) {
    j = nlohmann::json{{"tau", spec.tau},
                       {"drivers", nlohmann::json::array()},
                       {"noisy", nlohmann::json::array()},
                       {"background", nlohmann::json::array()}};
    for (const auto& dr : spec.drivers) {
        nlohmann::json d{{"activation_prob", dr.activation_prob}};
        if (dr.deactivation_prob != 0.0) d["deactivation_prob"] = dr.deactivation_prob;
        if (dr.linked_to >= 0) d["linked_to"] = dr.linked_to;
        j["drivers"].push_back(std::move(d));
    }
    for (const auto& nf : spec.noisy)
        j["noisy"].push_back({{"parent", nf.parent}, {"epsilon", nf.epsilon}});
    for (const auto& bf : spec.background) {
        nlohmann::json b{{"kind", kind_name(bf.kind)}, {"param", bf.param}};
        if (bf.init_prob != 0.5) b["init_prob"] = bf.init_prob;
        j["background"].push_back(std::move(b));
    }
}

void from_json(const nlohmann::json& j, DistributionSpec& spec) {
    spec = DistributionSpec{};
    spec.tau = j.at("tau").get<int>();
    spec.drivers.clear();
    for (const auto& d : j.value("drivers", nlohmann::json::array())) {
        DriverFeature dr;
        dr.activation_prob = d.at("activation_prob").get<double>();
        dr.deactivation_prob = d.value("deactivation_prob", 0.0);
        dr.linked_to = d.value("linked_to", -1);
        spec.drivers.push_back(dr);
    }
    for (const auto& n : j.value("noisy", nlohmann::json::array())) {
        NoisyFeature nf;
        nf.parent = n.at("parent").get<int>();
        nf.epsilon = n.at("epsilon").get<double>();
        spec.noisy.push_back(nf);
    }
    for (const auto& b : j.value("background", nlohmann::json::array())) {
        BackgroundFeature bf;
        bf.kind = kind_from_name(b.at("kind").get<std::string>());
        bf.param = b.value("param", 0.5);
        bf.init_prob = b.value("init_prob", 0.5);
        spec.background.push_back(bf);
    }
}

std::uint32_t Trajectory::pack(int t, const std::vector<int>& subset) const {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        v |= static_cast<std::uint32_t>(at(t, subset[i])) << i;
    return v;
}

Trajectory sample_trajectory(const DistributionSpec& spec, RngStream& rng) {
    const int tau = spec.tau;
    const int d = spec.num_features();
    Trajectory traj;
    traj.tau = tau;
    traj.d = d;
    traj.values.assign(static_cast<std::size_t>(tau) * d, 0);

    const int nd = spec.driver_count();
    // Driver columns. Linked drivers copy the column of the driver they are
    // linked to, so the link target must be sampled first (validated order).
    for (int i = 0; i < nd; ++i) {
        const auto& dr = spec.drivers[i];
        if (dr.linked_to >= 0) {
            for (int t = 0; t < tau; ++t) traj.at(t, i) = traj.at(t, dr.linked_to);
            continue;
        }
        if (!rng.bernoulli(dr.activation_prob)) continue;
        const int a = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(tau)));
        int off_at = tau;  // first time the column is off again (violation knob)
        if (dr.deactivation_prob > 0.0) {
            for (int t = a + 1; t < tau; ++t) {
                if (rng.bernoulli(dr.deactivation_prob)) {
                    off_at = t;
                    break;
                }
            }
        }
        for (int t = a; t < off_at; ++t) traj.at(t, i) = 1;
    }
    // Noisy copies: disagree with parent with probability epsilon per step.
    for (std::size_t k = 0; k < spec.noisy.size(); ++k) {
        const auto& nf = spec.noisy[k];
        const int j = nd + static_cast<int>(k);
        for (int t = 0; t < tau; ++t) {
            const std::uint8_t parent = traj.at(t, nf.parent);
            traj.at(t, j) = rng.bernoulli(nf.epsilon) ? static_cast<std::uint8_t>(1 - parent) : parent;
        }
    }
    // Background features.
    for (std::size_t k = 0; k < spec.background.size(); ++k) {
        const auto& bf = spec.background[k];
        const int j = nd + static_cast<int>(spec.noisy.size()) + static_cast<int>(k);
        switch (bf.kind) {
            case BackgroundKind::Periodic: {
                std::uint8_t v = rng.bernoulli(bf.init_prob) ? 1 : 0;
                for (int t = 0; t < tau; ++t, v = 1 - v) traj.at(t, j) = v;
                break;
            }
            case BackgroundKind::MarkovStay: {
                std::uint8_t v = rng.bernoulli(bf.init_prob) ? 1 : 0;
                traj.at(0, j) = v;
                for (int t = 1; t < tau; ++t) {
                    if (!rng.bernoulli(bf.param)) v = 1 - v;
                    traj.at(t, j) = v;
                }
                break;
            }
            case BackgroundKind::IIDBernoulli: {
                for (int t = 0; t < tau; ++t) traj.at(t, j) = rng.bernoulli(bf.param) ? 1 : 0;
                break;
            }
        }
    }
    return traj;
}

}  // namespace ocp
