#include "ocp/sampling.hpp"

#include <map>
#include <ostream>

#include "ocp/rng.hpp"

namespace ocp {

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::OCP: return "ocp";
        case Scheme::PCL: return "pcl";
        case Scheme::OCPBiased: return "ocp_biased";
        case Scheme::PatientContrastive: return "patient_contrastive";
    }
    return "ocp";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "ocp") return Scheme::OCP;
    if (name == "pcl") return Scheme::PCL;
    if (name == "ocp_biased" || name == "ocp-biased") return Scheme::OCPBiased;
    if (name == "patient_contrastive" || name == "patient-contrastive")
        return Scheme::PatientContrastive;
    throw std::invalid_argument("unknown scheme: " + name);
}

std::vector<std::pair<WindowPair, double>> window_law(Scheme scheme, int tau, int y) {
    if (tau < 2) throw std::invalid_argument("window law requires tau >= 2");
    std::vector<std::pair<WindowPair, double>> law;
    const double consec = 1.0 / static_cast<double>(tau - 1);
    if (y > 0) {
        // Identical positive law for OCP, PCL and OCP-biased.
        if (scheme == Scheme::PatientContrastive)
            throw std::invalid_argument("patient_contrastive has no single-trajectory window law");
        for (int t = 0; t + 1 < tau; ++t) law.push_back({{t, t + 1}, consec});
        return law;
    }
    switch (scheme) {
        case Scheme::OCP:
            for (int t = 0; t + 1 < tau; ++t) law.push_back({{t + 1, t}, consec});
            break;
        case Scheme::PCL: {
            const double p = 1.0 / static_cast<double>(tau * (tau - 1));
            for (int a = 0; a < tau; ++a)
                for (int b = 0; b < tau; ++b)
                    if (a != b) law.push_back({{a, b}, p});
            break;
        }
        case Scheme::OCPBiased:
            for (int t = 0; t + 1 < tau; ++t) {
                law.push_back({{t, t + 1}, consec / 2.0});
                law.push_back({{t + 1, t}, consec / 2.0});
            }
            break;
        case Scheme::PatientContrastive:
            throw std::invalid_argument("patient_contrastive has no single-trajectory window law");
    }
    return law;
}

namespace {

std::vector<std::uint8_t> row(const Trajectory& traj, int t) {
    std::vector<std::uint8_t> out(traj.d);
    for (int j = 0; j < traj.d; ++j) out[j] = traj.at(t, j);
    return out;
}

}  // namespace

LabeledPair sample_pair(Scheme scheme, const Trajectory& trajectory,
                        const std::vector<Trajectory>* pool, RngStream& rng, int trajectory_id) {
    const int tau = trajectory.tau;
    if (tau < 2) throw std::invalid_argument("sample_pair requires tau >= 2");
    if (scheme == Scheme::PatientContrastive && (pool == nullptr || pool->size() < 2))
        throw std::invalid_argument("patient_contrastive requires a pool of >= 2 trajectories");
    LabeledPair pair;
    pair.scheme = scheme;
    pair.source_first = pair.source_second = trajectory_id;
    pair.y = rng.bernoulli(0.5) ? 1 : -1;

    if (scheme == Scheme::PatientContrastive && pair.y < 0) {
        std::size_t other = rng.uniform_int(pool->size() - 1);
        if (static_cast<int>(other) >= trajectory_id) ++other;
        const Trajectory& second = (*pool)[other];
        pair.w_first = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(tau)));
        pair.w_second = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(second.tau)));
        pair.x_first = row(trajectory, pair.w_first);
        pair.x_second = row(second, pair.w_second);
        pair.source_second = static_cast<int>(other);
        return pair;
    }

    if (pair.y > 0) {
        const int t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(tau - 1)));
        pair.w_first = t;
        pair.w_second = t + 1;
    } else {
        switch (scheme) {
            case Scheme::OCP: {
                const int t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(tau - 1)));
                pair.w_first = t + 1;
                pair.w_second = t;
                break;
            }
            case Scheme::PCL: {
                // Uniform over ordered distinct pairs; consecutive pairs are
                // not excluded.
                const int a = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(tau)));
                int b = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(tau - 1)));
                if (b >= a) ++b;
                pair.w_first = a;
                pair.w_second = b;
                break;
            }
            case Scheme::OCPBiased: {
                const int t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(tau - 1)));
                if (rng.bernoulli(0.5)) {
                    pair.w_first = t;
                    pair.w_second = t + 1;
                } else {
                    pair.w_first = t + 1;
                    pair.w_second = t;
                }
                break;
            }
            case Scheme::PatientContrastive:
                break;  // handled above
        }
    }
    pair.x_first = row(trajectory, pair.w_first);
    pair.x_second = row(trajectory, pair.w_second);
    return pair;
}

LabeledValueLaw scheme_pair_law(Scheme scheme, const DistributionSpec& spec,
                                const std::vector<int>& subset, std::size_t budget) {
    if (scheme == Scheme::PatientContrastive)
        throw std::invalid_argument("patient_contrastive has no single-trajectory pair law");
    LabeledValueLaw law;
    law.subset = subset;
    const std::size_t k = subset.size();
    const std::size_t half = std::size_t{1} << (2 * k);
    law.p.assign(2 * half, 0.0);

    std::map<std::pair<int, int>, std::vector<double>> cache;
    for (int yi = 0; yi < 2; ++yi) {
        const int y = yi == 0 ? -1 : 1;
        for (const auto& [wp, wprob] : window_law(scheme, spec.tau, y)) {
            auto key = std::make_pair(wp.w_first, wp.w_second);
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, value_pair_table(spec, wp.w_first, wp.w_second, subset, budget))
                         .first;
            const double w = 0.5 * wprob;
            double* dst = law.p.data() + static_cast<std::size_t>(yi) * half;
            const auto& table = it->second;
            for (std::size_t idx = 0; idx < half; ++idx) dst[idx] += w * table[idx];
        }
    }
    return law;
}

void write_pairs_csv(std::ostream& out, const std::vector<LabeledPair>& pairs) {
    if (pairs.empty()) {
        out << "scheme,y,w_first,w_second\n";
        return;
    }
    const std::size_t d = pairs.front().x_first.size();
    out << "scheme,y,w_first,w_second";
    for (std::size_t j = 0; j < d; ++j) out << ",x_first_" << j;
    for (std::size_t j = 0; j < d; ++j) out << ",x_second_" << j;
    out << "\n";
    for (const auto& p : pairs) {
        out << scheme_name(p.scheme) << ',' << p.y << ',' << p.w_first + 1 << ',' << p.w_second + 1;
        for (std::size_t j = 0; j < d; ++j) out << ',' << static_cast<int>(p.x_first[j]);
        for (std::size_t j = 0; j < d; ++j) out << ',' << static_cast<int>(p.x_second[j]);
        out << "\n";
    }
}

}  // namespace ocp
