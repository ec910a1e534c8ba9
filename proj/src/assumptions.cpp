#include "ocp/assumptions.hpp"

#include <cmath>
#include <sstream>

#include "ocp/pair_table.hpp"

namespace ocp {

namespace {
constexpr double kSymmetryTol = 1e-12;
}

std::string AssumptionWitness::describe(int d) const {
    std::ostringstream os;
    os << "t=" << t + 1 << " v=";
    for (int j = 0; j < d; ++j) os << ((v >> j) & 1);
    os << " v'=";
    for (int j = 0; j < d; ++j) os << ((v_prime >> j) & 1);
    return os.str();
}

AssumptionReport verify_assumptions(const DistributionSpec& spec, std::size_t budget) {
    spec.validate();
    AssumptionReport report;
    const int d = spec.num_features();
    const auto features = all_features(spec);
    const auto drivers = spec.driver_indices();
    const std::uint32_t s_mask = (std::uint32_t{1} << drivers.size()) - 1;

    report.irreversible = true;
    report.exchange_symmetric = true;
    for (int t = 0; t + 1 < spec.tau; ++t) {
        const auto table = value_pair_table(spec, t, t + 1, features, budget);
        const std::uint32_t n = std::uint32_t{1} << d;
        for (std::uint32_t v = 0; v < n; ++v) {
            for (std::uint32_t vp = 0; vp < n; ++vp) {
                const double p = table[(static_cast<std::size_t>(v) << d) | vp];
                // A1: no driver may go 1 -> 0 with positive probability.
                if (report.irreversible && p > 0.0 && ((v & s_mask) & ~(vp & s_mask)) != 0) {
                    report.irreversible = false;
                    report.irreversible_witness = AssumptionWitness{t, v, vp};
                }
                // A2: swap symmetry whenever the S-parts agree.
                if (report.exchange_symmetric && (v & s_mask) == (vp & s_mask)) {
                    const double swapped = table[(static_cast<std::size_t>(vp) << d) | v];
                    if (std::abs(p - swapped) > kSymmetryTol) {
                        report.exchange_symmetric = false;
                        report.exchange_witness = AssumptionWitness{t, v, vp};
                    }
                }
            }
        }
        if (!report.irreversible && !report.exchange_symmetric) break;
    }

    // A3 (lone activation, sufficient condition): for each driver i there is a
    // t where i switches 0 -> 1 while the rest of S stays put.
    report.lone_activation = true;
    const auto s_table_features = drivers;
    const int k = static_cast<int>(drivers.size());
    for (int i = 0; i < k && report.lone_activation; ++i) {
        bool found = false;
        for (int t = 0; t + 1 < spec.tau && !found; ++t) {
            const auto table = value_pair_table(spec, t, t + 1, s_table_features, budget);
            const std::uint32_t n = std::uint32_t{1} << k;
            const std::uint32_t bit = std::uint32_t{1} << i;
            for (std::uint32_t v = 0; v < n && !found; ++v) {
                if (v & bit) continue;
                const std::uint32_t vp = v | bit;  // lone flip of driver i
                if (table[(static_cast<std::size_t>(v) << k) | vp] > 0.0) found = true;
            }
        }
        if (!found) {
            report.lone_activation = false;
            report.lone_activation_failure = i;
        }
    }
    return report;
}

}  // namespace ocp
