#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ocp/spec.hpp"

namespace ocp {

// A concrete violating event: time step t with value pair (v, v') over all
// features (bitmasks in global feature order).
struct AssumptionWitness {
    int t = 0;
    std::uint32_t v = 0;
    std::uint32_t v_prime = 0;
    std::string describe(int d) const;
};

struct AssumptionReport {
    bool irreversible = false;       // drivers never transition 1 -> 0
    bool exchange_symmetric = false; // swap symmetry when the S-part is fixed
    bool lone_activation = false;    // each driver can activate on its own
    std::optional<AssumptionWitness> irreversible_witness;
    std::optional<AssumptionWitness> exchange_witness;
    std::optional<int> lone_activation_failure;  // driver index with no lone event

    bool all_hold() const { return irreversible && exchange_symmetric && lone_activation; }
};

// Checks the three distributional assumptions on the exact consecutive-pair
// tables: (A1) irreversibility of every driver column, (A2) exchange symmetry
// P[X^t=v, X^{t+1}=v'] = P[X^t=v', X^{t+1}=v] whenever v_S = v'_S (tolerance
// 1e-12), (A3) a lone-activation event for every driver.
AssumptionReport verify_assumptions(const DistributionSpec& spec,
                                    std::size_t budget = kDefaultTableBudget);

}  // namespace ocp
