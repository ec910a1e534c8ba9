#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ocp {

// Thrown when an exact-enumeration table would exceed the configured entry
// budget (guards the 4^|U| * |support| blow-up).
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Default entry budget for exact tables.
inline constexpr std::size_t kDefaultTableBudget = std::size_t{1} << 26;

// Time-irreversible feature: activates with probability `activation_prob`,
// activation time uniform over the trajectory, then stays on.
//
// `deactivation_prob` and `linked_to` are violation knobs used to build
// counterexample specs: a positive deactivation probability lets the column
// flip 1->0 (breaking irreversibility), and `linked_to` forces this driver to
// copy another driver's column (activating in lock-step with it).
struct DriverFeature {
    double activation_prob = 0.0;
    double deactivation_prob = 0.0;
    int linked_to = -1;
};

// Noisy copy of a driver: agrees with its parent with probability (1 - epsilon)
// at each time step, independently across time given the parent column.
struct NoisyFeature {
    int parent = 0;
    double epsilon = 0.5;
};

enum class BackgroundKind {
    Periodic,      // X^{t+1} = 1 - X^t, uniform initial state
    MarkovStay,    // repeats previous value with probability `param`
    IIDBernoulli,  // independent Bernoulli(`param`) at every step
};

// Reversible background feature. `init_prob` is the probability the feature
// starts at 1; for MarkovStay the symmetric (reversible) case is 0.5, and
// other values are a violation knob for the exchange-symmetry assumption.
struct BackgroundFeature {
    BackgroundKind kind = BackgroundKind::IIDBernoulli;
    double param = 0.5;
    double init_prob = 0.5;
};

// Full generative description of a trajectory distribution. Feature indices
// are global and 0-based, in fixed order: drivers first, then noisy copies,
// then background features.
struct DistributionSpec {
    int tau = 2;
    std::vector<DriverFeature> drivers;
    std::vector<NoisyFeature> noisy;
    std::vector<BackgroundFeature> background;

    int num_features() const {
        return static_cast<int>(drivers.size() + noisy.size() + background.size());
    }
    int driver_count() const { return static_cast<int>(drivers.size()); }

    // Global indices of the driver set S.
    std::vector<int> driver_indices() const;

    // Throws std::invalid_argument on a malformed spec.
    void validate() const;

    // Built-in named specs ("dist1", "dist2").
    static DistributionSpec preset(const std::string& name);

    // Resolves a name: preset name or path to a JSON file.
    static DistributionSpec load(const std::string& name_or_path);
};

void to_json(nlohmann::json& j, const DistributionSpec& spec);
void from_json(const nlohmann::json& j, DistributionSpec& spec);

// One sampled binary time series: tau rows (time, 0-based) x d columns.
struct Trajectory {
    int tau = 0;
    int d = 0;
    std::vector<std::uint8_t> values;  // row-major, values[t * d + j]

    std::uint8_t at(int t, int j) const { return values[static_cast<std::size_t>(t) * d + j]; }
    std::uint8_t& at(int t, int j) { return values[static_cast<std::size_t>(t) * d + j]; }

    // Values of `subset` at time t packed into a bitmask (bit i = subset[i]).
    std::uint32_t pack(int t, const std::vector<int>& subset) const;
};

class RngStream;

Trajectory sample_trajectory(const DistributionSpec& spec, RngStream& rng);

}  // namespace ocp
