#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ocp/pair_table.hpp"
#include "ocp/spec.hpp"

namespace ocp {

class RngStream;

enum class Scheme { OCP, PCL, OCPBiased, PatientContrastive };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

// One contrastive sample: window values, window indices, order label and the
// scheme that produced it. Windows are 0-based internally; exports are 1-based.
struct LabeledPair {
    std::vector<std::uint8_t> x_first;
    std::vector<std::uint8_t> x_second;
    int w_first = 0;
    int w_second = 0;
    int y = 1;  // +1 correct order, -1 otherwise
    Scheme scheme = Scheme::OCP;
    int source_first = 0;   // trajectory ids
    int source_second = 0;
};

// Window-pair distribution of a scheme conditioned on the label y (+1/-1).
// PatientContrastive has no single-trajectory window law and is rejected.
std::vector<std::pair<WindowPair, double>> window_law(Scheme scheme, int tau, int y);

// Draws one labeled pair. PatientContrastive negatives take the second window
// from a uniformly chosen different trajectory in `pool`.
LabeledPair sample_pair(Scheme scheme, const Trajectory& trajectory,
                        const std::vector<Trajectory>* pool, RngStream& rng,
                        int trajectory_id = 0);

// Exact joint law of (X^W_U, X^{W'}_U, Y) under a scheme: the per-label window
// law mixed with the exact window-pair value tables and the uniform label
// prior. p[y][(v << k) | v'] with y index 0 for -1 and 1 for +1.
struct LabeledValueLaw {
    std::vector<int> subset;
    std::vector<double> p;  // size 2 * 4^k

    int bits() const { return static_cast<int>(subset.size()); }
    double at(int y, std::uint32_t v, std::uint32_t vp) const {
        const std::size_t half = p.size() / 2;
        return p[(y > 0 ? half : 0) + ((static_cast<std::size_t>(v) << bits()) | vp)];
    }
};

LabeledValueLaw scheme_pair_law(Scheme scheme, const DistributionSpec& spec,
                                const std::vector<int>& subset,
                                std::size_t budget = kDefaultTableBudget);

// CSV export: scheme,y,w_first,w_second,x_first bits...,x_second bits...
void write_pairs_csv(std::ostream& out, const std::vector<LabeledPair>& pairs);

}  // namespace ocp
