#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ocp/sampling.hpp"

namespace ocp {

struct Regularization {
    enum class Kind { L2, L1 };
    Kind kind = Kind::L2;
    double lambda = 1e-3;
};

// Weighted binary classification dataset, labels in {-1, +1}.
struct Dataset {
    int dim = 0;
    std::vector<double> x;   // row-major, n x dim
    std::vector<int> y;
    std::vector<double> w;   // per-example weights (counts)

    std::size_t size() const { return y.size(); }
    std::span<const double> row(std::size_t i) const {
        return {x.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    void push(std::span<const double> features, int label, double weight = 1.0);
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    Regularization reg;

    struct Diagnostics {
        double final_loss = 0.0;
        double residual = 0.0;
        int iterations = 0;
        bool converged = false;
        bool constant = false;  // degenerate single-class fit
    } diagnostics;

    // sign(w . phi + b), ties broken toward -1.
    int decide(std::span<const double> features) const;
    double score(std::span<const double> features) const;
};

void to_json(nlohmann::json& j, const LinearModel& m);

// Minimizes average logistic loss plus penalty. L2 uses gradient descent with
// Barzilai-Borwein steps safeguarded by backtracking line search; L1 uses
// proximal (soft-threshold) steps with the same backtracking. The objective is
// non-increasing across iterations; terminates when the (sub)gradient
// optimality residual drops to `tol` or after `max_iter` iterations
// (non-convergence is reported in diagnostics, not thrown). The bias is never
// penalized. With a single-class dataset, returns the constant classifier.
LinearModel train_logistic(const Dataset& data, Regularization reg, double tol = 1e-8,
                           int max_iter = 5000);

// Average logistic loss + penalty at (weights, bias); exposed for solver tests.
double logistic_objective(const Dataset& data, const LinearModel& m);
// Gradient of the smooth part (loss + L2 penalty if any) at (weights, bias);
// returned as dim+1 values with the bias derivative last.
std::vector<double> logistic_gradient(const Dataset& data, const LinearModel& m);

// Weighted 0-1 risk of the model's decisions on `data`.
double zero_one_risk(const Dataset& data, const LinearModel& m);

// The pair featurization [x; x'; x - x'; |x - x'|] restricted to `subset`.
std::vector<double> featurize_pair(const LabeledPair& pair, const std::vector<int>& subset);
// Same featurization from packed value bitmasks over k features.
std::vector<double> featurize_bits(std::uint32_t v1, std::uint32_t v2, int k);

}  // namespace ocp
