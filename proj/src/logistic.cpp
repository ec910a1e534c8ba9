#include "ocp/logistic.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace ocp {

void Dataset::push(std::span<const double> features, int label, double weight) {
    if (dim == 0) dim = static_cast<int>(features.size());
    if (static_cast<int>(features.size()) != dim)
        throw std::invalid_argument("inconsistent feature dimension");
    x.insert(x.end(), features.begin(), features.end());
    y.push_back(label);
    w.push_back(weight);
}

double LinearModel::score(std::span<const double> features) const {
    double s = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * features[j];
    return s;
}

int LinearModel::decide(std::span<const double> features) const {
    return score(features) > 0.0 ? 1 : -1;
}

void to_json(nlohmann::json& j, const LinearModel& m) {
    j = nlohmann::json{
        {"weights", m.weights},
        {"bias", m.bias},
        {"reg", {{"kind", m.reg.kind == Regularization::Kind::L1 ? "l1" : "l2"},
                 {"lambda", m.reg.lambda}}},
        {"diagnostics",
         {{"final_loss", m.diagnostics.final_loss},
          {"residual", m.diagnostics.residual},
          {"iterations", m.diagnostics.iterations},
          {"converged", m.diagnostics.converged},
          {"constant", m.diagnostics.constant}}}};
}

namespace {

// log(1 + exp(-m)), stable for large |m|.
double log1pexp_neg(double m) {
    if (m > 0.0) return std::log1p(std::exp(-m));
    return -m + std::log1p(std::exp(m));
}

struct Objective {
    const Dataset& data;
    double total_weight;

    // Smooth part: average logistic loss (+ L2 ridge when lambda2 > 0).
    double smooth(const std::vector<double>& w, double b, double lambda2) const {
        double loss = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto xi = data.row(i);
            double s = b;
            for (int j = 0; j < data.dim; ++j) s += w[j] * xi[j];
            loss += data.w[i] * log1pexp_neg(data.y[i] * s);
        }
        loss /= total_weight;
        if (lambda2 > 0.0) {
            double sq = 0.0;
            for (double wj : w) sq += wj * wj;
            loss += 0.5 * lambda2 * sq;
        }
        return loss;
    }

    // Gradient of the smooth part; g has dim+1 entries, bias last.
    void smooth_grad(const std::vector<double>& w, double b, double lambda2,
                     std::vector<double>& g) const {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto xi = data.row(i);
            double s = b;
            for (int j = 0; j < data.dim; ++j) s += w[j] * xi[j];
            const double m = data.y[i] * s;
            // d/ds log(1+e^{-ys}) = -y * sigma(-ys)
            const double coef = -data.w[i] * data.y[i] / (1.0 + std::exp(m));
            for (int j = 0; j < data.dim; ++j) g[j] += coef * xi[j];
            g[data.dim] += coef;
        }
        for (double& gj : g) gj /= total_weight;
        if (lambda2 > 0.0)
            for (int j = 0; j < data.dim; ++j) g[j] += lambda2 * w[j];
    }
};

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

double logistic_objective(const Dataset& data, const LinearModel& m) {
    double total = 0.0;
    for (double wi : data.w) total += wi;
    Objective obj{data, total};
    const bool l1 = m.reg.kind == Regularization::Kind::L1;
    double val = obj.smooth(m.weights, m.bias, l1 ? 0.0 : m.reg.lambda);
    if (l1) {
        double abs_sum = 0.0;
        for (double wj : m.weights) abs_sum += std::abs(wj);
        val += m.reg.lambda * abs_sum;
    }
    return val;
}

std::vector<double> logistic_gradient(const Dataset& data, const LinearModel& m) {
    double total = 0.0;
    for (double wi : data.w) total += wi;
    Objective obj{data, total};
    std::vector<double> g(m.weights.size() + 1, 0.0);
    const bool l1 = m.reg.kind == Regularization::Kind::L1;
    obj.smooth_grad(m.weights, m.bias, l1 ? 0.0 : m.reg.lambda, g);
    return g;
}

LinearModel train_logistic(const Dataset& data, Regularization reg, double tol, int max_iter) {
    if (!(reg.lambda >= 0.0) || std::isnan(reg.lambda))
        throw std::invalid_argument("regularization strength must be a finite non-negative number");
    if (data.size() == 0) throw std::invalid_argument("empty dataset");

    LinearModel model;
    model.reg = reg;
    model.weights.assign(static_cast<std::size_t>(data.dim), 0.0);

    bool has_pos = false, has_neg = false;
    double total_weight = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.w[i] <= 0.0) continue;
        (data.y[i] > 0 ? has_pos : has_neg) = true;
        total_weight += data.w[i];
    }
    if (!has_pos || !has_neg) {
        model.bias = has_pos ? 1.0 : -1.0;
        model.diagnostics.constant = true;
        model.diagnostics.converged = true;
        return model;
    }

    const bool l1 = reg.kind == Regularization::Kind::L1;
    const double lambda2 = l1 ? 0.0 : reg.lambda;
    Objective obj{data, total_weight};

    const int n = data.dim + 1;
    std::vector<double> g(n, 0.0), g_prev(n, 0.0), w_prev;
    double b_prev = 0.0;
    double fval = obj.smooth(model.weights, model.bias, lambda2);
    double step = 1.0;

    int it = 0;
    for (; it < max_iter; ++it) {
        obj.smooth_grad(model.weights, model.bias, lambda2, g);

        // Optimality residual.
        double res = 0.0;
        if (l1) {
            for (int j = 0; j < data.dim; ++j) {
                const double wj = model.weights[j];
                const double r = wj != 0.0 ? std::abs(g[j] + reg.lambda * (wj > 0 ? 1.0 : -1.0))
                                           : std::max(0.0, std::abs(g[j]) - reg.lambda);
                res = std::max(res, r);
            }
            res = std::max(res, std::abs(g[data.dim]));
        } else {
            double sq = 0.0;
            for (double gj : g) sq += gj * gj;
            res = std::sqrt(sq);
        }
        model.diagnostics.residual = res;
        if (res <= tol) {
            model.diagnostics.converged = true;
            break;
        }

        // Barzilai-Borwein step length, safeguarded by backtracking below.
        if (it > 0) {
            double sy = 0.0, ss = 0.0;
            for (int j = 0; j < data.dim; ++j) {
                const double s = model.weights[j] - w_prev[j];
                ss += s * s;
                sy += s * (g[j] - g_prev[j]);
            }
            const double sb = model.bias - b_prev;
            ss += sb * sb;
            sy += sb * (g[data.dim] - g_prev[data.dim]);
            step = (sy > 1e-30) ? ss / sy : step * 2.0;
            step = std::clamp(step, 1e-12, 1e8);
        }
        w_prev = model.weights;
        b_prev = model.bias;
        g_prev = g;

        std::vector<double> w_new(model.weights.size());
        double b_new = 0.0, f_new = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            double quad = 0.0, lin = 0.0;
            for (int j = 0; j < data.dim; ++j) {
                double wj = model.weights[j] - step * g[j];
                if (l1) wj = soft_threshold(wj, step * reg.lambda);
                w_new[j] = wj;
                const double dj = wj - model.weights[j];
                quad += dj * dj;
                lin += g[j] * dj;
            }
            b_new = model.bias - step * g[data.dim];
            const double db = b_new - model.bias;
            quad += db * db;
            lin += g[data.dim] * db;
            f_new = obj.smooth(w_new, b_new, lambda2);
            // Sufficient-decrease test on the smooth part (standard proximal
            // backtracking); for the pure gradient step this reduces to Armijo.
            if (f_new <= fval + lin + quad / (2.0 * step) + 1e-15) break;
            step *= 0.5;
        }
        double moved = std::abs(b_new - model.bias);
        for (int j = 0; j < data.dim; ++j) moved += std::abs(w_new[j] - model.weights[j]);
        if (moved == 0.0) break;  // no movement possible at the smallest step
        model.weights = std::move(w_new);
        model.bias = b_new;
        fval = f_new;
    }
    model.diagnostics.iterations = it;
    model.diagnostics.final_loss = logistic_objective(data, model);
    return model;
}

double zero_one_risk(const Dataset& data, const LinearModel& m) {
    double total = 0.0, wrong = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        total += data.w[i];
        if (m.decide(data.row(i)) != data.y[i]) wrong += data.w[i];
    }
    return total > 0.0 ? wrong / total : 0.0;
}

std::vector<double> featurize_bits(std::uint32_t v1, std::uint32_t v2, int k) {
    std::vector<double> f(static_cast<std::size_t>(4) * k);
    for (int i = 0; i < k; ++i) {
        const double a = (v1 >> i) & 1;
        const double b = (v2 >> i) & 1;
        f[i] = a;
        f[k + i] = b;
        f[2 * k + i] = a - b;
        f[3 * k + i] = std::abs(a - b);
    }
    return f;
}

std::vector<double> featurize_pair(const LabeledPair& pair, const std::vector<int>& subset) {
    const int k = static_cast<int>(subset.size());
    std::uint32_t v1 = 0, v2 = 0;
    for (int i = 0; i < k; ++i) {
        const int j = subset[i];
        if (j < 0 || j >= static_cast<int>(pair.x_first.size()))
            throw std::invalid_argument("subset index out of range");
        v1 |= static_cast<std::uint32_t>(pair.x_first[j]) << i;
        v2 |= static_cast<std::uint32_t>(pair.x_second[j]) << i;
    }
    return featurize_bits(v1, v2, k);
}

}  // namespace ocp
