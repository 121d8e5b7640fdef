#pragma once

#include "apnsp/error.hpp"
#include "apnsp/features.hpp"
#include "apnsp/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace apnsp {

/// Fully connected Q-value network. Hidden layers use ReLU, the output layer is linear.
/// All parameters live in one flat vector: for each layer, the row-major weight
/// matrix (out x in) followed by its bias vector.
class Mlp {
public:
    static constexpr std::size_t kMaxWidth = 1024;

    Mlp() = default;

    explicit Mlp(std::vector<std::size_t> dims, double leak = 0.0) : dims_(std::move(dims)), leak_(leak) {
        if (!(leak_ >= 0.0 && leak_ < 1.0)) throw ParameterError("rectifier leak must be in [0, 1)");
        if (dims_.size() < 2) throw ParameterError("network needs at least input and output layers");
        for (auto d : dims_)
            if (d == 0 || d > kMaxWidth) throw ParameterError("layer width must be in 1.." + std::to_string(kMaxWidth));
        if (dims_.back() != 1) throw ParameterError("network output must be scalar");
        std::size_t off = 0;
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
            w_off_.push_back(off);
            off += dims_[l] * dims_[l + 1];
            b_off_.push_back(off);
            off += dims_[l + 1];
        }
        params_.assign(off, 0.0);
    }

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t input_size() const { return dims_.front(); }
    std::size_t layers() const { return dims_.size() - 1; }
    /// Negative-side slope of the hidden rectifier; 0 is a plain ReLU.
    double leak() const { return leak_; }

    double activate(double s) const { return s > 0.0 ? s : leak_ * s; }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    std::span<double> weights(std::size_t layer) {
        return {params_.data() + w_off_[layer], dims_[layer] * dims_[layer + 1]};
    }
    std::span<const double> weights(std::size_t layer) const {
        return {params_.data() + w_off_[layer], dims_[layer] * dims_[layer + 1]};
    }
    std::span<double> biases(std::size_t layer) { return {params_.data() + b_off_[layer], dims_[layer + 1]}; }
    std::span<const double> biases(std::size_t layer) const {
        return {params_.data() + b_off_[layer], dims_[layer + 1]};
    }

    double forward(std::span<const double> x) const { return evaluate<double>(x); }

    /// Forward pass accumulated in T; gradient checks use long double to keep
    /// finite-difference roundoff far below the tolerance.
    template <typename T>
    T evaluate(std::span<const double> x) const {
        if (x.size() != input_size())
            throw ParameterError("input has " + std::to_string(x.size()) + " features, model expects " +
                                 std::to_string(input_size()));
        T buf_a[kMaxWidth];
        T buf_b[kMaxWidth];
        T* a = buf_a;
        T* b = buf_b;
        std::copy(x.begin(), x.end(), a);
        for (std::size_t l = 0; l < layers(); ++l) {
            const std::size_t in = dims_[l], out = dims_[l + 1];
            const double* w = params_.data() + w_off_[l];
            const double* bias = params_.data() + b_off_[l];
            const bool hidden = l + 1 < layers();
            for (std::size_t j = 0; j < out; ++j) {
                T s = bias[j];
                const double* row = w + j * in;
                for (std::size_t i = 0; i < in; ++i) s += row[i] * a[i];
                b[j] = hidden ? (s > 0 ? s : static_cast<T>(leak_) * s) : s;
            }
            std::swap(a, b);
        }
        return a[0];
    }

    double forward(const FeatureVector& f) const { return forward(f.view()); }

    struct BackpropWorkspace {
        std::vector<std::size_t> offsets;
        std::vector<double> acts, delta, prev;
    };

    /// Adds d(scale * output)/d(params) at x into grad; returns the output.
    double backprop(std::span<const double> x, double scale, std::span<double> grad) const;
    double backprop(std::span<const double> x, double scale, std::span<double> grad, BackpropWorkspace& ws) const;
    /// Forward pass that keeps activations in ws for a following backward().
    double forward_cached(std::span<const double> x, BackpropWorkspace& ws) const;
    /// Adds scale * d(output)/d(params) for the input last given to forward_cached.
    void backward(double scale, std::span<double> grad, BackpropWorkspace& ws) const;

private:
    std::vector<std::size_t> dims_;
    double leak_ = 0.0;
    std::vector<std::size_t> w_off_;
    std::vector<std::size_t> b_off_;
    std::vector<double> params_;
};

inline double Mlp::backprop(std::span<const double> x, double scale, std::span<double> grad) const {
    BackpropWorkspace ws;
    return backprop(x, scale, grad, ws);
}

inline double Mlp::backprop(std::span<const double> x, double scale, std::span<double> grad,
                            BackpropWorkspace& ws) const {
    const double out = forward_cached(x, ws);
    backward(scale, grad, ws);
    return out;
}

inline double Mlp::forward_cached(std::span<const double> x, BackpropWorkspace& ws) const {
    // Activations of every layer, packed; offsets[l] is where layer l starts.
    ws.offsets.resize(dims_.size() + 1);
    ws.offsets[0] = 0;
    for (std::size_t l = 0; l < dims_.size(); ++l) ws.offsets[l + 1] = ws.offsets[l] + dims_[l];
    ws.acts.resize(ws.offsets.back());
    std::copy(x.begin(), x.end(), ws.acts.begin());
    for (std::size_t l = 0; l < layers(); ++l) {
        const std::size_t in = dims_[l], out = dims_[l + 1];
        const double* w = params_.data() + w_off_[l];
        const double* bias = params_.data() + b_off_[l];
        const double* a = ws.acts.data() + ws.offsets[l];
        double* next = ws.acts.data() + ws.offsets[l + 1];
        const bool hidden = l + 1 < layers();
        for (std::size_t j = 0; j < out; ++j) {
            double s = bias[j];
            const double* row = w + j * in;
            for (std::size_t i = 0; i < in; ++i) s += row[i] * a[i];
            next[j] = hidden ? activate(s) : s;
        }
    }
    return ws.acts[ws.offsets[layers()]];
}

inline void Mlp::backward(double scale, std::span<double> grad, BackpropWorkspace& ws) const {
    ws.delta.assign(1, scale);
    for (std::size_t l = layers(); l-- > 0;) {
        const std::size_t in = dims_[l], out = dims_[l + 1];
        const double* w = params_.data() + w_off_[l];
        const double* a = ws.acts.data() + ws.offsets[l];
        double* gw = grad.data() + w_off_[l];
        double* gb = grad.data() + b_off_[l];
        ws.prev.assign(in, 0.0);
        for (std::size_t j = 0; j < out; ++j) {
            const double dj = ws.delta[j];
            if (dj == 0.0) continue;
            gb[j] += dj;
            const double* row = w + j * in;
            double* grow = gw + j * in;
            for (std::size_t i = 0; i < in; ++i) {
                grow[i] += dj * a[i];
                ws.prev[i] += dj * row[i];
            }
        }
        if (l > 0)
            for (std::size_t i = 0; i < in; ++i)
                if (a[i] <= 0.0) ws.prev[i] *= leak_;
        ws.delta.swap(ws.prev);
    }
}

/// Hidden widths [50 * omega, omega] for omega input features.
inline std::vector<std::size_t> q_network_dims(std::size_t om) {
    return {om, 50 * om, om, 1};
}

/// Each weight ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from mt19937_64(seed), drawn layer
/// by layer in row-major order. Biases start at zero.
inline Mlp init_model(std::size_t om, std::uint64_t seed, double leak = 0.0) {
    if (om != 2 && om != 4) throw ParameterError("unsupported input width " + std::to_string(om) + " (expected 2 or 4)");
    Mlp m(q_network_dims(om), leak);
    Engine eng(seed);
    for (std::size_t l = 0; l < m.layers(); ++l) {
        const double limit = 1.0 / std::sqrt(static_cast<double>(m.dims()[l]));
        for (double& w : m.weights(l)) w = uniform(eng, -limit, limit);
    }
    return m;
}

enum class Optimizer { Sgd, Adam };

inline std::string_view to_string(Optimizer o) { return o == Optimizer::Sgd ? "sgd" : "adam"; }

inline Optimizer optimizer_from_string(std::string_view s) {
    if (s == "sgd") return Optimizer::Sgd;
    if (s == "adam") return Optimizer::Adam;
    throw ParameterError("unknown optimizer '" + std::string(s) + "' (expected sgd | adam)");
}

struct TrainConfig {
    std::size_t iterations = 5000;
    double learning_rate = 1e-3;
    std::size_t batch = 0;  ///< 0 = full batch; otherwise contiguous batches cycling through the data
    Optimizer optimizer = Optimizer::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;

    std::string describe() const {
        std::ostringstream os;
        os << "iterations=" << iterations << ",lr=" << learning_rate << ",batch=" << (batch ? std::to_string(batch) : "full")
           << ",optimizer=" << to_string(optimizer);
        return os.str();
    }
};

/// Mean squared error over rows [first, last) and its gradient.
inline double mse_gradient(const Mlp& model, std::span<const std::vector<double>> xs, std::span<const double> ys,
                           std::size_t first, std::size_t last, std::span<double> grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double count = static_cast<double>(last - first);
    double loss = 0.0;
    Mlp::BackpropWorkspace ws;
    for (std::size_t k = first; k < last; ++k) {
        const double err = model.forward_cached(xs[k], ws) - ys[k];
        loss += err * err;
        model.backward(2.0 * err / count, grad, ws);
    }
    return loss / count;
}

inline double mse(const Mlp& model, std::span<const std::vector<double>> xs, std::span<const double> ys) {
    double loss = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double err = model.forward(xs[k]) - ys[k];
        loss += err * err;
    }
    return loss / static_cast<double>(xs.size());
}

struct TrainResult {
    Mlp model;
    std::vector<double> losses;  ///< loss before each update step
};

/// Gradient descent on mean((H(x) - y)^2). Deterministic for a given model and config.
inline TrainResult train(Mlp model, std::span<const std::vector<double>> xs, std::span<const double> ys,
                         const TrainConfig& cfg) {
    if (xs.empty() || xs.size() != ys.size())
        throw ParameterError("training needs |X| == |Y| >= 1 (got " + std::to_string(xs.size()) + " and " +
                             std::to_string(ys.size()) + ")");
    if (cfg.iterations < 1) throw ParameterError("iterations must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
    for (const auto& x : xs)
        if (x.size() != model.input_size()) throw ParameterError("training row width does not match the model input");

    const std::size_t np = model.params().size();
    std::vector<double> grad(np), m1(np, 0.0), m2(np, 0.0);
    const std::size_t batch = cfg.batch == 0 ? xs.size() : std::min(cfg.batch, xs.size());
    std::size_t cursor = 0;
    double b1t = 1.0, b2t = 1.0;

    TrainResult res;
    res.losses.reserve(cfg.iterations);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        if (cursor >= xs.size()) cursor = 0;
        const std::size_t last = std::min(cursor + batch, xs.size());
        const double loss = mse_gradient(model, xs, ys, cursor, last, grad);
        cursor = last;
        if (!std::isfinite(loss))
            throw TrainingError("non-finite loss " + std::to_string(loss) + " at iteration " + std::to_string(it) +
                                " (" + cfg.describe() + ")");
        res.losses.push_back(loss);

        auto p = model.params();
        if (cfg.optimizer == Optimizer::Sgd) {
            for (std::size_t k = 0; k < np; ++k) p[k] -= cfg.learning_rate * grad[k];
        } else {
            b1t *= cfg.beta1;
            b2t *= cfg.beta2;
            for (std::size_t k = 0; k < np; ++k) {
                m1[k] = cfg.beta1 * m1[k] + (1.0 - cfg.beta1) * grad[k];
                m2[k] = cfg.beta2 * m2[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
                const double mhat = m1[k] / (1.0 - b1t);
                const double vhat = m2[k] / (1.0 - b2t);
                p[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
            }
        }
    }
    res.model = std::move(model);
    return res;
}

inline TrainResult train(Mlp model, const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                         const TrainConfig& cfg) {
    return train(std::move(model), std::span<const std::vector<double>>(xs), std::span<const double>(ys), cfg);
}

/// Largest relative difference between the backprop gradient of (H(x) - y)^2 and a
/// central finite difference with step h, over all parameters. Perturbed outputs are
/// evaluated in long double and divided by the step actually representable in double.
/// Denominators are floored at 1e-7 so vanishing gradients compare absolutely.
inline double gradient_check(const Mlp& model, std::span<const double> x, double y, double h = 1e-5) {
    Mlp probe = model;
    std::vector<double> analytic(model.params().size(), 0.0);
    const double out = model.forward(x);
    model.backprop(x, 2.0 * (out - y), analytic);
    auto sq_err = [&](const Mlp& m) {
        const long double e = m.evaluate<long double>(x) - y;
        return e * e;
    };
    double worst = 0.0;
    auto p = probe.params();
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double saved = p[k];
        const double hi = saved + h, lo = saved - h;
        p[k] = hi;
        const long double up = sq_err(probe);
        p[k] = lo;
        const long double down = sq_err(probe);
        p[k] = saved;
        const double numeric = static_cast<double>((up - down) / (static_cast<long double>(hi) - lo));
        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-7});
        worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
    }
    return worst;
}

} // namespace apnsp
