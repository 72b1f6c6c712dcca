#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfmap/common.hpp"

namespace rfmap {

enum class Activation { identity, relu, leaky_relu, tanh_fn, sigmoid };

inline std::string activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::leaky_relu: return "leaky_relu";
        case Activation::tanh_fn: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    throw NumericError("unknown activation");
}

inline Activation activation_from_name(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "relu") return Activation::relu;
    if (s == "leaky_relu") return Activation::leaky_relu;
    if (s == "tanh") return Activation::tanh_fn;
    if (s == "sigmoid") return Activation::sigmoid;
    throw DataError("unknown activation tag '" + s + "'");
}

struct Layer {
    Matrix weights;  // out x in
    Vector biases;   // out
    Activation activation = Activation::identity;
    double leaky_alpha = 0.01;
};

struct DenseNetwork {
    std::vector<Layer> layers;

    int input_size() const { return static_cast<int>(layers.front().weights.cols()); }
    int output_size() const { return static_cast<int>(layers.back().weights.rows()); }
};

namespace detail {

inline Matrix apply_activation(const Matrix& z, Activation a, double alpha) {
    switch (a) {
        case Activation::identity: return z;
        case Activation::relu: return z.cwiseMax(0.0);
        case Activation::leaky_relu:
            return z.unaryExpr([alpha](double v) { return v > 0.0 ? v : alpha * v; });
        case Activation::tanh_fn: return z.array().tanh().matrix();
        case Activation::sigmoid:
            return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    }
    throw NumericError("unknown activation");
}

// Derivative w.r.t. the pre-activation, elementwise.
inline Matrix activation_grad(const Matrix& z, Activation a, double alpha) {
    switch (a) {
        case Activation::identity: return Matrix::Ones(z.rows(), z.cols());
        case Activation::relu:
            return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
        case Activation::leaky_relu:
            return z.unaryExpr([alpha](double v) { return v > 0.0 ? 1.0 : alpha; });
        case Activation::tanh_fn:
            return z.unaryExpr([](double v) {
                double t = std::tanh(v);
                return 1.0 - t * t;
            });
        case Activation::sigmoid:
            return z.unaryExpr([](double v) {
                double s = 1.0 / (1.0 + std::exp(-v));
                return s * (1.0 - s);
            });
    }
    throw NumericError("unknown activation");
}

}  // namespace detail

/// Glorot-uniform weights, zero biases.
inline DenseNetwork make_network(const std::vector<int>& sizes,
                                 const std::vector<Activation>& activations, std::uint64_t seed,
                                 double leaky_alpha = 0.01) {
    if (sizes.size() < 2) throw ConfigError("network needs at least input and output layers");
    if (activations.size() != sizes.size() - 1)
        throw ConfigError("one activation per layer required");
    std::mt19937_64 rng(seed);
    DenseNetwork net;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        int fan_in = sizes[l], fan_out = sizes[l + 1];
        if (fan_in < 1 || fan_out < 1) throw ConfigError("layer sizes must be positive");
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        Layer layer;
        layer.weights = Matrix::NullaryExpr(fan_out, fan_in, [&]() { return u(rng); });
        layer.biases = Vector::Zero(fan_out);
        layer.activation = activations[l];
        layer.leaky_alpha = leaky_alpha;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

struct ForwardCache {
    std::vector<Matrix> pre_activations;   // z per layer
    std::vector<Matrix> activations;       // a per layer, activations[0] = input
};

/// Batch is row-per-sample; returns the final activation and fills the cache.
inline Matrix forward_cached(const DenseNetwork& net, const Matrix& batch, ForwardCache& cache) {
    if (batch.cols() != net.input_size())
        throw DataError("forward: batch width does not match input layer");
    cache.pre_activations.clear();
    cache.activations.clear();
    cache.activations.push_back(batch);
    Matrix a = batch;
    for (const auto& layer : net.layers) {
        Matrix z = (a * layer.weights.transpose()).rowwise() + layer.biases.transpose();
        a = detail::apply_activation(z, layer.activation, layer.leaky_alpha);
        cache.pre_activations.push_back(std::move(z));
        cache.activations.push_back(a);
    }
    return a;
}

inline Matrix forward(const DenseNetwork& net, const Matrix& batch) {
    ForwardCache cache;
    return forward_cached(net, batch, cache);
}

struct Gradients {
    std::vector<Matrix> weight_grads;
    std::vector<Vector> bias_grads;
    Matrix input_grad;
};

/// Reverse-mode gradients given dL/d(output); also returns dL/d(input) so a
/// downstream network's loss can flow into an upstream generator.
inline Gradients backward(const DenseNetwork& net, const ForwardCache& cache,
                          const Matrix& loss_grad) {
    const auto n_layers = net.layers.size();
    if (cache.pre_activations.size() != n_layers)
        throw DataError("backward: cache does not match network");
    if (loss_grad.rows() != cache.activations.back().rows() ||
        loss_grad.cols() != cache.activations.back().cols())
        throw DataError("backward: loss gradient shape mismatch");

    Gradients g;
    g.weight_grads.resize(n_layers);
    g.bias_grads.resize(n_layers);
    Matrix delta = loss_grad;
    for (int l = static_cast<int>(n_layers) - 1; l >= 0; --l) {
        const auto& layer = net.layers[l];
        delta = delta.cwiseProduct(
            detail::activation_grad(cache.pre_activations[l], layer.activation, layer.leaky_alpha));
        g.weight_grads[l] = delta.transpose() * cache.activations[l];
        g.bias_grads[l] = delta.colwise().sum();
        delta = delta * layer.weights;
    }
    g.input_grad = std::move(delta);
    return g;
}

// ---- losses --------------------------------------------------------------

/// Mean over the batch of the per-sample squared error summed over outputs.
inline double mse_loss(const Matrix& pred, const Matrix& target) {
    return (pred - target).squaredNorm() / pred.rows();
}

inline Matrix mse_loss_grad(const Matrix& pred, const Matrix& target) {
    return 2.0 * (pred - target) / pred.rows();
}

inline constexpr double kProbClamp = 1e-7;

/// Binary cross-entropy with probabilities clamped away from 0 and 1.
inline double bce_loss(const Matrix& pred, const Matrix& labels) {
    double total = 0.0;
    for (long r = 0; r < pred.rows(); ++r) {
        for (long c = 0; c < pred.cols(); ++c) {
            double p = std::clamp(pred(r, c), kProbClamp, 1.0 - kProbClamp);
            double y = labels(r, c);
            total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        }
    }
    return total / pred.rows();
}

inline Matrix bce_loss_grad(const Matrix& pred, const Matrix& labels) {
    Matrix g(pred.rows(), pred.cols());
    for (long r = 0; r < pred.rows(); ++r) {
        for (long c = 0; c < pred.cols(); ++c) {
            double p = std::clamp(pred(r, c), kProbClamp, 1.0 - kProbClamp);
            double y = labels(r, c);
            g(r, c) = (-y / p + (1.0 - y) / (1.0 - p)) / pred.rows();
        }
    }
    return g;
}

// ---- optimizer -----------------------------------------------------------

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 32;
    int epochs = 1;
    OptimizerKind optimizer = OptimizerKind::adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (epochs < 0) throw ConfigError("epochs must be >= 0");
    }
};

struct OptState {
    long step_count = 0;
    std::vector<Matrix> m_w, v_w;
    std::vector<Vector> m_b, v_b;

    static OptState init(const DenseNetwork& net) {
        OptState s;
        for (const auto& layer : net.layers) {
            s.m_w.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
            s.v_w.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
            s.m_b.push_back(Vector::Zero(layer.biases.size()));
            s.v_b.push_back(Vector::Zero(layer.biases.size()));
        }
        return s;
    }
};

inline void step(DenseNetwork& net, const Gradients& grads, const TrainConfig& config,
                 OptState& state) {
    if (grads.weight_grads.size() != net.layers.size())
        throw DataError("step: gradient count does not match layers");
    if (config.optimizer == OptimizerKind::sgd) {
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            net.layers[l].weights -= config.learning_rate * grads.weight_grads[l];
            net.layers[l].biases -= config.learning_rate * grads.bias_grads[l];
        }
        return;
    }
    ++state.step_count;
    double b1 = config.adam_beta1, b2 = config.adam_beta2;
    double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        state.m_w[l] = b1 * state.m_w[l] + (1.0 - b1) * grads.weight_grads[l];
        state.v_w[l] = b2 * state.v_w[l] +
                       (1.0 - b2) * grads.weight_grads[l].cwiseProduct(grads.weight_grads[l]);
        state.m_b[l] = b1 * state.m_b[l] + (1.0 - b1) * grads.bias_grads[l];
        state.v_b[l] =
            b2 * state.v_b[l] + (1.0 - b2) * grads.bias_grads[l].cwiseProduct(grads.bias_grads[l]);
        Matrix m_hat_w = state.m_w[l] / bc1;
        Matrix v_hat_w = state.v_w[l] / bc2;
        Vector m_hat_b = state.m_b[l] / bc1;
        Vector v_hat_b = state.v_b[l] / bc2;
        layer.weights.array() -= config.learning_rate * m_hat_w.array() /
                                 (v_hat_w.array().sqrt() + config.adam_epsilon);
        layer.biases.array() -= config.learning_rate * m_hat_b.array() /
                                (v_hat_b.array().sqrt() + config.adam_epsilon);
    }
}

// ---- gradient check ------------------------------------------------------

enum class LossKind { squared_error, binary_log_loss };

inline double loss_value(LossKind kind, const Matrix& pred, const Matrix& target) {
    return kind == LossKind::squared_error ? mse_loss(pred, target) : bce_loss(pred, target);
}

inline Matrix loss_grad(LossKind kind, const Matrix& pred, const Matrix& target) {
    return kind == LossKind::squared_error ? mse_loss_grad(pred, target)
                                           : bce_loss_grad(pred, target);
}

/// Max relative error between backprop gradients and central differences.
inline double gradient_check(const DenseNetwork& net, const Matrix& batch, const Matrix& targets,
                             LossKind loss, double step_h) {
    if (!(step_h > 0.0) || step_h > 1e-2) throw DataError("gradient_check: step_h out of range");
    ForwardCache cache;
    Matrix out = forward_cached(net, batch, cache);
    Gradients analytic = backward(net, cache, loss_grad(loss, out, targets));

    DenseNetwork probe = net;
    double max_rel = 0.0;
    auto check_param = [&](double& param, double grad) {
        double saved = param;
        param = saved + step_h;
        double lp = loss_value(loss, forward(probe, batch), targets);
        param = saved - step_h;
        double lm = loss_value(loss, forward(probe, batch), targets);
        param = saved;
        double numeric = (lp - lm) / (2.0 * step_h);
        double denom = std::max({std::abs(numeric), std::abs(grad), 1e-8});
        max_rel = std::max(max_rel, std::abs(numeric - grad) / denom);
    };
    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        auto& layer = probe.layers[l];
        for (long r = 0; r < layer.weights.rows(); ++r)
            for (long c = 0; c < layer.weights.cols(); ++c)
                check_param(layer.weights(r, c), analytic.weight_grads[l](r, c));
        for (long r = 0; r < layer.biases.size(); ++r)
            check_param(layer.biases(r), analytic.bias_grads[l](r));
    }
    return max_rel;
}

// ---- persistence ---------------------------------------------------------

inline nlohmann::json network_to_json(const DenseNetwork& net) {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        nlohmann::json lj;
        lj["in"] = layer.weights.cols();
        lj["out"] = layer.weights.rows();
        lj["activation"] = activation_name(layer.activation);
        lj["leaky_alpha"] = layer.leaky_alpha;
        std::vector<double> w(layer.weights.size());
        for (long r = 0; r < layer.weights.rows(); ++r)
            for (long c = 0; c < layer.weights.cols(); ++c)
                w[r * layer.weights.cols() + c] = layer.weights(r, c);
        lj["weights"] = w;
        lj["biases"] = std::vector<double>(layer.biases.data(),
                                           layer.biases.data() + layer.biases.size());
        j["layers"].push_back(std::move(lj));
    }
    return j;
}

inline DenseNetwork network_from_json(const nlohmann::json& j) {
    DenseNetwork net;
    for (const auto& lj : j.at("layers")) {
        Layer layer;
        long in = lj.at("in").get<long>();
        long out = lj.at("out").get<long>();
        layer.activation = activation_from_name(lj.at("activation").get<std::string>());
        layer.leaky_alpha = lj.value("leaky_alpha", 0.01);
        auto w = lj.at("weights").get<std::vector<double>>();
        auto b = lj.at("biases").get<std::vector<double>>();
        if (static_cast<long>(w.size()) != in * out || static_cast<long>(b.size()) != out)
            throw DataError("network json: parameter array size mismatch");
        layer.weights = Matrix(out, in);
        for (long r = 0; r < out; ++r)
            for (long c = 0; c < in; ++c) layer.weights(r, c) = w[r * in + c];
        layer.biases = Eigen::Map<Vector>(b.data(), out);
        if (!net.layers.empty() && net.layers.back().weights.rows() != in)
            throw DataError("network json: inconsistent layer dimensions");
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw DataError("network json: no layers");
    return net;
}

inline void save_network(const DenseNetwork& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << network_to_json(net).dump(2) << '\n';
}

inline DenseNetwork load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return network_from_json(j);
}

}  // namespace rfmap
