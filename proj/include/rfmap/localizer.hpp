#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "rfmap/geometry.hpp"
#include "rfmap/net.hpp"

namespace rfmap {

struct LocalizationSample {
    Vector features;  // rss per AP, dBm
    Point2 target;
};

/// Seeded shuffle, then split at floor(n * fraction). Partition: disjoint
/// and exhaustive.
inline std::pair<std::vector<LocalizationSample>, std::vector<LocalizationSample>> split_dataset(
    const std::vector<LocalizationSample>& samples, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw DataError("split_dataset: fraction must be in (0, 1)");
    if (samples.size() < 2) throw DataError("split_dataset: need at least 2 samples");
    std::vector<std::size_t> perm(samples.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto n_train = static_cast<std::size_t>(std::floor(samples.size() * train_fraction));
    std::vector<LocalizationSample> train, test;
    for (std::size_t i = 0; i < perm.size(); ++i)
        (i < n_train ? train : test).push_back(samples[perm[i]]);
    return {std::move(train), std::move(test)};
}

struct LocalizerModel {
    DenseNetwork net;
    Vector feature_mean;   // train-set z-score stats
    Vector feature_scale;
};

struct LocalizerArch {
    std::vector<int> hidden{64, 64};
};

namespace detail {

inline Matrix feature_matrix(const std::vector<LocalizationSample>& samples) {
    Matrix x(samples.size(), samples.front().features.size());
    for (std::size_t i = 0; i < samples.size(); ++i) x.row(i) = samples[i].features.transpose();
    return x;
}

inline Matrix target_matrix(const std::vector<LocalizationSample>& samples) {
    Matrix y(samples.size(), 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        y(i, 0) = samples[i].target.x_m;
        y(i, 1) = samples[i].target.y_m;
    }
    return y;
}

}  // namespace detail

/// Minibatch MSE regression from normalized RSS features to (x, y).
inline LocalizerModel train_localizer(const std::vector<LocalizationSample>& train,
                                      const LocalizerArch& arch, const TrainConfig& config) {
    if (train.empty()) throw DataError("train_localizer: empty training set");
    config.validate();
    const long n = static_cast<long>(train.size());
    const long n_features = train.front().features.size();
    for (const auto& s : train)
        if (s.features.size() != n_features)
            throw DataError("train_localizer: inconsistent feature length");

    Matrix x = detail::feature_matrix(train);
    Matrix y = detail::target_matrix(train);

    LocalizerModel model;
    model.feature_mean = x.colwise().mean();
    model.feature_scale = Vector(n_features);
    for (long c = 0; c < n_features; ++c) {
        double var = (x.col(c).array() - model.feature_mean(c)).square().mean();
        model.feature_scale(c) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    Matrix xn = (x.rowwise() - model.feature_mean.transpose()).array().rowwise() /
                model.feature_scale.transpose().array();

    std::vector<int> sizes{static_cast<int>(n_features)};
    sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
    sizes.push_back(2);
    std::vector<Activation> acts(sizes.size() - 2, Activation::relu);
    acts.push_back(Activation::identity);
    model.net = make_network(sizes, acts, derive_seed(config.seed, "localizer-init"));

    OptState state = OptState::init(model.net);
    std::mt19937_64 rng(derive_seed(config.seed, "localizer-batches"));
    std::vector<long> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const int batch = std::min<long>(config.batch_size, n);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (long start = 0; start < n; start += batch) {
            long size = std::min<long>(batch, n - start);
            Matrix xb(size, n_features), yb(size, 2);
            for (long i = 0; i < size; ++i) {
                xb.row(i) = xn.row(perm[start + i]);
                yb.row(i) = y.row(perm[start + i]);
            }
            ForwardCache cache;
            Matrix pred = forward_cached(model.net, xb, cache);
            double loss = mse_loss(pred, yb);
            if (!std::isfinite(loss))
                throw NumericError("train_localizer: non-finite loss at epoch " +
                                   std::to_string(epoch));
            Gradients g = backward(model.net, cache, mse_loss_grad(pred, yb));
            step(model.net, g, config, state);
        }
    }
    return model;
}

inline Matrix predict_positions(const LocalizerModel& model,
                                const std::vector<LocalizationSample>& samples) {
    Matrix x = detail::feature_matrix(samples);
    Matrix xn = (x.rowwise() - model.feature_mean.transpose()).array().rowwise() /
                model.feature_scale.transpose().array();
    return forward(model.net, xn);
}

/// Mean over samples of ((x_hat - x)^2 + (y_hat - y)^2) / 2, in m².
inline double evaluate_mse(const LocalizerModel& model,
                           const std::vector<LocalizationSample>& test) {
    if (test.empty()) throw DataError("evaluate_mse: empty test set");
    Matrix pred = predict_positions(model, test);
    Matrix y = detail::target_matrix(test);
    return (pred - y).squaredNorm() / (2.0 * test.size());
}

/// Percent reduction of new_mse relative to base_mse; negative when worse.
inline double error_reduction(double base_mse, double new_mse) {
    if (!(base_mse > 0.0)) throw DataError("error_reduction: base MSE must be positive");
    return (1.0 - new_mse / base_mse) * 100.0;
}

}  // namespace rfmap
