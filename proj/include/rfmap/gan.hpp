#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rfmap/divergence.hpp"
#include "rfmap/net.hpp"

namespace rfmap {

/// Clamp applied to selected sample columns after denormalization (the
/// location components of a generated tuple stay inside the room).
struct ColumnBounds {
    int column = 0;
    double lo = 0.0;
    double hi = 0.0;
};

struct GanModel {
    DenseNetwork generator;      // latent_dim -> sample_dim, identity output
    DenseNetwork discriminator;  // sample_dim -> 1, sigmoid output
    int latent_dim = 0;
    Vector norm_mean;            // per-dimension stats of the real data
    Vector norm_scale;
    std::vector<ColumnBounds> output_bounds;
};

struct GanArch {
    int latent_dim = 8;
    std::vector<int> generator_hidden{32, 32};
    std::vector<int> discriminator_hidden{32, 32};
};

struct GanEpochStats {
    int epoch = 0;
    double d_loss = 0.0;
    double g_loss = 0.0;
    double d_real_mean = 0.0;
    double d_fake_mean = 0.0;
    double js_estimate = std::numeric_limits<double>::quiet_NaN();
};

struct GanTrainLog {
    std::vector<GanEpochStats> epochs;
};

/// Empirical minimax value: mean log D(real) + mean log(1 - D(fake)).
inline double value_function(const Vector& d_real, const Vector& d_fake) {
    auto mean_log = [](const Vector& v, bool complement) {
        double sum = 0.0;
        for (long i = 0; i < v.size(); ++i) {
            double p = std::clamp(v(i), kProbClamp, 1.0 - kProbClamp);
            sum += std::log(complement ? 1.0 - p : p);
        }
        return sum / v.size();
    };
    return mean_log(d_real, false) + mean_log(d_fake, true);
}

namespace detail {

inline Matrix sample_latent(int n, int latent_dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(n, latent_dim);
    for (long r = 0; r < n; ++r)
        for (long c = 0; c < latent_dim; ++c) z(r, c) = normal(rng);
    return z;
}

}  // namespace detail

/// One discriminator ascent step on log D(real) + log(1 - D(fake)), realized
/// as descent on the two-sided log loss. Returns the loss before the step.
inline double discriminator_step(GanModel& model, const Matrix& real_batch,
                                 const Matrix& fake_batch, const TrainConfig& config,
                                 OptState& state) {
    ForwardCache rc, fc;
    Matrix d_real = forward_cached(model.discriminator, real_batch, rc);
    Matrix d_fake = forward_cached(model.discriminator, fake_batch, fc);
    Matrix ones = Matrix::Ones(d_real.rows(), 1);
    Matrix zeros = Matrix::Zero(d_fake.rows(), 1);
    double loss = 0.5 * (bce_loss(d_real, ones) + bce_loss(d_fake, zeros));
    Gradients gr = backward(model.discriminator, rc, 0.5 * bce_loss_grad(d_real, ones));
    Gradients gf = backward(model.discriminator, fc, 0.5 * bce_loss_grad(d_fake, zeros));
    for (std::size_t l = 0; l < gr.weight_grads.size(); ++l) {
        gr.weight_grads[l] += gf.weight_grads[l];
        gr.bias_grads[l] += gf.bias_grads[l];
    }
    step(model.discriminator, gr, config, state);
    return loss;
}

/// One generator step. Non-saturating by default (descend -log D(G(z)));
/// the literal log(1 - D(G(z))) objective is available for study.
inline double generator_step(GanModel& model, const Matrix& latent, const TrainConfig& config,
                             OptState& state, bool literal_loss = false) {
    ForwardCache gc, dc;
    Matrix fake = forward_cached(model.generator, latent, gc);
    Matrix d_fake = forward_cached(model.discriminator, fake, dc);
    double loss;
    Matrix d_grad;
    long n = d_fake.rows();
    if (literal_loss) {
        // minimize mean log(1 - D(G(z)))
        loss = 0.0;
        d_grad = Matrix(n, 1);
        for (long i = 0; i < n; ++i) {
            double p = std::clamp(d_fake(i, 0), kProbClamp, 1.0 - kProbClamp);
            loss += std::log(1.0 - p) / n;
            d_grad(i, 0) = -1.0 / (1.0 - p) / n;
        }
    } else {
        Matrix ones = Matrix::Ones(n, 1);
        loss = bce_loss(d_fake, ones);
        d_grad = bce_loss_grad(d_fake, ones);
    }
    Gradients through_d = backward(model.discriminator, dc, d_grad);
    Gradients g = backward(model.generator, gc, through_d.input_grad);
    step(model.generator, g, config, state);
    return loss;
}

struct GanTrainOptions {
    bool literal_generator_loss = false;
    int js_interval = 0;        // 0 = never; otherwise every js_interval epochs
    int js_bins = 30;
    Matrix eval_samples;        // held-out real data (normalized), for js_interval
};

/// Alternating adversarial training on pre-normalized samples. The model
/// template carries the architecture; parameters are (re)initialized from
/// the config seed so a given seed gives an identical trajectory.
inline GanTrainLog train_gan(const Matrix& real_samples, const TrainConfig& config, GanModel& model,
                             const GanTrainOptions& options = {}) {
    config.validate();
    if (real_samples.rows() < 2 * config.batch_size)
        throw DataError("train_gan: need at least 2*batch_size real samples");
    if (real_samples.cols() != model.generator.output_size())
        throw DataError("train_gan: sample width does not match generator output");

    std::mt19937_64 rng(derive_seed(config.seed, "gan-train"));
    OptState d_state = OptState::init(model.discriminator);
    OptState g_state = OptState::init(model.generator);
    TrainConfig d_config = config;
    TrainConfig g_config = config;

    const long n = real_samples.rows();
    std::vector<long> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    GanTrainLog log;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double d_loss_sum = 0.0, g_loss_sum = 0.0;
        int batches = 0;
        for (long start = 0; start + config.batch_size <= n; start += config.batch_size) {
            Matrix real_batch(config.batch_size, real_samples.cols());
            for (int i = 0; i < config.batch_size; ++i)
                real_batch.row(i) = real_samples.row(perm[start + i]);
            Matrix z = detail::sample_latent(config.batch_size, model.latent_dim, rng);
            Matrix fake_batch = forward(model.generator, z);
            d_loss_sum += discriminator_step(model, real_batch, fake_batch, d_config, d_state);
            Matrix z2 = detail::sample_latent(config.batch_size, model.latent_dim, rng);
            g_loss_sum += generator_step(model, z2, g_config, g_state,
                                         options.literal_generator_loss);
            ++batches;
        }
        if (batches == 0) throw DataError("train_gan: batch size larger than dataset");

        GanEpochStats stats;
        stats.epoch = epoch;
        stats.d_loss = d_loss_sum / batches;
        stats.g_loss = g_loss_sum / batches;
        if (!std::isfinite(stats.d_loss) || !std::isfinite(stats.g_loss))
            throw NumericError("train_gan: non-finite loss at epoch " + std::to_string(epoch));

        Matrix z_eval = detail::sample_latent(256, model.latent_dim, rng);
        Matrix fake_eval = forward(model.generator, z_eval);
        Matrix real_eval(std::min<long>(256, n), real_samples.cols());
        for (long i = 0; i < real_eval.rows(); ++i) real_eval.row(i) = real_samples.row(perm[i % n]);
        stats.d_real_mean = forward(model.discriminator, real_eval).mean();
        stats.d_fake_mean = forward(model.discriminator, fake_eval).mean();

        if (options.js_interval > 0 && options.eval_samples.rows() > 0 &&
            (epoch + 1) % options.js_interval == 0 && real_samples.cols() == 1) {
            std::vector<double> gen(fake_eval.data(), fake_eval.data() + fake_eval.rows());
            std::vector<double> held(options.eval_samples.data(),
                                     options.eval_samples.data() + options.eval_samples.rows());
            double lo = std::min(*std::min_element(gen.begin(), gen.end()),
                                 *std::min_element(held.begin(), held.end()));
            double hi = std::max(*std::max_element(gen.begin(), gen.end()),
                                 *std::max_element(held.begin(), held.end()));
            stats.js_estimate = js_divergence(histogram(gen, options.js_bins, lo, hi + 1e-12),
                                              histogram(held, options.js_bins, lo, hi + 1e-12));
        }
        log.epochs.push_back(stats);
    }
    return log;
}

/// Per-dimension z-score stats of the raw real data; zero-variance
/// dimensions get unit scale.
inline void fit_normalization(GanModel& model, const Matrix& raw) {
    model.norm_mean = raw.colwise().mean();
    model.norm_scale = Vector(raw.cols());
    for (long c = 0; c < raw.cols(); ++c) {
        double var = (raw.col(c).array() - model.norm_mean(c)).square().mean();
        model.norm_scale(c) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
}

inline Matrix normalize_samples(const GanModel& model, const Matrix& raw) {
    return (raw.rowwise() - model.norm_mean.transpose()).array().rowwise() /
           model.norm_scale.transpose().array();
}

inline Matrix denormalize_samples(const GanModel& model, const Matrix& normalized) {
    return (normalized.array().rowwise() * model.norm_scale.transpose().array()).matrix()
               .rowwise() +
           model.norm_mean.transpose();
}

/// Builds an untrained model from the architecture spec; parameters seeded.
inline GanModel make_gan(const GanArch& arch, int sample_dim, std::uint64_t seed) {
    if (arch.latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
    GanModel model;
    model.latent_dim = arch.latent_dim;
    std::vector<int> g_sizes{arch.latent_dim};
    g_sizes.insert(g_sizes.end(), arch.generator_hidden.begin(), arch.generator_hidden.end());
    g_sizes.push_back(sample_dim);
    std::vector<Activation> g_acts(g_sizes.size() - 2, Activation::leaky_relu);
    g_acts.push_back(Activation::identity);
    model.generator = make_network(g_sizes, g_acts, derive_seed(seed, "gan-generator"));

    std::vector<int> d_sizes{sample_dim};
    d_sizes.insert(d_sizes.end(), arch.discriminator_hidden.begin(),
                   arch.discriminator_hidden.end());
    d_sizes.push_back(1);
    std::vector<Activation> d_acts(d_sizes.size() - 2, Activation::leaky_relu);
    d_acts.push_back(Activation::sigmoid);
    model.discriminator = make_network(d_sizes, d_acts, derive_seed(seed, "gan-discriminator"));
    model.norm_mean = Vector::Zero(sample_dim);
    model.norm_scale = Vector::Ones(sample_dim);
    return model;
}

/// Draws n denormalized samples from the generator; bounded columns are
/// clamped into their ranges.
inline Matrix generate_samples(const GanModel& model, int n, std::uint64_t seed) {
    if (n < 0) throw DataError("generate_samples: n must be >= 0");
    int dim = model.generator.output_size();
    if (n == 0) return Matrix(0, dim);
    std::mt19937_64 rng(seed);
    Matrix z = detail::sample_latent(n, model.latent_dim, rng);
    Matrix out = denormalize_samples(model, forward(model.generator, z));
    for (const auto& b : model.output_bounds) {
        if (b.column < 0 || b.column >= dim) throw ConfigError("output bound column out of range");
        for (long r = 0; r < out.rows(); ++r)
            out(r, b.column) = std::clamp(out(r, b.column), b.lo, b.hi);
    }
    return out;
}

/// Log export: `epoch,d_loss,g_loss,d_real_mean,d_fake_mean,js_estimate`.
inline void save_gan_log_csv(const GanTrainLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "epoch,d_loss,g_loss,d_real_mean,d_fake_mean,js_estimate\n";
    char buf[256];
    for (const auto& e : log.epochs) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.d_loss,
                      e.g_loss, e.d_real_mean, e.d_fake_mean, e.js_estimate);
        out << buf;
    }
}

inline nlohmann::json gan_to_json(const GanModel& model) {
    nlohmann::json j;
    j["latent_dim"] = model.latent_dim;
    j["generator"] = network_to_json(model.generator);
    j["discriminator"] = network_to_json(model.discriminator);
    j["norm_mean"] = std::vector<double>(model.norm_mean.data(),
                                         model.norm_mean.data() + model.norm_mean.size());
    j["norm_scale"] = std::vector<double>(model.norm_scale.data(),
                                          model.norm_scale.data() + model.norm_scale.size());
    nlohmann::json bounds = nlohmann::json::array();
    for (const auto& b : model.output_bounds)
        bounds.push_back({{"column", b.column}, {"lo", b.lo}, {"hi", b.hi}});
    j["output_bounds"] = bounds;
    return j;
}

inline GanModel gan_from_json(const nlohmann::json& j) {
    GanModel model;
    model.latent_dim = j.at("latent_dim").get<int>();
    model.generator = network_from_json(j.at("generator"));
    model.discriminator = network_from_json(j.at("discriminator"));
    auto mean = j.at("norm_mean").get<std::vector<double>>();
    auto scale = j.at("norm_scale").get<std::vector<double>>();
    model.norm_mean = Eigen::Map<Vector>(mean.data(), mean.size());
    model.norm_scale = Eigen::Map<Vector>(scale.data(), scale.size());
    for (const auto& b : j.value("output_bounds", nlohmann::json::array()))
        model.output_bounds.push_back(
            {b.at("column").get<int>(), b.at("lo").get<double>(), b.at("hi").get<double>()});
    return model;
}

}  // namespace rfmap
