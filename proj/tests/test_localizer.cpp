#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "rfmap/localizer.hpp"

using namespace rfmap;

namespace {

std::vector<LocalizationSample> linear_samples(long n, std::uint64_t seed) {
    // targets are an affine function of the features, recoverable by an
    // identity-activation network
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<LocalizationSample> out;
    for (long i = 0; i < n; ++i) {
        LocalizationSample s;
        s.features = Vector(3);
        s.features << u(rng), u(rng), u(rng);
        s.target.x_m = 2.0 * s.features(0) - s.features(1) + 0.5;
        s.target.y_m = s.features(1) + 3.0 * s.features(2) - 1.0;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST_CASE("split produces the 270/30 partition of a 300-sample set") {
    auto samples = linear_samples(300, 1);
    auto [train, test] = split_dataset(samples, 0.9, 5);
    CHECK(train.size() == 270);
    CHECK(test.size() == 30);
}

TEST_CASE("split is a partition and deterministic") {
    auto samples = linear_samples(40, 2);
    auto [train1, test1] = split_dataset(samples, 0.7, 9);
    auto [train2, test2] = split_dataset(samples, 0.7, 9);
    CHECK(train1.size() + test1.size() == samples.size());
    REQUIRE(train1.size() == train2.size());
    for (std::size_t i = 0; i < train1.size(); ++i)
        CHECK(train1[i].target.x_m == train2[i].target.x_m);

    // partition: every original target appears exactly once across both halves
    std::multiset<double> original, recombined;
    for (const auto& s : samples) original.insert(s.target.x_m);
    for (const auto& s : train1) recombined.insert(s.target.x_m);
    for (const auto& s : test1) recombined.insert(s.target.x_m);
    CHECK(original == recombined);
}

TEST_CASE("split boundary leaves a single test sample") {
    auto samples = linear_samples(10, 3);
    auto [train, test] = split_dataset(samples, 0.95, 1);
    CHECK(train.size() == 9);
    CHECK(test.size() == 1);
}

TEST_CASE("split rejects out-of-range fractions") {
    auto samples = linear_samples(10, 4);
    CHECK_THROWS_AS(split_dataset(samples, 0.0, 1), DataError);
    CHECK_THROWS_AS(split_dataset(samples, 1.0, 1), DataError);
}

TEST_CASE("a single repeated sample is memorized") {
    LocalizationSample s;
    s.features = Vector(2);
    s.features << -55.0, -60.0;
    s.target = {3.0, 4.0};
    std::vector<LocalizationSample> train(8, s);
    TrainConfig cfg;
    cfg.epochs = 1500;
    cfg.learning_rate = 1e-2;
    cfg.seed = 3;
    LocalizerModel model = train_localizer(train, LocalizerArch{{16}}, cfg);
    Matrix pred = predict_positions(model, {s});
    CHECK(std::abs(pred(0, 0) - 3.0) < 1e-2);
    CHECK(std::abs(pred(0, 1) - 4.0) < 1e-2);
}

TEST_CASE("linear targets with an identity net reach near-zero test MSE") {
    auto samples = linear_samples(200, 7);
    auto [train, test] = split_dataset(samples, 0.9, 7);
    TrainConfig cfg;
    cfg.epochs = 800;
    cfg.seed = 7;
    LocalizerModel model = train_localizer(train, LocalizerArch{{}}, cfg);
    CHECK(evaluate_mse(model, test) < 1e-4);
}

TEST_CASE("training beats the constant-mean predictor on a monotone field") {
    // one AP, noiseless monotone feature: position is learnable
    std::vector<LocalizationSample> samples;
    for (int i = 0; i < 100; ++i) {
        LocalizationSample s;
        s.features = Vector(1);
        s.features << -40.0 - 0.5 * i;
        s.target = {i * 0.1, i * 0.05};
        samples.push_back(std::move(s));
    }
    auto [train, test] = split_dataset(samples, 0.9, 11);
    TrainConfig cfg;
    cfg.epochs = 600;
    cfg.seed = 11;
    LocalizerModel model = train_localizer(train, LocalizerArch{{32}}, cfg);

    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& s : test) {
        mean_x += s.target.x_m;
        mean_y += s.target.y_m;
    }
    mean_x /= test.size();
    mean_y /= test.size();
    double baseline = 0.0;
    for (const auto& s : test)
        baseline += (s.target.x_m - mean_x) * (s.target.x_m - mean_x) +
                    (s.target.y_m - mean_y) * (s.target.y_m - mean_y);
    baseline /= 2.0 * test.size();
    CHECK(evaluate_mse(model, test) < baseline);
}

TEST_CASE("evaluate_mse arithmetic") {
    auto samples = linear_samples(50, 8);
    auto [train, test] = split_dataset(samples, 0.9, 8);
    TrainConfig cfg;
    cfg.epochs = 400;
    cfg.seed = 8;
    LocalizerModel model = train_localizer(train, LocalizerArch{{}}, cfg);
    double base = evaluate_mse(model, test);
    CHECK(base >= 0.0);

    // shifting every prediction by exactly (1 m, 0) adds 0.5 m^2 at zero error
    LocalizerModel offset = model;
    offset.net.layers.back().biases(0) += 1.0;
    auto exact = test;
    {
        Matrix pred = predict_positions(model, test);
        for (std::size_t i = 0; i < exact.size(); ++i)
            exact[i].target = {pred(i, 0), pred(i, 1)};
    }
    CHECK(evaluate_mse(model, exact) == Catch::Approx(0.0).margin(1e-18));
    CHECK(evaluate_mse(offset, exact) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("evaluate_mse rejects an empty test set") {
    auto samples = linear_samples(10, 9);
    TrainConfig cfg;
    cfg.epochs = 1;
    LocalizerModel model = train_localizer(samples, LocalizerArch{{4}}, cfg);
    CHECK_THROWS_AS(evaluate_mse(model, {}), DataError);
}

TEST_CASE("error reduction formula") {
    CHECK(error_reduction(2.0, 1.0) == Catch::Approx(50.0).margin(1e-12));
    CHECK(error_reduction(1.5, 1.5) == Catch::Approx(0.0).margin(1e-12));
    CHECK(error_reduction(1.0, 1.5) < 0.0);
    CHECK_THROWS_AS(error_reduction(0.0, 1.0), DataError);
}

TEST_CASE("error reduction reproduces the headline percentages") {
    CHECK(error_reduction(1.0, 0.0973) == Catch::Approx(90.27).margin(0.01));
    CHECK(error_reduction(1.0, 0.4681) == Catch::Approx(53.19).margin(0.01));
}
