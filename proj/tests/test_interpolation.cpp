#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "rfmap/interpolate.hpp"

using namespace rfmap;

namespace {

// Independent brute-force re-implementations. These deliberately avoid the
// library's helpers: candidates are gathered and sorted from scratch.

Matrix naive_knn(const SparseGrid& g, int k) {
    Matrix out = g.values;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (g.mask(r, c)) continue;
            struct Cand {
                double d2;
                int row, col;
                double val;
            };
            std::vector<Cand> cands;
            for (int rr = 0; rr < g.rows; ++rr)
                for (int cc = 0; cc < g.cols; ++cc)
                    if (g.mask(rr, cc)) {
                        double d2 = double(r - rr) * (r - rr) + double(c - cc) * (c - cc);
                        cands.push_back({d2, rr, cc, g.values(rr, cc)});
                    }
            std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
                if (a.d2 != b.d2) return a.d2 < b.d2;
                if (a.row != b.row) return a.row < b.row;
                return a.col < b.col;
            });
            double sum = 0.0;
            for (int i = 0; i < k; ++i) sum += cands[i].val;
            out(r, c) = sum / k;
        }
    }
    return out;
}

Matrix naive_idw(const SparseGrid& g, double p, double eps) {
    Matrix out = g.values;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (g.mask(r, c)) continue;
            double num = 0.0, den = 0.0;
            for (int rr = 0; rr < g.rows; ++rr)
                for (int cc = 0; cc < g.cols; ++cc)
                    if (g.mask(rr, cc)) {
                        double d =
                            std::sqrt(double(r - rr) * (r - rr) + double(c - cc) * (c - cc));
                        double w = 1.0 / std::pow(d + eps, p);
                        num += w * g.values(rr, cc);
                        den += w;
                    }
            out(r, c) = num / den;
        }
    }
    return out;
}

SparseGrid random_grid(std::mt19937_64& rng, int max_dim, int max_observed) {
    std::uniform_int_distribution<int> dim(2, max_dim);
    SparseGrid g = SparseGrid::empty(dim(rng), dim(rng));
    std::uniform_int_distribution<int> n_obs(1, std::min(max_observed, g.rows * g.cols));
    std::uniform_real_distribution<double> val(-90.0, -30.0);
    int target = n_obs(rng);
    std::uniform_int_distribution<int> rr(0, g.rows - 1), cc(0, g.cols - 1);
    while (g.observed_count() < target) {
        int r = rr(rng), c = cc(rng);
        if (!g.mask(r, c)) {
            g.mask(r, c) = true;
            g.values(r, c) = val(rng);
        }
    }
    return g;
}

}  // namespace

TEST_CASE("knn with a single observed cell floods its value") {
    SparseGrid g = SparseGrid::empty(4, 5);
    g.mask(2, 3) = true;
    g.values(2, 3) = -47.5;
    ImputationResult res = knn_impute(g, 1);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 5; ++c) CHECK(res.completed(r, c) == -47.5);
}

TEST_CASE("knn averages two equidistant neighbors") {
    SparseGrid g = SparseGrid::empty(1, 3);
    g.mask(0, 0) = g.mask(0, 2) = true;
    g.values(0, 0) = 10.0;
    g.values(0, 2) = 20.0;
    ImputationResult res = knn_impute(g, 2);
    CHECK(res.completed(0, 1) == Catch::Approx(15.0).epsilon(1e-15));
}

TEST_CASE("knn matches the brute-force oracle on a fixed 5x5 instance") {
    std::mt19937_64 rng(99);
    SparseGrid g = SparseGrid::empty(5, 5);
    std::uniform_real_distribution<double> val(-80.0, -40.0);
    const std::vector<std::pair<int, int>> cells{{0, 1}, {1, 4}, {2, 2}, {3, 0}, {4, 3}, {4, 4}};
    for (auto [r, c] : cells) {
        g.mask(r, c) = true;
        g.values(r, c) = val(rng);
    }
    ImputationResult res = knn_impute(g, 3);
    CHECK(res.completed == naive_knn(g, 3));
}

TEST_CASE("knn rejects k larger than the observed count") {
    SparseGrid g = SparseGrid::empty(3, 3);
    g.mask(0, 0) = true;
    CHECK_THROWS_AS(knn_impute(g, 2), DataError);
}

TEST_CASE("idw with one observed cell is constant") {
    SparseGrid g = SparseGrid::empty(3, 3);
    g.mask(1, 1) = true;
    g.values(1, 1) = -60.0;
    ImputationResult res = idw_interpolate(g, 2.0, 1e-6);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(res.completed(r, c) == Catch::Approx(-60.0).epsilon(1e-12));
}

TEST_CASE("idw at an equidistant query is the mean for any power") {
    SparseGrid g = SparseGrid::empty(1, 3);
    g.mask(0, 0) = g.mask(0, 2) = true;
    g.values(0, 0) = -30.0;
    g.values(0, 2) = -70.0;
    for (double p : {0.5, 1.0, 2.0, 3.5}) {
        ImputationResult res = idw_interpolate(g, p, 1e-6);
        CHECK(res.completed(0, 1) == Catch::Approx(-50.0).epsilon(1e-12));
    }
}

TEST_CASE("idw matches direct formula evaluation on a 6x6 instance") {
    SparseGrid g = SparseGrid::empty(6, 6);
    g.mask(0, 0) = g.mask(1, 4) = g.mask(3, 2) = g.mask(5, 5) = true;
    g.values(0, 0) = -40.0;
    g.values(1, 4) = -55.0;
    g.values(3, 2) = -62.0;
    g.values(5, 5) = -75.0;
    ImputationResult res = idw_interpolate(g, 2.0, 1e-6);
    Matrix expected = naive_idw(g, 2.0, 1e-6);
    CHECK((res.completed - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("idw requires at least one observation") {
    SparseGrid g = SparseGrid::empty(2, 2);
    CHECK_THROWS_AS(idw_interpolate(g, 2.0, 1e-6), DataError);
}

TEST_CASE("both imputers leave observed cells untouched and stay in range") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        SparseGrid g = random_grid(rng, 6, 8);
        int k = std::min(3, g.observed_count());
        ImputationResult knn = knn_impute(g, k);
        ImputationResult idw = idw_interpolate(g, 2.0, 1e-6);
        double lo = 1e9, hi = -1e9;
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c)
                if (g.mask(r, c)) {
                    lo = std::min(lo, g.values(r, c));
                    hi = std::max(hi, g.values(r, c));
                    CHECK(knn.completed(r, c) == g.values(r, c));
                    CHECK(idw.completed(r, c) == g.values(r, c));
                }
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) {
                CHECK(knn.completed(r, c) >= lo - 1e-12);
                CHECK(knn.completed(r, c) <= hi + 1e-12);
                CHECK(idw.completed(r, c) >= lo - 1e-12);
                CHECK(idw.completed(r, c) <= hi + 1e-12);
            }
    }
}

TEST_CASE("random small grids match the oracles") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        SparseGrid g = random_grid(rng, 6, 8);
        int k = std::min(3, g.observed_count());
        CHECK(knn_impute(g, k).completed == naive_knn(g, k));
        CHECK((idw_interpolate(g, 2.0, 1e-6).completed - naive_idw(g, 2.0, 1e-6))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}
