#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfmap/sparse_grid.hpp"

namespace rfmap {

namespace detail {

struct ObservedCell {
    int row;
    int col;
    double value;
};

// Row-major order, so a stable sort by distance breaks ties by (row, col).
inline std::vector<ObservedCell> observed_cells(const SparseGrid& g) {
    std::vector<ObservedCell> cells;
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
            if (g.mask(r, c)) cells.push_back({r, c, g.values(r, c)});
    return cells;
}

}  // namespace detail

/// Fills each missing cell with the unweighted mean of the k nearest observed
/// cells (cell-center Euclidean distance, ties by row-major order).
inline ImputationResult knn_impute(const SparseGrid& g, int k) {
    if (k < 1) throw DataError("knn_impute: k must be >= 1");
    auto observed = detail::observed_cells(g);
    if (static_cast<int>(observed.size()) < k)
        throw DataError("knn_impute: fewer observed cells than k");

    ImputationResult res;
    res.method = "knn";
    res.completed = g.values;
    std::vector<std::pair<double, double>> dist_val(observed.size());  // (distance², value)
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (g.mask(r, c)) continue;
            for (std::size_t i = 0; i < observed.size(); ++i) {
                double dr = static_cast<double>(r - observed[i].row);
                double dc = static_cast<double>(c - observed[i].col);
                dist_val[i] = {dr * dr + dc * dc, observed[i].value};
            }
            std::stable_sort(dist_val.begin(), dist_val.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            double sum = 0.0;
            for (int i = 0; i < k; ++i) sum += dist_val[i].second;
            res.completed(r, c) = sum / k;
        }
    }
    return res;
}

/// Shepard inverse-distance weighting over all observed cells:
/// f = sum(W_k Q_k) / sum(W_k) with W_k = 1/(d_k + eps)^p.
inline ImputationResult idw_interpolate(const SparseGrid& g, double power_p, double epsilon_m) {
    if (!(power_p > 0.0)) throw DataError("idw_interpolate: power must be positive");
    if (!(epsilon_m > 0.0)) throw DataError("idw_interpolate: epsilon must be positive");
    auto observed = detail::observed_cells(g);
    if (observed.empty()) throw DataError("idw_interpolate: no observed cells");

    ImputationResult res;
    res.method = "idw";
    res.completed = g.values;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (g.mask(r, c)) continue;
            double num = 0.0, den = 0.0;
            for (const auto& o : observed) {
                double dr = static_cast<double>(r - o.row);
                double dc = static_cast<double>(c - o.col);
                double d = std::sqrt(dr * dr + dc * dc);
                double w = 1.0 / std::pow(d + epsilon_m, power_p);
                num += w * o.value;
                den += w;
            }
            res.completed(r, c) = num / den;
        }
    }
    return res;
}

}  // namespace rfmap
