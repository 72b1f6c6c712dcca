#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "rfmap/geometry.hpp"
#include "rfmap/sparse_grid.hpp"

namespace rfmap {

/// Tabular data with an observed mask, the input shape MICE works on.
struct Table {
    Matrix values;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // true = observed

    long rows() const { return values.rows(); }
    long cols() const { return values.cols(); }
};

struct MiceResult {
    Matrix completed;
    int iterations = 0;
    std::vector<double> sweep_max_change;
    std::vector<std::string> diagnostics;
};

/// Chained-equations imputation: mean-initialize, then sweep columns
/// (fewest-missing first), regressing each incomplete column on all others by
/// OLS over its observed rows and re-predicting its missing entries, until
/// the largest per-sweep change drops below tol.
inline MiceResult mice_impute(const Table& table, int max_iter, double tol,
                              std::uint64_t /*seed*/ = 0) {
    if (max_iter < 1) throw DataError("mice_impute: max_iter must be >= 1");
    if (!(tol > 0.0)) throw DataError("mice_impute: tol must be positive");
    const long n = table.rows();
    const long m = table.cols();
    if (m < 2) throw DataError("mice_impute: need at least 2 columns");

    std::vector<long> missing_per_col(m, 0);
    std::vector<double> col_mean(m, 0.0);
    for (long c = 0; c < m; ++c) {
        double sum = 0.0;
        long obs = 0;
        for (long r = 0; r < n; ++r) {
            if (table.mask(r, c)) {
                sum += table.values(r, c);
                ++obs;
            } else {
                ++missing_per_col[c];
            }
        }
        if (obs < 2)
            throw DataError("mice_impute: column " + std::to_string(c) +
                            " has fewer than 2 observed values");
        col_mean[c] = sum / obs;
    }

    MiceResult res;
    res.completed = table.values;
    for (long c = 0; c < m; ++c)
        for (long r = 0; r < n; ++r)
            if (!table.mask(r, c)) res.completed(r, c) = col_mean[c];

    std::vector<long> sweep_cols;
    for (long c = 0; c < m; ++c)
        if (missing_per_col[c] > 0) sweep_cols.push_back(c);
    if (sweep_cols.empty()) return res;  // nothing to impute
    std::stable_sort(sweep_cols.begin(), sweep_cols.end(),
                     [&](long a, long b) { return missing_per_col[a] < missing_per_col[b]; });

    for (int iter = 0; iter < max_iter; ++iter) {
        double max_change = 0.0;
        for (long target : sweep_cols) {
            long n_obs = n - missing_per_col[target];
            // Predictors: all other columns at their current (imputed) values,
            // plus an intercept.
            Matrix x_obs(n_obs, m);
            Vector y_obs(n_obs);
            long i = 0;
            for (long r = 0; r < n; ++r) {
                if (!table.mask(r, target)) continue;
                long j = 0;
                x_obs(i, j++) = 1.0;
                for (long c = 0; c < m; ++c)
                    if (c != target) x_obs(i, j++) = res.completed(r, c);
                y_obs(i) = table.values(r, target);
                ++i;
            }
            Eigen::ColPivHouseholderQR<Matrix> qr(x_obs);
            bool singular = qr.rank() < m || n_obs < m;
            Vector beta;
            if (!singular) beta = qr.solve(y_obs);
            else
                res.diagnostics.push_back("sweep " + std::to_string(iter) + " column " +
                                          std::to_string(target) +
                                          ": singular regression, mean fallback");
            for (long r = 0; r < n; ++r) {
                if (table.mask(r, target)) continue;
                double pred;
                if (singular) {
                    pred = col_mean[target];
                } else {
                    pred = beta(0);
                    long j = 1;
                    for (long c = 0; c < m; ++c)
                        if (c != target) pred += beta(j++) * res.completed(r, c);
                }
                max_change = std::max(max_change, std::abs(pred - res.completed(r, target)));
                res.completed(r, target) = pred;
            }
        }
        res.sweep_max_change.push_back(max_change);
        res.iterations = iter + 1;
        if (max_change < tol) break;
    }
    if (!res.completed.allFinite()) throw NumericError("mice_impute: non-finite imputation");
    return res;
}

inline ImputationResult mice_impute_result(const Table& table, int max_iter, double tol,
                                           std::uint64_t seed = 0) {
    MiceResult mr = mice_impute(table, max_iter, tol, seed);
    ImputationResult res;
    res.method = "mice";
    res.completed = std::move(mr.completed);
    res.iterations = mr.iterations;
    res.sweep_max_change = std::move(mr.sweep_max_change);
    res.diagnostics = std::move(mr.diagnostics);
    return res;
}

/// One row per grid cell, columns (x_center, y_center, rss per AP); cell
/// order is row-major so the grid layout is recoverable.
inline Table sparse_grid_to_table(const RoomGeometry& room, const std::vector<SparseGrid>& layers) {
    if (layers.empty()) throw DataError("sparse_grid_to_table: no layers");
    for (const auto& g : layers)
        if (g.rows != room.grid_rows || g.cols != room.grid_cols)
            throw DataError("sparse_grid_to_table: layer dimensions do not match room grid");

    const long n = room.cell_count();
    const long m = 2 + static_cast<long>(layers.size());
    Table t;
    t.values = Matrix::Zero(n, m);
    t.mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, m, true);
    long i = 0;
    for (int r = 0; r < room.grid_rows; ++r) {
        for (int c = 0; c < room.grid_cols; ++c) {
            Point2 center = room.cell_center(r, c);
            t.values(i, 0) = center.x_m;
            t.values(i, 1) = center.y_m;
            for (std::size_t a = 0; a < layers.size(); ++a) {
                if (layers[a].mask(r, c)) {
                    t.values(i, 2 + a) = layers[a].values(r, c);
                } else {
                    t.mask(i, 2 + a) = false;
                }
            }
            ++i;
        }
    }
    return t;
}

/// Inverse of sparse_grid_to_table for one AP column of a completed table.
inline Matrix table_column_to_grid(const Matrix& completed, const RoomGeometry& room,
                                   int ap_index) {
    if (completed.rows() != room.cell_count())
        throw DataError("table_column_to_grid: row count does not match grid");
    Matrix grid(room.grid_rows, room.grid_cols);
    long i = 0;
    for (int r = 0; r < room.grid_rows; ++r)
        for (int c = 0; c < room.grid_cols; ++c) grid(r, c) = completed(i++, 2 + ap_index);
    return grid;
}

}  // namespace rfmap
