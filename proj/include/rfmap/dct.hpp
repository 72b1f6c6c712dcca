#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rfmap/sparse_grid.hpp"

namespace rfmap {

/// Coefficients of an orthonormal 2D DCT-II, same shape as the source grid.
struct DctSpectrum {
    Matrix coefficients;
};

namespace detail {

// Orthonormal DCT-II basis matrix C (N x N): C(k, n) = a(k) cos(pi (2n+1) k / 2N),
// a(0) = sqrt(1/N), a(k>0) = sqrt(2/N). Rows are orthonormal.
inline Matrix dct_basis(int n) {
    Matrix c(n, n);
    for (int k = 0; k < n; ++k) {
        double a = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int i = 0; i < n; ++i)
            c(k, i) = a * std::cos(M_PI * (2 * i + 1) * k / (2.0 * n));
    }
    return c;
}

}  // namespace detail

inline DctSpectrum dct2_forward(const Matrix& x) {
    if (x.rows() == 0 || x.cols() == 0) throw DataError("dct2_forward: empty matrix");
    Matrix cr = detail::dct_basis(static_cast<int>(x.rows()));
    Matrix cc = detail::dct_basis(static_cast<int>(x.cols()));
    return {cr * x * cc.transpose()};
}

inline Matrix dct2_inverse(const DctSpectrum& s) {
    const Matrix& X = s.coefficients;
    if (X.rows() == 0 || X.cols() == 0) throw DataError("dct2_inverse: empty spectrum");
    Matrix cr = detail::dct_basis(static_cast<int>(X.rows()));
    Matrix cc = detail::dct_basis(static_cast<int>(X.cols()));
    return cr.transpose() * X * cc;
}

/// Frequency indices in zig-zag order: ascending k1+k2, ties by k1.
inline std::vector<std::pair<int, int>> zigzag_order(int rows, int cols) {
    std::vector<std::pair<int, int>> order;
    order.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) order.emplace_back(r, c);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first + a.second != b.first + b.second)
            return a.first + a.second < b.first + b.second;
        return a.first < b.first;
    });
    return order;
}

/// Least-squares fit of the lowest-frequency DCT basis functions to the
/// observed cells, evaluated over the whole grid. Observed cells keep their
/// measured values.
inline ImputationResult dct_interpolate(const SparseGrid& g, int num_coeffs) {
    if (num_coeffs < 1) throw DataError("dct_interpolate: num_coeffs must be >= 1");
    int observed = g.observed_count();
    if (num_coeffs > observed)
        throw DataError("dct_interpolate: num_coeffs exceeds observed cell count");

    Matrix cr = detail::dct_basis(g.rows);
    Matrix cc = detail::dct_basis(g.cols);
    auto order = zigzag_order(g.rows, g.cols);

    // Design matrix: one row per observed cell, one column per kept basis
    // function; basis value at cell (r, c) for frequency (k1, k2) is
    // cr(k1, r) * cc(k2, c).
    Matrix design(observed, num_coeffs);
    Vector rhs(observed);
    int i = 0;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (!g.mask(r, c)) continue;
            for (int j = 0; j < num_coeffs; ++j)
                design(i, j) = cr(order[j].first, r) * cc(order[j].second, c);
            rhs(i) = g.values(r, c);
            ++i;
        }
    }

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < num_coeffs)
        throw NumericError("dct_interpolate: rank-deficient design matrix");
    Vector coeffs = qr.solve(rhs);

    Matrix spectrum = Matrix::Zero(g.rows, g.cols);
    for (int j = 0; j < num_coeffs; ++j)
        spectrum(order[j].first, order[j].second) = coeffs(j);

    ImputationResult res;
    res.method = "dct";
    res.completed = dct2_inverse({spectrum});
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
            if (g.mask(r, c)) res.completed(r, c) = g.values(r, c);
    return res;
}

}  // namespace rfmap
