#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rfmap/common.hpp"

namespace rfmap {

/// Discrete probability distribution over shared bins.
struct Distribution {
    std::vector<double> weights;

    /// Normalizes nonnegative weights to sum 1.
    static Distribution from_weights(std::vector<double> w) {
        double total = 0.0;
        for (double v : w) {
            if (v < 0.0) throw DataError("distribution weights must be nonnegative");
            total += v;
        }
        if (!(total > 0.0)) throw DataError("distribution has no mass");
        for (double& v : w) v /= total;
        return {std::move(w)};
    }
};

/// KL(q || p) in nats. Returns +inf where q has mass on bins p does not.
inline double kl_divergence(const Distribution& q, const Distribution& p) {
    if (q.weights.size() != p.weights.size())
        throw DataError("kl_divergence: mismatched supports");
    double sum = 0.0;
    for (std::size_t i = 0; i < q.weights.size(); ++i) {
        double qi = q.weights[i], pi = p.weights[i];
        if (qi == 0.0) continue;
        if (pi == 0.0) return std::numeric_limits<double>::infinity();
        sum += qi * std::log(qi / pi);
    }
    return std::max(sum, 0.0);
}

/// Jensen-Shannon divergence in nats, bounded by ln 2.
inline double js_divergence(const Distribution& p, const Distribution& q) {
    if (p.weights.size() != q.weights.size())
        throw DataError("js_divergence: mismatched supports");
    Distribution m;
    m.weights.resize(p.weights.size());
    for (std::size_t i = 0; i < p.weights.size(); ++i)
        m.weights[i] = 0.5 * (p.weights[i] + q.weights[i]);
    return 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m);
}

/// Histogram of samples over [lo, hi) with equal bins; values outside the
/// range land in the edge bins.
inline Distribution histogram(const std::vector<double>& samples, int bins, double lo, double hi) {
    if (bins < 1) throw DataError("histogram: need at least one bin");
    if (!(hi > lo)) throw DataError("histogram: empty range");
    if (samples.empty()) throw DataError("histogram: no samples");
    std::vector<double> counts(bins, 0.0);
    for (double v : samples) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        counts[b] += 1.0;
    }
    return Distribution::from_weights(std::move(counts));
}

}  // namespace rfmap
