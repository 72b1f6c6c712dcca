#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rfmap/geometry.hpp"

namespace rfmap {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Free-space path loss in dB: 20*log10(4*pi*d*f/c).
inline double free_space_path_loss(double distance_m, double frequency_hz) {
    if (!(distance_m > 0.0)) throw DataError("free_space_path_loss: distance must be positive");
    if (!(frequency_hz > 0.0)) throw DataError("free_space_path_loss: frequency must be positive");
    return 20.0 * std::log10(4.0 * M_PI * distance_m * frequency_hz / kSpeedOfLight);
}

/// Log-distance path loss anchored at the reference distance, plus a
/// caller-supplied shadowing draw (standard normal; pass 0 for the
/// deterministic mean field).
inline double rss_at_point(const AccessPoint& ap, Point2 p, const PropagationParams& params,
                           double shadowing_sample) {
    double dx = p.x_m - ap.position.x_m;
    double dy = p.y_m - ap.position.y_m;
    double d = std::sqrt(dx * dx + dy * dy);
    if (d < params.min_distance_m) d = params.min_distance_m;
    double fspl_ref = free_space_path_loss(params.reference_distance_m, ap.frequency_hz);
    return ap.tx_power_dbm - fspl_ref -
           10.0 * params.path_loss_exponent * std::log10(d / params.reference_distance_m) +
           params.shadowing_sigma_db * shadowing_sample;
}

inline double rss_at_point_checked(const AccessPoint& ap, Point2 p, const RoomGeometry& room,
                                   const PropagationParams& params, double shadowing_sample) {
    if (!room.contains(p)) throw DataError("rss_at_point: point outside room");
    return rss_at_point(ap, p, params, shadowing_sample);
}

/// Dense ground-truth RSS grid, one layer per access point.
struct RFMap {
    RoomGeometry geometry;
    std::vector<AccessPoint> aps;
    std::vector<Matrix> layers;  // layers[a](row, col), dBm
};

namespace detail {

/// Standard-normal field over the grid. With a positive correlation length
/// the white field is smoothed by a Gaussian kernel and rescaled so every
/// cell stays marginally N(0, 1).
inline Matrix shadowing_field(int rows, int cols, double correlation_cells,
                              std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix white(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) white(r, c) = normal(rng);
    if (correlation_cells <= 0.0) return white;

    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * correlation_cells)));
    std::vector<double> kernel(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i)
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (correlation_cells * correlation_cells));

    Matrix smooth(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double sum = 0.0, sq = 0.0;
            for (int dr = -radius; dr <= radius; ++dr) {
                for (int dc = -radius; dc <= radius; ++dc) {
                    int rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
                    double w = kernel[dr + radius] * kernel[dc + radius];
                    sum += w * white(rr, cc);
                    sq += w * w;
                }
            }
            smooth(r, c) = sum / std::sqrt(sq);
        }
    }
    return smooth;
}

}  // namespace detail

/// Evaluates the channel model at every cell center. The shadowing field is
/// drawn per cell per AP from the seeded generator (AP-major, row-major
/// order), so identical inputs give identical maps.
inline RFMap generate_ground_truth(const RoomGeometry& room, const std::vector<AccessPoint>& aps,
                                   const PropagationParams& params, std::uint64_t seed) {
    room.validate();
    params.validate();
    if (aps.empty()) throw ConfigError("generate_ground_truth: no access points");
    for (const auto& ap : aps) ap.validate(room);

    std::mt19937_64 rng(seed);

    RFMap map;
    map.geometry = room;
    map.aps = aps;
    map.layers.reserve(aps.size());
    for (const auto& ap : aps) {
        Matrix shadow =
            params.shadowing_sigma_db > 0.0
                ? detail::shadowing_field(room.grid_rows, room.grid_cols,
                                          params.shadowing_correlation_cells, rng)
                : Matrix::Zero(room.grid_rows, room.grid_cols);
        Matrix layer(room.grid_rows, room.grid_cols);
        for (int r = 0; r < room.grid_rows; ++r)
            for (int c = 0; c < room.grid_cols; ++c)
                layer(r, c) = rss_at_point(ap, room.cell_center(r, c), params, shadow(r, c));
        map.layers.push_back(std::move(layer));
    }
    return map;
}

}  // namespace rfmap
