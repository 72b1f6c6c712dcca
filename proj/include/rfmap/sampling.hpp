#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rfmap/pathloss.hpp"
#include "rfmap/sparse_grid.hpp"

namespace rfmap {

struct MeasurementPoint {
    int point_id = 0;
    Point2 position;
    GridCell cell;
    std::vector<std::vector<double>> readings;  // [ap][reading], dBm
};

struct MeasurementSet {
    RoomGeometry room;
    std::vector<std::string> ap_ids;
    std::vector<MeasurementPoint> points;
    std::uint64_t seed = 0;
};

/// Homogeneous PPP over the room: Poisson count, uniform positions.
inline std::vector<Point2> sample_locations_ppp(const RoomGeometry& room, double intensity_per_m2,
                                                std::uint64_t seed) {
    if (!(intensity_per_m2 > 0.0)) throw DataError("ppp intensity must be positive");
    std::mt19937_64 rng(seed);
    double area = room.width_m * room.length_m;
    std::poisson_distribution<int> count_dist(intensity_per_m2 * area);
    int n = count_dist(rng);
    std::uniform_real_distribution<double> ux(0.0, room.width_m);
    std::uniform_real_distribution<double> uy(0.0, room.length_m);
    std::vector<Point2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        double x = ux(rng);
        double y = uy(rng);
        pts.push_back({x, y});
    }
    return pts;
}

/// Exactly n uniform positions, no two in the same grid cell. Collisions are
/// resampled; the cell count bound makes termination certain well before the
/// retry cap for any feasible n.
inline std::vector<Point2> sample_locations_fixed(const RoomGeometry& room, int n,
                                                  std::uint64_t seed) {
    if (n < 1) throw DataError("sample count must be >= 1");
    if (n > room.cell_count())
        throw DataError("cannot place " + std::to_string(n) + " points in " +
                        std::to_string(room.cell_count()) + " distinct cells");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, room.width_m);
    std::uniform_real_distribution<double> uy(0.0, room.length_m);
    std::set<std::pair<int, int>> used;
    std::vector<Point2> pts;
    long retries = 0;
    const long max_retries = 1000L * room.cell_count();
    while (static_cast<int>(pts.size()) < n) {
        Point2 p{ux(rng), uy(rng)};
        GridCell cell = quantize_to_grid(p, room);
        if (used.insert({cell.row, cell.col}).second) {
            pts.push_back(p);
        } else if (++retries > max_retries) {
            throw NumericError("fixed sampling exceeded retry budget");
        }
    }
    return pts;
}

/// Repeated noisy reads of the truth grid at each location's cell.
inline MeasurementSet collect_measurements(const RFMap& truth, const std::vector<Point2>& locations,
                                           int readings_per_point, double reading_noise_sigma_db,
                                           std::uint64_t seed) {
    if (readings_per_point < 1) throw DataError("readings_per_point must be >= 1");
    if (locations.empty()) throw DataError("collect_measurements: no locations");
    if (reading_noise_sigma_db < 0.0) throw DataError("reading noise sigma must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    MeasurementSet ms;
    ms.room = truth.geometry;
    ms.seed = seed;
    for (const auto& ap : truth.aps) ms.ap_ids.push_back(ap.id);

    int next_id = 0;
    for (const auto& loc : locations) {
        MeasurementPoint mp;
        mp.point_id = next_id++;
        mp.position = loc;
        mp.cell = quantize_to_grid(loc, truth.geometry);
        mp.readings.resize(truth.aps.size());
        for (std::size_t a = 0; a < truth.aps.size(); ++a) {
            double base = truth.layers[a](mp.cell.row, mp.cell.col);
            mp.readings[a].reserve(readings_per_point);
            for (int i = 0; i < readings_per_point; ++i) {
                double noise = reading_noise_sigma_db > 0.0
                                   ? reading_noise_sigma_db * normal(rng)
                                   : 0.0;
                mp.readings[a].push_back(base + noise);
            }
        }
        ms.points.push_back(std::move(mp));
    }
    return ms;
}

/// Grids one AP's measurements: each occupied cell carries the mean of its
/// points' per-point reading means.
inline SparseGrid to_sparse_grid(const MeasurementSet& ms, int ap_index) {
    if (ap_index < 0 || ap_index >= static_cast<int>(ms.ap_ids.size()))
        throw DataError("to_sparse_grid: ap_index out of range");
    SparseGrid g = SparseGrid::empty(ms.room.grid_rows, ms.room.grid_cols);
    Matrix sums = Matrix::Zero(g.rows, g.cols);
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(g.rows, g.cols);
    for (const auto& mp : ms.points) {
        const auto& reads = mp.readings[ap_index];
        double mean = std::accumulate(reads.begin(), reads.end(), 0.0) / reads.size();
        sums(mp.cell.row, mp.cell.col) += mean;
        counts(mp.cell.row, mp.cell.col) += 1;
    }
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (counts(r, c) > 0) {
                g.values(r, c) = sums(r, c) / counts(r, c);
                g.mask(r, c) = true;
            }
        }
    }
    return g;
}

/// CSV format: header `point_id,x_m,y_m,ap_id,rss_dbm`, one row per
/// (point, AP, reading), LF endings, 9 significant digits.
inline void save_csv(const MeasurementSet& ms, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "point_id,x_m,y_m,ap_id,rss_dbm\n";
    char xb[64], yb[64], rb[64];
    for (const auto& mp : ms.points) {
        std::snprintf(xb, sizeof(xb), "%.9g", mp.position.x_m);
        std::snprintf(yb, sizeof(yb), "%.9g", mp.position.y_m);
        for (std::size_t a = 0; a < ms.ap_ids.size(); ++a) {
            for (double rss : mp.readings[a]) {
                std::snprintf(rb, sizeof(rb), "%.9g", rss);
                out << mp.point_id << ',' << xb << ',' << yb << ',' << ms.ap_ids[a] << ',' << rb
                    << '\n';
            }
        }
    }
}

namespace detail {
inline double parse_double_field(const std::string& s, int line_no, const char* field) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DataError("csv line " + std::to_string(line_no) + ": bad " + field + " '" + s + "'");
    }
    if (pos != s.size())
        throw DataError("csv line " + std::to_string(line_no) + ": bad " + field + " '" + s + "'");
    return v;
}
}  // namespace detail

/// Rebuilds a MeasurementSet from the CSV format above. The room geometry is
/// not stored in the file and must be supplied; coordinates are validated
/// against it.
inline MeasurementSet load_csv(const std::string& path, const RoomGeometry& room) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "point_id,x_m,y_m,ap_id,rss_dbm")
        throw DataError(path + ": unexpected header '" + line + "'");

    MeasurementSet ms;
    ms.room = room;
    std::unordered_map<std::string, int> ap_index;
    std::unordered_map<int, std::size_t> point_index;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 5)
            throw DataError("csv line " + std::to_string(line_no) + ": expected 5 fields, got " +
                            std::to_string(fields.size()));
        int pid = static_cast<int>(detail::parse_double_field(fields[0], line_no, "point_id"));
        double x = detail::parse_double_field(fields[1], line_no, "x_m");
        double y = detail::parse_double_field(fields[2], line_no, "y_m");
        const std::string& ap_id = fields[3];
        double rss = detail::parse_double_field(fields[4], line_no, "rss_dbm");
        if (!room.contains({x, y}))
            throw DataError("csv line " + std::to_string(line_no) + ": position outside room");

        auto ap_it = ap_index.find(ap_id);
        if (ap_it == ap_index.end()) {
            ap_it = ap_index.emplace(ap_id, static_cast<int>(ms.ap_ids.size())).first;
            ms.ap_ids.push_back(ap_id);
        }
        int a = ap_it->second;

        auto pt_it = point_index.find(pid);
        if (pt_it == point_index.end()) {
            MeasurementPoint mp;
            mp.point_id = pid;
            mp.position = {x, y};
            mp.cell = quantize_to_grid(mp.position, room);
            pt_it = point_index.emplace(pid, ms.points.size()).first;
            ms.points.push_back(std::move(mp));
        }
        auto& mp = ms.points[pt_it->second];
        if (mp.readings.size() <= static_cast<std::size_t>(a)) mp.readings.resize(a + 1);
        mp.readings[a].push_back(rss);
    }
    for (auto& mp : ms.points) mp.readings.resize(ms.ap_ids.size());
    return ms;
}

}  // namespace rfmap
