#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "rfmap/common.hpp"

namespace rfmap {

struct Point2 {
    double x_m = 0.0;
    double y_m = 0.0;
};

/// Rectangular room discretized into grid cells. Rows run along the length
/// axis (y), columns along the width axis (x).
struct RoomGeometry {
    double width_m = 0.0;
    double length_m = 0.0;
    int grid_rows = 0;
    int grid_cols = 0;

    void validate() const {
        if (!(width_m > 0.0) || !(length_m > 0.0))
            throw ConfigError("room dimensions must be positive");
        if (grid_rows < 2 || grid_cols < 2)
            throw ConfigError("grid must be at least 2x2");
    }

    double cell_height_m() const { return length_m / grid_rows; }
    double cell_width_m() const { return width_m / grid_cols; }
    int cell_count() const { return grid_rows * grid_cols; }

    bool contains(Point2 p) const {
        return p.x_m >= 0.0 && p.x_m <= width_m && p.y_m >= 0.0 && p.y_m <= length_m;
    }

    Point2 cell_center(int row, int col) const {
        return {(col + 0.5) * cell_width_m(), (row + 0.5) * cell_height_m()};
    }
};

struct AccessPoint {
    std::string id;
    Point2 position;
    double tx_power_dbm = 0.0;
    double frequency_hz = 0.0;

    void validate(const RoomGeometry& room) const {
        if (id.empty()) throw ConfigError("access point id must be nonempty");
        if (!(frequency_hz > 0.0)) throw ConfigError("ap '" + id + "': frequency must be positive");
        if (!room.contains(position)) throw ConfigError("ap '" + id + "': position outside room");
    }
};

struct PropagationParams {
    double path_loss_exponent = 2.5;
    double reference_distance_m = 1.0;
    double shadowing_sigma_db = 4.0;
    double min_distance_m = 0.1;
    // Correlation length of the shadowing field in cells; 0 gives white
    // per-cell shadowing. Obstructions shadow whole regions, not single
    // cells, so the default is a short correlated scale.
    double shadowing_correlation_cells = 3.0;

    void validate() const {
        if (path_loss_exponent < 1.0) throw ConfigError("path_loss_exponent must be >= 1");
        if (!(reference_distance_m > 0.0)) throw ConfigError("reference_distance_m must be positive");
        if (shadowing_sigma_db < 0.0) throw ConfigError("shadowing_sigma_db must be >= 0");
        if (!(min_distance_m > 0.0)) throw ConfigError("min_distance_m must be positive");
        if (shadowing_correlation_cells < 0.0)
            throw ConfigError("shadowing_correlation_cells must be >= 0");
    }
};

struct GridCell {
    int row = 0;
    int col = 0;
};

/// Maps an in-room position to its grid cell; the far boundary clamps into
/// the last row/column.
inline GridCell quantize_to_grid(Point2 p, const RoomGeometry& room) {
    if (!room.contains(p)) throw DataError("position outside room bounds");
    int row = static_cast<int>(std::floor(p.y_m / room.cell_height_m()));
    int col = static_cast<int>(std::floor(p.x_m / room.cell_width_m()));
    if (row >= room.grid_rows) row = room.grid_rows - 1;
    if (col >= room.grid_cols) col = room.grid_cols - 1;
    return {row, col};
}

}  // namespace rfmap
