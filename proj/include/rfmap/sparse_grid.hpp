#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "rfmap/common.hpp"

namespace rfmap {

/// Gridded RSS values with an explicit observed mask; input to all imputers.
struct SparseGrid {
    int rows = 0;
    int cols = 0;
    Matrix values;                          // dBm; meaningful only where mask is set
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;

    static SparseGrid empty(int rows, int cols) {
        SparseGrid g;
        g.rows = rows;
        g.cols = cols;
        g.values = Matrix::Zero(rows, cols);
        g.mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows, cols, false);
        return g;
    }

    int observed_count() const {
        int n = 0;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if (mask(r, c)) ++n;
        return n;
    }
};

struct ImputationResult {
    Matrix completed;
    std::string method;
    int iterations = 0;
    std::vector<double> sweep_max_change;   // MICE convergence trace
    std::vector<std::string> diagnostics;
};

/// Row-major grid dump: `row,col,rss_dbm,observed`.
inline void save_grid_csv(const ImputationResult& res, const SparseGrid& source,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "row,col,rss_dbm,observed\n";
    char buf[64];
    for (int r = 0; r < res.completed.rows(); ++r) {
        for (int c = 0; c < res.completed.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.9g", res.completed(r, c));
            out << r << ',' << c << ',' << buf << ',' << (source.mask(r, c) ? 1 : 0) << '\n';
        }
    }
}

}  // namespace rfmap
