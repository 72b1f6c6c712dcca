#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "rfmap/config.hpp"
#include "rfmap/gan.hpp"
#include "rfmap/interpolate.hpp"
#include "rfmap/localizer.hpp"
#include "rfmap/mice.hpp"
#include "rfmap/sampling.hpp"

namespace rfmap {

inline const std::vector<std::string>& benchmark_variants() {
    static const std::vector<std::string> v{"original", "knn", "mice", "gan"};
    return v;
}

struct VariantStats {
    std::string name;
    std::vector<double> mse_per_run;
    double mean = 0.0;
    double stddev = 0.0;
};

struct BenchmarkReport {
    std::vector<VariantStats> variants;
    std::map<std::string, double> error_reduction_pct;

    const VariantStats& variant(const std::string& name) const {
        for (const auto& v : variants)
            if (v.name == name) return v;
        throw DataError("unknown benchmark variant '" + name + "'");
    }
};

namespace detail {

inline std::vector<LocalizationSample> cells_to_samples(const RoomGeometry& room,
                                                        const std::vector<Matrix>& layers,
                                                        const std::vector<int>& cell_ids) {
    std::vector<LocalizationSample> samples;
    samples.reserve(cell_ids.size());
    for (int id : cell_ids) {
        int r = id / room.grid_cols;
        int c = id % room.grid_cols;
        LocalizationSample s;
        s.features = Vector(layers.size());
        for (std::size_t a = 0; a < layers.size(); ++a) s.features(a) = layers[a](r, c);
        s.target = room.cell_center(r, c);
        samples.push_back(std::move(s));
    }
    return samples;
}

inline void finalize_stats(VariantStats& v) {
    double sum = 0.0;
    for (double m : v.mse_per_run) sum += m;
    v.mean = sum / v.mse_per_run.size();
    if (v.mse_per_run.size() > 1) {
        double sq = 0.0;
        for (double m : v.mse_per_run) sq += (m - v.mean) * (m - v.mean);
        v.stddev = std::sqrt(sq / (v.mse_per_run.size() - 1));
    }
}

}  // namespace detail

/// One seeded run: synthesize truth, sample it, build the four training
/// variants, and score one localizer per variant on a shared ground-truth
/// test set. Returns MSE per variant in benchmark_variants() order.
inline std::vector<double> benchmark_run(const ScenarioConfig& cfg, std::uint64_t run_seed) {
    const auto& room = cfg.room;
    RFMap truth = generate_ground_truth(room, cfg.aps, cfg.propagation,
                                        derive_seed(run_seed, "truth"));
    auto locations =
        sample_locations_fixed(room, cfg.sampling.n_points, derive_seed(run_seed, "locations"));
    MeasurementSet ms =
        collect_measurements(truth, locations, cfg.sampling.readings_per_point,
                             cfg.sampling.reading_noise_sigma_db, derive_seed(run_seed, "readings"));

    const std::size_t n_aps = cfg.aps.size();
    std::vector<SparseGrid> layers;
    for (std::size_t a = 0; a < n_aps; ++a) layers.push_back(to_sparse_grid(ms, a));

    // Shared test set: a seeded 10% of all cells, scored against ground truth.
    // Every variant trains on the remaining cells only.
    std::vector<int> cell_ids(room.cell_count());
    std::iota(cell_ids.begin(), cell_ids.end(), 0);
    std::mt19937_64 split_rng(derive_seed(run_seed, "split"));
    std::shuffle(cell_ids.begin(), cell_ids.end(), split_rng);
    auto n_train_cells =
        static_cast<std::size_t>(std::floor(cell_ids.size() * cfg.localizer.train_fraction));
    std::vector<int> train_cells(cell_ids.begin(), cell_ids.begin() + n_train_cells);
    std::vector<int> test_cells(cell_ids.begin() + n_train_cells, cell_ids.end());
    std::sort(train_cells.begin(), train_cells.end());
    std::sort(test_cells.begin(), test_cells.end());

    std::vector<Matrix> truth_layers = truth.layers;
    auto test_samples = detail::cells_to_samples(room, truth_layers, test_cells);

    auto observed_train_cells = [&](const std::vector<int>& cells) {
        std::vector<int> out;
        for (int id : cells)
            if (layers[0].mask(id / room.grid_cols, id % room.grid_cols)) out.push_back(id);
        return out;
    };

    // original: measured cells only, no imputation
    std::vector<Matrix> measured_layers;
    for (const auto& g : layers) measured_layers.push_back(g.values);
    auto original_train =
        detail::cells_to_samples(room, measured_layers, observed_train_cells(train_cells));

    // knn: per-layer imputation to a full grid
    std::vector<Matrix> knn_layers;
    for (const auto& g : layers)
        knn_layers.push_back(knn_impute(g, cfg.interpolation.knn_k).completed);
    auto knn_train = detail::cells_to_samples(room, knn_layers, train_cells);

    // mice: joint table imputation across APs with cell coordinates as predictors
    Table table = sparse_grid_to_table(room, layers);
    MiceResult mice = mice_impute(table, cfg.interpolation.mice_max_iter, cfg.interpolation.mice_tol,
                                  derive_seed(run_seed, "mice"));
    std::vector<Matrix> mice_layers;
    for (std::size_t a = 0; a < n_aps; ++a)
        mice_layers.push_back(table_column_to_grid(mice.completed, room, static_cast<int>(a)));
    auto mice_train = detail::cells_to_samples(room, mice_layers, train_cells);

    // gan: mice training rows plus generated (x, y, rss...) tuples
    auto gan_train = mice_train;
    if (cfg.gan.augment_n > 0 && cfg.gan.epochs > 0) {
        Matrix real(mice_train.size(), 2 + n_aps);
        for (std::size_t i = 0; i < mice_train.size(); ++i) {
            real(i, 0) = mice_train[i].target.x_m;
            real(i, 1) = mice_train[i].target.y_m;
            for (std::size_t a = 0; a < n_aps; ++a) real(i, 2 + a) = mice_train[i].features(a);
        }
        GanArch arch;
        arch.latent_dim = cfg.gan.latent_dim;
        arch.generator_hidden = cfg.gan.generator_hidden;
        arch.discriminator_hidden = cfg.gan.discriminator_hidden;
        GanModel model = make_gan(arch, static_cast<int>(2 + n_aps), derive_seed(run_seed, "gan"));
        fit_normalization(model, real);
        model.output_bounds = {{0, 0.0, room.width_m}, {1, 0.0, room.length_m}};
        TrainConfig gan_cfg;
        gan_cfg.learning_rate = cfg.gan.lr;
        gan_cfg.batch_size = cfg.gan.batch_size;
        gan_cfg.epochs = cfg.gan.epochs;
        gan_cfg.seed = derive_seed(run_seed, "gan-train-seed");
        train_gan(normalize_samples(model, real), gan_cfg, model);
        Matrix generated =
            generate_samples(model, cfg.gan.augment_n, derive_seed(run_seed, "gan-generate"));
        for (long i = 0; i < generated.rows(); ++i) {
            LocalizationSample s;
            s.features = Vector(n_aps);
            for (std::size_t a = 0; a < n_aps; ++a) s.features(a) = generated(i, 2 + a);
            s.target = {generated(i, 0), generated(i, 1)};
            gan_train.push_back(std::move(s));
        }
    }

    TrainConfig loc_cfg;
    loc_cfg.learning_rate = cfg.localizer.lr;
    loc_cfg.batch_size = cfg.localizer.batch_size;
    loc_cfg.epochs = cfg.localizer.epochs;
    LocalizerArch loc_arch{cfg.localizer.hidden};

    std::vector<double> mses;
    const std::vector<std::vector<LocalizationSample>*> train_sets{&original_train, &knn_train,
                                                                   &mice_train, &gan_train};
    for (std::size_t v = 0; v < train_sets.size(); ++v) {
        loc_cfg.seed = derive_seed(run_seed, "localizer-" + benchmark_variants()[v]);
        LocalizerModel model = train_localizer(*train_sets[v], loc_arch, loc_cfg);
        mses.push_back(evaluate_mse(model, test_samples));
    }
    return mses;
}

inline BenchmarkReport run_benchmark(const ScenarioConfig& cfg, int runs) {
    if (runs < 1) throw DataError("run_benchmark: runs must be >= 1");
    BenchmarkReport report;
    for (const auto& name : benchmark_variants()) report.variants.push_back({name, {}, 0.0, 0.0});
    for (int r = 0; r < runs; ++r) {
        std::vector<double> mses;
        try {
            mses = benchmark_run(cfg, cfg.bench.base_seed + r);
        } catch (const std::exception& e) {
            throw NumericError("benchmark run " + std::to_string(r) + ": " + e.what());
        }
        for (std::size_t v = 0; v < mses.size(); ++v)
            report.variants[v].mse_per_run.push_back(mses[v]);
    }
    for (auto& v : report.variants) detail::finalize_stats(v);

    double base = report.variant("original").mean;
    if (base > 0.0) {
        report.error_reduction_pct["knn_vs_original"] =
            error_reduction(base, report.variant("knn").mean);
        report.error_reduction_pct["mice_vs_original"] =
            error_reduction(base, report.variant("mice").mean);
        report.error_reduction_pct["gan_vs_original"] =
            error_reduction(base, report.variant("gan").mean);
    }
    double mice_mean = report.variant("mice").mean;
    if (mice_mean > 0.0)
        report.error_reduction_pct["gan_vs_mice"] =
            error_reduction(mice_mean, report.variant("gan").mean);
    return report;
}

inline nlohmann::json report_to_json(const BenchmarkReport& report) {
    nlohmann::json j;
    j["variants"] = nlohmann::json::array();
    for (const auto& v : report.variants) {
        j["variants"].push_back({{"name", v.name},
                                 {"mse_per_run", v.mse_per_run},
                                 {"mean", v.mean},
                                 {"std", v.stddev}});
    }
    j["error_reduction_pct"] = report.error_reduction_pct;
    return j;
}

/// CSV export: `variant,run,mse`.
inline void save_report_csv(const BenchmarkReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "variant,run,mse\n";
    char buf[64];
    for (const auto& v : report.variants) {
        for (std::size_t r = 0; r < v.mse_per_run.size(); ++r) {
            std::snprintf(buf, sizeof(buf), "%.9g", v.mse_per_run[r]);
            out << v.name << ',' << r << ',' << buf << '\n';
        }
    }
}

/// Standalone SVG bar chart, mean ± std per variant.
inline void save_report_svg(const BenchmarkReport& report, const std::string& path) {
    const int width = 640, height = 420;
    const int margin_left = 70, margin_bottom = 60, margin_top = 40, margin_right = 20;
    const int plot_w = width - margin_left - margin_right;
    const int plot_h = height - margin_top - margin_bottom;

    double max_val = 0.0;
    for (const auto& v : report.variants) max_val = std::max(max_val, v.mean + v.stddev);
    if (max_val <= 0.0) max_val = 1.0;
    max_val *= 1.1;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    char buf[512];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
           "Localization MSE by training variant</text>\n";

    // y axis with 5 ticks
    for (int t = 0; t <= 5; ++t) {
        double val = max_val * t / 5.0;
        double y = margin_top + plot_h - plot_h * t / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"#ccc\"/>\n",
                      margin_left, y, width - margin_right, y);
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" "
                      "font-size=\"11\">%.3g</text>\n",
                      margin_left - 6, y + 4, val);
        out << buf;
    }
    out << "<text x=\"16\" y=\"" << margin_top + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 16 "
        << margin_top + plot_h / 2 << ")\">MSE (m^2)</text>\n";

    const char* colors[] = {"#888888", "#4477aa", "#228833", "#cc3311"};
    const double slot = static_cast<double>(plot_w) / report.variants.size();
    for (std::size_t i = 0; i < report.variants.size(); ++i) {
        const auto& v = report.variants[i];
        double bar_w = slot * 0.55;
        double x = margin_left + slot * i + (slot - bar_w) / 2.0;
        double h = plot_h * v.mean / max_val;
        double y = margin_top + plot_h - h;
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\"/>\n",
                      x, y, bar_w, h, colors[i % 4]);
        out << buf;
        if (v.stddev > 0.0) {
            double cx = x + bar_w / 2.0;
            double y_lo = margin_top + plot_h - plot_h * std::max(v.mean - v.stddev, 0.0) / max_val;
            double y_hi = margin_top + plot_h - plot_h * (v.mean + v.stddev) / max_val;
            std::snprintf(buf, sizeof(buf),
                          "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\" "
                          "stroke-width=\"1.5\"/>\n",
                          cx, y_lo, cx, y_hi);
            out << buf;
            for (double ye : {y_lo, y_hi}) {
                std::snprintf(buf, sizeof(buf),
                              "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                              "stroke=\"black\" stroke-width=\"1.5\"/>\n",
                              cx - 5.0, ye, cx + 5.0, ye);
                out << buf;
            }
        }
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\" font-size=\"13\">%s</text>\n",
                      x + bar_w / 2.0, margin_top + plot_h + 20, v.name.c_str());
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\" font-size=\"11\">%.3g</text>\n",
                      x + bar_w / 2.0, y - 6.0, v.mean);
        out << buf;
    }
    out << "</svg>\n";
}

}  // namespace rfmap
