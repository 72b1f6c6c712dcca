// rfmap: synthetic RF-map pipeline driver.
//
// Subcommands: simulate, sample, impute, train-gan, bench. All randomness
// flows from the config seed through per-stage derived seeds, so re-running
// any command with the same config reproduces its output byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rfmap/benchmark.hpp"
#include "rfmap/config.hpp"
#include "rfmap/dct.hpp"
#include "rfmap/gan.hpp"
#include "rfmap/interpolate.hpp"
#include "rfmap/mice.hpp"
#include "rfmap/sampling.hpp"

namespace {

using namespace rfmap;

// Grid CSV shared by simulate/impute: `ap_id,row,col,rss_dbm,observed`.
void save_layers_csv(const std::vector<std::string>& ap_ids, const std::vector<Matrix>& layers,
                     const std::vector<const SparseGrid*>& masks, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "ap_id,row,col,rss_dbm,observed\n";
    char buf[64];
    for (std::size_t a = 0; a < layers.size(); ++a) {
        for (int r = 0; r < layers[a].rows(); ++r) {
            for (int c = 0; c < layers[a].cols(); ++c) {
                std::snprintf(buf, sizeof(buf), "%.9g", layers[a](r, c));
                int observed = masks.empty() ? 1 : (masks[a]->mask(r, c) ? 1 : 0);
                out << ap_ids[a] << ',' << r << ',' << c << ',' << buf << ',' << observed << '\n';
            }
        }
    }
}

// `covered`, when supplied, gets one flag per layer: true iff every cell of
// that layer appeared in the file (the `observed` column is provenance —
// measured vs imputed — not presence).
std::vector<SparseGrid> load_layers_csv(const std::string& path, const ScenarioConfig& cfg,
                                        std::vector<std::string>& ap_ids,
                                        std::vector<bool>* covered = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ap_id,row,col,rss_dbm,observed")
        throw DataError(path + ": unexpected header '" + line + "'");
    std::vector<SparseGrid> layers;
    std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> present;
    std::map<std::string, std::size_t> index;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string ap, rs, cs, vs, os;
        if (!std::getline(ss, ap, ',') || !std::getline(ss, rs, ',') ||
            !std::getline(ss, cs, ',') || !std::getline(ss, vs, ',') || !std::getline(ss, os))
            throw DataError(path + " line " + std::to_string(line_no) + ": expected 5 fields");
        auto it = index.find(ap);
        if (it == index.end()) {
            it = index.emplace(ap, layers.size()).first;
            ap_ids.push_back(ap);
            layers.push_back(SparseGrid::empty(cfg.room.grid_rows, cfg.room.grid_cols));
            present.push_back(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                cfg.room.grid_rows, cfg.room.grid_cols, false));
        }
        int r, c, obs;
        double v;
        try {
            r = std::stoi(rs);
            c = std::stoi(cs);
            v = std::stod(vs);
            obs = std::stoi(os);
        } catch (const std::exception&) {
            throw DataError(path + " line " + std::to_string(line_no) + ": malformed row");
        }
        if (r < 0 || r >= cfg.room.grid_rows || c < 0 || c >= cfg.room.grid_cols)
            throw DataError(path + " line " + std::to_string(line_no) + ": cell out of range");
        auto& g = layers[it->second];
        g.values(r, c) = v;
        g.mask(r, c) = obs != 0;
        present[it->second](r, c) = true;
    }
    if (layers.empty()) throw DataError(path + ": no data rows");
    if (covered) {
        covered->clear();
        for (const auto& p : present) covered->push_back(p.all());
    }
    return layers;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path) {
    ScenarioConfig cfg = load_scenario_config(config_path);
    RFMap truth =
        generate_ground_truth(cfg.room, cfg.aps, cfg.propagation, derive_seed(cfg.seed, "truth"));
    std::vector<std::string> ids;
    for (const auto& ap : cfg.aps) ids.push_back(ap.id);
    save_layers_csv(ids, truth.layers, {}, out_path);
    return 0;
}

int cmd_sample(const std::string& config_path, const std::string& out_path) {
    ScenarioConfig cfg = load_scenario_config(config_path);
    RFMap truth =
        generate_ground_truth(cfg.room, cfg.aps, cfg.propagation, derive_seed(cfg.seed, "truth"));
    auto locations = sample_locations_fixed(cfg.room, cfg.sampling.n_points,
                                            derive_seed(cfg.seed, "locations"));
    MeasurementSet ms =
        collect_measurements(truth, locations, cfg.sampling.readings_per_point,
                             cfg.sampling.reading_noise_sigma_db, derive_seed(cfg.seed, "readings"));
    save_csv(ms, out_path);
    return 0;
}

int cmd_impute(const std::string& config_path, const std::string& method,
               const std::string& in_path, const std::string& out_path) {
    ScenarioConfig cfg = load_scenario_config(config_path);
    MeasurementSet ms = load_csv(in_path, cfg.room);
    if (ms.ap_ids.empty()) throw DataError(in_path + ": no measurements");
    std::vector<SparseGrid> layers;
    for (std::size_t a = 0; a < ms.ap_ids.size(); ++a) layers.push_back(to_sparse_grid(ms, a));

    std::vector<Matrix> completed;
    if (method == "mice") {
        Table table = sparse_grid_to_table(cfg.room, layers);
        MiceResult res = mice_impute(table, cfg.interpolation.mice_max_iter,
                                     cfg.interpolation.mice_tol, derive_seed(cfg.seed, "mice"));
        for (std::size_t a = 0; a < layers.size(); ++a)
            completed.push_back(table_column_to_grid(res.completed, cfg.room, static_cast<int>(a)));
    } else {
        for (const auto& g : layers) {
            if (method == "knn")
                completed.push_back(knn_impute(g, cfg.interpolation.knn_k).completed);
            else if (method == "idw")
                completed.push_back(idw_interpolate(g, cfg.interpolation.idw_p,
                                                    cfg.interpolation.idw_epsilon_m)
                                        .completed);
            else if (method == "dct")
                completed.push_back(dct_interpolate(g, cfg.interpolation.dct_num_coeffs).completed);
            else
                throw ConfigError("unknown imputation method '" + method + "'");
        }
    }
    std::vector<const SparseGrid*> masks;
    for (const auto& g : layers) masks.push_back(&g);
    save_layers_csv(ms.ap_ids, completed, masks, out_path);
    return 0;
}

int cmd_train_gan(const std::string& config_path, const std::string& in_path,
                  const std::string& model_path, const std::string& log_path) {
    ScenarioConfig cfg = load_scenario_config(config_path);
    std::vector<std::string> ap_ids;
    std::vector<bool> covered;
    auto layers = load_layers_csv(in_path, cfg, ap_ids, &covered);
    for (bool all_cells : covered)
        if (!all_cells)
            throw DataError("train-gan input must be a completed grid (run impute first)");

    // training tuples: (x_center, y_center, rss per AP) for every cell
    Matrix real(cfg.room.cell_count(), 2 + layers.size());
    long i = 0;
    for (int r = 0; r < cfg.room.grid_rows; ++r) {
        for (int c = 0; c < cfg.room.grid_cols; ++c) {
            Point2 center = cfg.room.cell_center(r, c);
            real(i, 0) = center.x_m;
            real(i, 1) = center.y_m;
            for (std::size_t a = 0; a < layers.size(); ++a)
                real(i, 2 + a) = layers[a].values(r, c);
            ++i;
        }
    }
    GanArch arch;
    arch.latent_dim = cfg.gan.latent_dim;
    arch.generator_hidden = cfg.gan.generator_hidden;
    arch.discriminator_hidden = cfg.gan.discriminator_hidden;
    GanModel model =
        make_gan(arch, static_cast<int>(2 + layers.size()), derive_seed(cfg.seed, "gan"));
    fit_normalization(model, real);
    model.output_bounds = {{0, 0.0, cfg.room.width_m}, {1, 0.0, cfg.room.length_m}};
    TrainConfig tc;
    tc.learning_rate = cfg.gan.lr;
    tc.batch_size = cfg.gan.batch_size;
    tc.epochs = cfg.gan.epochs;
    tc.seed = derive_seed(cfg.seed, "gan-train-seed");
    GanTrainLog log = train_gan(normalize_samples(model, real), tc, model);

    std::ofstream out(model_path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + model_path);
    out << gan_to_json(model).dump(2) << '\n';
    save_gan_log_csv(log, log_path);
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir, int runs_override,
              long long seed_override) {
    ScenarioConfig cfg = load_scenario_config(config_path);
    if (runs_override > 0) cfg.bench.runs = runs_override;
    if (seed_override >= 0) cfg.bench.base_seed = static_cast<std::uint64_t>(seed_override);
    std::filesystem::create_directories(out_dir);
    BenchmarkReport report = run_benchmark(cfg, cfg.bench.runs);
    {
        std::ofstream out(out_dir + "/report.json", std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + out_dir + "/report.json");
        out << report_to_json(report).dump(2) << '\n';
    }
    save_report_csv(report, out_dir + "/report.csv");
    save_report_svg(report, out_dir + "/fig4.svg");
    for (const auto& v : report.variants)
        std::printf("%-8s mean MSE %.4f m^2  (std %.4f, %zu runs)\n", v.name.c_str(), v.mean,
                    v.stddev, v.mse_per_run.size());
    for (const auto& [name, pct] : report.error_reduction_pct)
        std::printf("%-18s %+.2f%%\n", name.c_str(), pct);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic RF-map construction, interpolation, and localization benchmark"};
    app.require_subcommand(1);

    std::string config_path, out_path, in_path, method, model_path, log_path;
    int runs = -1;
    long long seed = -1;

    auto* sim = app.add_subcommand("simulate", "write the ground-truth RSS grid as CSV");
    sim->add_option("--config", config_path, "scenario config JSON")->required();
    sim->add_option("--out", out_path, "output grid CSV")->required();

    auto* smp = app.add_subcommand("sample", "draw measurement points and write the reading CSV");
    smp->add_option("--config", config_path, "scenario config JSON")->required();
    smp->add_option("--out", out_path, "output measurement CSV")->required();

    auto* imp = app.add_subcommand("impute", "complete a sparse measurement grid");
    imp->add_option("--config", config_path, "scenario config JSON")->required();
    imp->add_option("--method", method, "knn|idw|dct|mice")->required();
    imp->add_option("--in", in_path, "measurement CSV")->required();
    imp->add_option("--out", out_path, "completed-grid CSV")->required();

    auto* gan = app.add_subcommand("train-gan", "train the GAN on a completed grid");
    gan->add_option("--config", config_path, "scenario config JSON")->required();
    gan->add_option("--in", in_path, "completed-grid CSV")->required();
    gan->add_option("--model-out", model_path, "output model JSON")->required();
    gan->add_option("--log-out", log_path, "output training log CSV")->required();

    auto* bench = app.add_subcommand("bench", "run the four-variant localization benchmark");
    bench->add_option("--config", config_path, "scenario config JSON")->required();
    bench->add_option("--out", out_path, "output directory")->required();
    bench->add_option("--runs", runs, "override bench.runs");
    bench->add_option("--seed", seed, "override bench.base_seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_path);
        if (smp->parsed()) return cmd_sample(config_path, out_path);
        if (imp->parsed()) return cmd_impute(config_path, method, in_path, out_path);
        if (gan->parsed()) return cmd_train_gan(config_path, in_path, model_path, log_path);
        if (bench->parsed()) return cmd_bench(config_path, out_path, runs, seed);
    } catch (const rfmap::ConfigError& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 1;
    } catch (const rfmap::DataError& e) {
        std::fprintf(stderr, "error: data: %s\n", e.what());
        return 2;
    } catch (const rfmap::NumericError& e) {
        std::fprintf(stderr, "error: numeric: %s\n", e.what());
        return 3;
    }
    return 0;
}
