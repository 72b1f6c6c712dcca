#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfmap/geometry.hpp"

namespace rfmap {

struct SamplingConfig {
    int n_points = 50;
    int readings_per_point = 150;
    double reading_noise_sigma_db = 2.0;
};

struct InterpolationConfig {
    int knn_k = 3;
    double idw_p = 2.0;
    double idw_epsilon_m = 1e-6;
    int dct_num_coeffs = 12;
    int mice_max_iter = 50;
    double mice_tol = 1e-6;
};

struct GanConfig {
    int latent_dim = 8;
    int epochs = 300;
    int batch_size = 32;
    double lr = 1e-3;
    int augment_n = 300;
    std::vector<int> generator_hidden{32, 32};
    std::vector<int> discriminator_hidden{32, 32};
};

struct LocalizerConfig {
    std::vector<int> hidden{64, 64};
    int epochs = 150;
    int batch_size = 32;
    double lr = 1e-3;
    double train_fraction = 0.9;
};

struct BenchConfig {
    int runs = 10;
    std::uint64_t base_seed = 1;
};

struct ScenarioConfig {
    RoomGeometry room{10.75, 17.4, 30, 10};
    std::vector<AccessPoint> aps;
    PropagationParams propagation;
    std::uint64_t seed = 1;
    SamplingConfig sampling;
    InterpolationConfig interpolation;
    GanConfig gan;
    LocalizerConfig localizer;
    BenchConfig bench;

    /// Three in-room access points, +21 dBm at 2.4 GHz.
    static ScenarioConfig defaults() {
        ScenarioConfig cfg;
        cfg.aps = {
            {"ap1", {2.5, 3.0}, 21.0, 2.4e9},
            {"ap2", {8.0, 8.7}, 21.0, 2.4e9},
            {"ap3", {5.0, 14.5}, 21.0, 2.4e9},
        };
        return cfg;
    }

    void validate() const {
        room.validate();
        propagation.validate();
        if (aps.empty()) throw ConfigError("at least one access point required");
        for (const auto& ap : aps) ap.validate(room);
        if (sampling.n_points < 1) throw ConfigError("sampling.n_points must be >= 1");
        if (sampling.n_points > room.cell_count())
            throw ConfigError("sampling.n_points exceeds grid cell count");
        if (sampling.readings_per_point < 1)
            throw ConfigError("sampling.readings_per_point must be >= 1");
        if (sampling.reading_noise_sigma_db < 0.0)
            throw ConfigError("sampling.reading_noise_sigma_db must be >= 0");
        if (interpolation.knn_k < 1) throw ConfigError("interpolation.knn_k must be >= 1");
        if (!(interpolation.idw_p > 0.0)) throw ConfigError("interpolation.idw_p must be positive");
        if (interpolation.dct_num_coeffs < 1)
            throw ConfigError("interpolation.dct_num_coeffs must be >= 1");
        if (interpolation.mice_max_iter < 1)
            throw ConfigError("interpolation.mice_max_iter must be >= 1");
        if (!(interpolation.mice_tol > 0.0))
            throw ConfigError("interpolation.mice_tol must be positive");
        if (gan.latent_dim < 1) throw ConfigError("gan.latent_dim must be >= 1");
        if (gan.epochs < 0) throw ConfigError("gan.epochs must be >= 0");
        if (gan.batch_size < 1) throw ConfigError("gan.batch_size must be >= 1");
        if (!(gan.lr > 0.0)) throw ConfigError("gan.lr must be positive");
        if (gan.augment_n < 0) throw ConfigError("gan.augment_n must be >= 0");
        if (localizer.epochs < 1) throw ConfigError("localizer.epochs must be >= 1");
        if (localizer.batch_size < 1) throw ConfigError("localizer.batch_size must be >= 1");
        if (!(localizer.lr > 0.0)) throw ConfigError("localizer.lr must be positive");
        if (!(localizer.train_fraction > 0.0) || !(localizer.train_fraction < 1.0))
            throw ConfigError("localizer.train_fraction must be in (0, 1)");
        if (bench.runs < 1) throw ConfigError("bench.runs must be >= 1");
    }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const char* section,
                                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(section) + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError(std::string(section) + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string("bad value for '") + key + "'");
        }
    }
}

}  // namespace detail

inline ScenarioConfig parse_scenario_config(const nlohmann::json& j) {
    detail::reject_unknown_keys(j, "config",
                                {"room", "aps", "propagation", "seed", "sampling", "interpolation",
                                 "gan", "localizer", "bench"});
    ScenarioConfig cfg = ScenarioConfig::defaults();
    if (auto it = j.find("room"); it != j.end()) {
        detail::reject_unknown_keys(*it, "room", {"width_m", "length_m", "grid_rows", "grid_cols"});
        detail::read_field(*it, "width_m", cfg.room.width_m);
        detail::read_field(*it, "length_m", cfg.room.length_m);
        detail::read_field(*it, "grid_rows", cfg.room.grid_rows);
        detail::read_field(*it, "grid_cols", cfg.room.grid_cols);
    }
    if (auto it = j.find("aps"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("aps: expected an array");
        cfg.aps.clear();
        for (const auto& aj : *it) {
            detail::reject_unknown_keys(aj, "aps[]",
                                        {"id", "x_m", "y_m", "tx_power_dbm", "frequency_hz"});
            AccessPoint ap;
            ap.frequency_hz = 2.4e9;
            detail::read_field(aj, "id", ap.id);
            detail::read_field(aj, "x_m", ap.position.x_m);
            detail::read_field(aj, "y_m", ap.position.y_m);
            detail::read_field(aj, "tx_power_dbm", ap.tx_power_dbm);
            detail::read_field(aj, "frequency_hz", ap.frequency_hz);
            cfg.aps.push_back(std::move(ap));
        }
    }
    if (auto it = j.find("propagation"); it != j.end()) {
        detail::reject_unknown_keys(
            *it, "propagation",
            {"path_loss_exponent", "reference_distance_m", "shadowing_sigma_db", "min_distance_m",
             "shadowing_correlation_cells"});
        detail::read_field(*it, "path_loss_exponent", cfg.propagation.path_loss_exponent);
        detail::read_field(*it, "reference_distance_m", cfg.propagation.reference_distance_m);
        detail::read_field(*it, "shadowing_sigma_db", cfg.propagation.shadowing_sigma_db);
        detail::read_field(*it, "min_distance_m", cfg.propagation.min_distance_m);
        detail::read_field(*it, "shadowing_correlation_cells",
                           cfg.propagation.shadowing_correlation_cells);
    }
    detail::read_field(j, "seed", cfg.seed);
    if (auto it = j.find("sampling"); it != j.end()) {
        detail::reject_unknown_keys(*it, "sampling",
                                    {"n_points", "readings_per_point", "reading_noise_sigma_db"});
        detail::read_field(*it, "n_points", cfg.sampling.n_points);
        detail::read_field(*it, "readings_per_point", cfg.sampling.readings_per_point);
        detail::read_field(*it, "reading_noise_sigma_db", cfg.sampling.reading_noise_sigma_db);
    }
    if (auto it = j.find("interpolation"); it != j.end()) {
        detail::reject_unknown_keys(*it, "interpolation",
                                    {"knn_k", "idw_p", "idw_epsilon_m", "dct_num_coeffs",
                                     "mice_max_iter", "mice_tol"});
        detail::read_field(*it, "knn_k", cfg.interpolation.knn_k);
        detail::read_field(*it, "idw_p", cfg.interpolation.idw_p);
        detail::read_field(*it, "idw_epsilon_m", cfg.interpolation.idw_epsilon_m);
        detail::read_field(*it, "dct_num_coeffs", cfg.interpolation.dct_num_coeffs);
        detail::read_field(*it, "mice_max_iter", cfg.interpolation.mice_max_iter);
        detail::read_field(*it, "mice_tol", cfg.interpolation.mice_tol);
    }
    if (auto it = j.find("gan"); it != j.end()) {
        detail::reject_unknown_keys(*it, "gan",
                                    {"latent_dim", "epochs", "batch_size", "lr", "augment_n",
                                     "generator_hidden", "discriminator_hidden"});
        detail::read_field(*it, "latent_dim", cfg.gan.latent_dim);
        detail::read_field(*it, "epochs", cfg.gan.epochs);
        detail::read_field(*it, "batch_size", cfg.gan.batch_size);
        detail::read_field(*it, "lr", cfg.gan.lr);
        detail::read_field(*it, "augment_n", cfg.gan.augment_n);
        detail::read_field(*it, "generator_hidden", cfg.gan.generator_hidden);
        detail::read_field(*it, "discriminator_hidden", cfg.gan.discriminator_hidden);
    }
    if (auto it = j.find("localizer"); it != j.end()) {
        detail::reject_unknown_keys(*it, "localizer",
                                    {"hidden", "epochs", "batch_size", "lr", "train_fraction"});
        detail::read_field(*it, "hidden", cfg.localizer.hidden);
        detail::read_field(*it, "epochs", cfg.localizer.epochs);
        detail::read_field(*it, "batch_size", cfg.localizer.batch_size);
        detail::read_field(*it, "lr", cfg.localizer.lr);
        detail::read_field(*it, "train_fraction", cfg.localizer.train_fraction);
    }
    if (auto it = j.find("bench"); it != j.end()) {
        detail::reject_unknown_keys(*it, "bench", {"runs", "base_seed"});
        detail::read_field(*it, "runs", cfg.bench.runs);
        detail::read_field(*it, "base_seed", cfg.bench.base_seed);
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_scenario_config(j);
}

}  // namespace rfmap
