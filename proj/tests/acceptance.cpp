// Acceptance suite: one pass/fail line per criterion, each with its own
// runtime budget. Exits nonzero if any criterion fails. Oracles here are
// deliberately independent re-implementations (brute-force loops, direct
// double sums) rather than calls back into the library helpers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfmap/benchmark.hpp"
#include "rfmap/dct.hpp"
#include "rfmap/divergence.hpp"
#include "rfmap/gan.hpp"
#include "rfmap/interpolate.hpp"
#include "rfmap/mice.hpp"
#include "rfmap/net.hpp"

namespace fs = std::filesystem;
using namespace rfmap;

namespace {

struct Criterion {
    const char* name;
    double budget_s;
    bool (*run)(std::string& detail);
};

// ---- helpers -------------------------------------------------------------

Matrix naive_knn(const SparseGrid& g, int k) {
    Matrix out = g.values;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (g.mask(r, c)) continue;
            struct Cand {
                double d2;
                int row, col;
                double val;
            };
            std::vector<Cand> cands;
            for (int rr = 0; rr < g.rows; ++rr)
                for (int cc = 0; cc < g.cols; ++cc)
                    if (g.mask(rr, cc)) {
                        double d2 = double(r - rr) * (r - rr) + double(c - cc) * (c - cc);
                        cands.push_back({d2, rr, cc, g.values(rr, cc)});
                    }
            std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
                if (a.d2 != b.d2) return a.d2 < b.d2;
                if (a.row != b.row) return a.row < b.row;
                return a.col < b.col;
            });
            double sum = 0.0;
            int use = std::min<int>(k, static_cast<int>(cands.size()));
            for (int i = 0; i < use; ++i) sum += cands[i].val;
            out(r, c) = sum / use;
        }
    }
    return out;
}

Matrix naive_idw(const SparseGrid& g, double p, double eps) {
    Matrix out = g.values;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (g.mask(r, c)) continue;
            double num = 0.0, den = 0.0;
            for (int rr = 0; rr < g.rows; ++rr)
                for (int cc = 0; cc < g.cols; ++cc)
                    if (g.mask(rr, cc)) {
                        double d = std::sqrt(double(r - rr) * (r - rr) + double(c - cc) * (c - cc));
                        double w = 1.0 / std::pow(d + eps, p);
                        num += w * g.values(rr, cc);
                        den += w;
                    }
            out(r, c) = num / den;
        }
    }
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(RFMAP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

int count_substr(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

// ---- criteria ------------------------------------------------------------

bool check_interpolation_oracles(std::string& detail) {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> dim(2, 6);
    std::uniform_real_distribution<double> val(-90.0, -30.0);
    for (int t = 0; t < 500; ++t) {
        SparseGrid g = SparseGrid::empty(dim(rng), dim(rng));
        std::uniform_int_distribution<int> n_obs(1, std::min(8, g.rows * g.cols));
        int want = n_obs(rng);
        std::vector<int> cells(g.rows * g.cols);
        std::iota(cells.begin(), cells.end(), 0);
        std::shuffle(cells.begin(), cells.end(), rng);
        for (int i = 0; i < want; ++i) {
            int r = cells[i] / g.cols, c = cells[i] % g.cols;
            g.mask(r, c) = true;
            g.values(r, c) = val(rng);
        }
        std::uniform_int_distribution<int> kd(1, want);
        int k = kd(rng);
        Matrix knn = knn_impute(g, k).completed;
        Matrix knn_ref = naive_knn(g, k);
        if (knn != knn_ref) {
            detail = "knn mismatch at case " + std::to_string(t);
            return false;
        }
        Matrix idw = idw_interpolate(g, 2.0, 1e-6).completed;
        Matrix idw_ref = naive_idw(g, 2.0, 1e-6);
        if ((idw - idw_ref).cwiseAbs().maxCoeff() > 1e-12) {
            detail = "idw mismatch at case " + std::to_string(t);
            return false;
        }
    }
    detail = "500 random masks, knn bitwise + idw within 1e-12";
    return true;
}

bool check_dct(std::string& detail) {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> dim(2, 32);
    std::normal_distribution<double> val(0.0, 10.0);
    double worst_rt = 0.0, worst_pv = 0.0;
    for (int t = 0; t < 200; ++t) {
        int n1 = dim(rng), n2 = dim(rng);
        Matrix x(n1, n2);
        for (int r = 0; r < n1; ++r)
            for (int c = 0; c < n2; ++c) x(r, c) = val(rng);
        DctSpectrum s = dct2_forward(x);
        worst_rt = std::max(worst_rt, (dct2_inverse(s) - x).cwiseAbs().maxCoeff());
        worst_pv = std::max(worst_pv,
                            std::abs(x.squaredNorm() - s.coefficients.squaredNorm()));
        if (worst_rt > 1e-9 || worst_pv > 1e-9) {
            detail = "round-trip " + std::to_string(worst_rt) + ", parseval " +
                     std::to_string(worst_pv);
            return false;
        }
    }
    // constant grid: only the DC coefficient survives, value c*sqrt(N1*N2)
    for (auto [n1, n2] : std::vector<std::pair<int, int>>{{4, 4}, {8, 3}, {5, 17}}) {
        double c = 7.25;
        Matrix x = Matrix::Constant(n1, n2, c);
        DctSpectrum s = dct2_forward(x);
        if (std::abs(s.coefficients(0, 0) - c * std::sqrt(double(n1) * n2)) > 1e-9) {
            detail = "bad DC coefficient on constant grid";
            return false;
        }
        Matrix rest = s.coefficients;
        rest(0, 0) = 0.0;
        if (rest.cwiseAbs().maxCoeff() > 1e-9) {
            detail = "nonzero AC coefficient on constant grid";
            return false;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "200 grids; worst round-trip %.2e, worst parseval gap %.2e",
                  worst_rt, worst_pv);
    detail = buf;
    return true;
}

bool check_mice(std::string& detail) {
    // exact linear dependency: a single incomplete column determined by the others
    {
        const long n = 20;
        Matrix values(n, 3);
        for (long r = 0; r < n; ++r) {
            values(r, 0) = 0.5 * r - 3.0;
            values(r, 1) = 0.1 * r * r - 2.0;  // not collinear with column 0
            values(r, 2) = 2.0 * values(r, 0) - values(r, 1) + 1.0;
        }
        Table t;
        t.values = values;
        t.mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, 3, true);
        double truth = values(7, 2);
        t.mask(7, 2) = false;
        t.values(7, 2) = 0.0;
        MiceResult res = mice_impute(t, 30, 1e-10);
        if (std::abs(res.completed(7, 2) - truth) > 1e-8) {
            detail = "linear dependency not recovered";
            return false;
        }
    }
    // 200x5 correlated Gaussian, 20% MCAR, 100 mask seeds
    std::mt19937_64 data_rng(31);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix truth(200, 5);
    for (long r = 0; r < 200; ++r) {
        double latent = normal(data_rng);
        for (long c = 0; c < 5; ++c) truth(r, c) = (c + 1.0) * latent + 0.3 * normal(data_rng);
    }
    int wins = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        std::bernoulli_distribution drop(0.2);
        Table t;
        t.values = truth;
        t.mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(200, 5, true);
        for (long r = 0; r < 200; ++r)
            for (long c = 0; c < 5; ++c)
                if (drop(rng)) {
                    t.mask(r, c) = false;
                    t.values(r, c) = 0.0;
                }
        MiceResult res;
        try {
            res = mice_impute(t, 50, 1e-6);
        } catch (const DataError&) {
            continue;  // degenerate mask (a column nearly empty); counts as a loss
        }
        Matrix mean_fill = t.values;
        for (long c = 0; c < 5; ++c) {
            double sum = 0.0;
            long obs = 0;
            for (long r = 0; r < 200; ++r)
                if (t.mask(r, c)) {
                    sum += truth(r, c);
                    ++obs;
                }
            for (long r = 0; r < 200; ++r)
                if (!t.mask(r, c)) mean_fill(r, c) = sum / obs;
        }
        double sq_mice = 0.0, sq_mean = 0.0;
        for (long r = 0; r < 200; ++r)
            for (long c = 0; c < 5; ++c)
                if (!t.mask(r, c)) {
                    sq_mice += std::pow(res.completed(r, c) - truth(r, c), 2);
                    sq_mean += std::pow(mean_fill(r, c) - truth(r, c), 2);
                }
        if (sq_mice < sq_mean) ++wins;
    }
    detail = "mice beat mean-fill in " + std::to_string(wins) + "/100 mask seeds (need >= 95)";
    return wins >= 95;
}

bool check_gradients(std::string& detail) {
    const std::vector<Activation> acts = {Activation::identity, Activation::relu,
                                          Activation::leaky_relu, Activation::tanh_fn,
                                          Activation::sigmoid};
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed * 31 + 7);
        std::normal_distribution<double> val(0.0, 1.0);
        for (Activation hidden : acts) {
            for (LossKind loss : {LossKind::squared_error, LossKind::binary_log_loss}) {
                // log loss needs (0,1) outputs; squared error gets a linear head
                Activation head = loss == LossKind::binary_log_loss ? Activation::sigmoid
                                                                    : Activation::identity;
                int out_dim = loss == LossKind::binary_log_loss ? 1 : 2;
                DenseNetwork net = make_network({3, 5, out_dim}, {hidden, head}, seed);
                Matrix batch(4, 3), target(4, out_dim);
                for (long r = 0; r < 4; ++r) {
                    for (long c = 0; c < 3; ++c) batch(r, c) = val(rng);
                    for (long c = 0; c < out_dim; ++c)
                        target(r, c) = loss == LossKind::binary_log_loss ? double(r % 2)
                                                                         : val(rng);
                }
                worst = std::max(worst, gradient_check(net, batch, target, loss, 1e-5));
            }
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max relative error %.2e over 20 seeds (need < 1e-4)", worst);
    detail = buf;
    return worst < 1e-4;
}

bool check_gan_toy(std::string& detail) {
    // fixed-seed fixture: 512 train samples from N(3, 0.5), latent 4,
    // 16-16 hidden stacks, 2000 epochs of batch-64 adam
    std::mt19937_64 rng(101);
    std::normal_distribution<double> d(3.0, 0.5);
    Matrix real(512, 1);
    for (long i = 0; i < real.rows(); ++i) real(i, 0) = d(rng);
    std::mt19937_64 held_rng(202);
    std::vector<double> held(5000);
    for (double& v : held) v = d(held_rng);

    GanModel model = make_gan({4, {16, 16}, {16, 16}}, 1, 7);
    fit_normalization(model, real);
    TrainConfig cfg;
    cfg.epochs = 2000;
    cfg.batch_size = 64;
    cfg.seed = 7;
    train_gan(normalize_samples(model, real), cfg, model);

    Matrix gen = generate_samples(model, 5000, 14);
    std::vector<double> g(gen.data(), gen.data() + gen.rows());
    double lo = std::min(*std::min_element(g.begin(), g.end()),
                         *std::min_element(held.begin(), held.end()));
    double hi = std::max(*std::max_element(g.begin(), g.end()),
                         *std::max_element(held.begin(), held.end())) +
                1e-9;
    double js = js_divergence(histogram(g, 30, lo, hi), histogram(held, 30, lo, hi));
    double d_fake = forward(model.discriminator, normalize_samples(model, gen)).mean();
    char buf[96];
    std::snprintf(buf, sizeof(buf), "js %.4f nats (need < 0.1), mean D(G(z)) %.3f (need 0.35..0.65)",
                  js, d_fake);
    detail = buf;
    return js < 0.1 && d_fake >= 0.35 && d_fake <= 0.65;
}

bool check_benchmark_trend(std::string& detail) {
    fs::path dir = fs::temp_directory_path() / "rfmap_accept_bench";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << "{}\n";
    if (run_cli("bench --config " + (dir / "config.json").string() + " --out " +
                (dir / "out").string()) != 0) {
        detail = "bench command failed";
        return false;
    }
    // report.csv: variant,run,mse
    std::ifstream csv(dir / "out" / "report.csv");
    std::string line;
    std::getline(csv, line);  // header
    std::map<std::string, std::vector<double>> mse;
    while (std::getline(csv, line)) {
        std::istringstream ss(line);
        std::string variant, run, val;
        std::getline(ss, variant, ',');
        std::getline(ss, run, ',');
        std::getline(ss, val, ',');
        mse[variant].push_back(std::stod(val));
    }
    if (mse.size() != 4) {
        detail = "expected 4 variants in report.csv, got " + std::to_string(mse.size());
        return false;
    }
    std::map<std::string, double> mean;
    for (auto& [name, runs] : mse) {
        if (runs.size() != 10) {
            detail = name + " has " + std::to_string(runs.size()) + " runs, expected 10";
            return false;
        }
        double s = 0.0;
        for (double v : runs) s += v;
        mean[name] = s / runs.size();
        if (!std::isfinite(mean[name])) {
            detail = name + " mean is not finite";
            return false;
        }
    }
    std::string svg = read_file(dir / "out" / "fig4.svg");
    // 1 background rect + 4 bars; error bars are black line triples per variant
    bool svg_ok = count_substr(svg, "<rect ") == 5 &&
                  count_substr(svg, "stroke=\"black\"") >= 12 &&
                  svg.find(">original<") != std::string::npos &&
                  svg.find(">gan<") != std::string::npos;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "means m^2: original %.3f, knn %.3f, mice %.3f, gan %.3f (ratio gan/mice %.3f)",
                  mean["original"], mean["knn"], mean["mice"], mean["gan"],
                  mean["gan"] / mean["mice"]);
    detail = buf;
    if (!svg_ok) detail += "; fig4.svg missing bars or error bars";
    return mean["mice"] < mean["original"] && mean["knn"] < mean["original"] &&
           mean["gan"] <= 1.25 * mean["mice"] && svg_ok;
}

bool check_determinism(std::string& detail) {
    fs::path dir = fs::temp_directory_path() / "rfmap_accept_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    // trimmed budgets keep the double run quick; determinism is about bytes,
    // not model quality
    std::ofstream(dir / "config.json")
        << "{\"bench\":{\"runs\":2},\"gan\":{\"epochs\":20},\"localizer\":{\"epochs\":20}}\n";
    for (const char* out : {"a", "b"})
        if (run_cli("bench --config " + (dir / "config.json").string() + " --out " +
                    (dir / out).string()) != 0) {
            detail = "bench command failed";
            return false;
        }
    std::string a = read_file(dir / "a" / "report.csv");
    std::string b = read_file(dir / "b" / "report.csv");
    if (a.empty() || a != b) {
        detail = "report.csv differs between identical runs";
        return false;
    }
    detail = "two bench runs, byte-identical report.csv (" + std::to_string(a.size()) + " bytes)";
    return true;
}

bool check_divergence_fixtures(std::string& detail) {
    double kl = kl_divergence(Distribution::from_weights({0.5, 0.5}),
                              Distribution::from_weights({0.25, 0.75}));
    double js = js_divergence(Distribution::from_weights({1.0, 0.0}),
                              Distribution::from_weights({0.0, 1.0}));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "kl %.6f (want 0.1438), disjoint js %.6f (want ln 2)", kl, js);
    detail = buf;
    return std::abs(kl - 0.1438) < 1e-4 && std::abs(js - std::log(2.0)) < 1e-4;
}

bool check_error_reduction(std::string& detail) {
    double a = error_reduction(1.0, 0.0973);
    double b = error_reduction(1.0, 0.4681);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "headline reductions %.2f%% and %.2f%%", a, b);
    detail = buf;
    return std::abs(a - 90.27) < 0.01 && std::abs(b - 53.19) < 0.01;
}

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"interpolation-oracle-equivalence", 30.0, check_interpolation_oracles},
        {"dct-correctness", 10.0, check_dct},
        {"mice-recovery", 60.0, check_mice},
        {"gradient-checks", 30.0, check_gradients},
        {"gan-toy-benchmark", 300.0, check_gan_toy},
        {"end-to-end-benchmark-trend", 600.0, check_benchmark_trend},
        {"bench-determinism", 600.0, check_determinism},
        {"kl-js-fixtures", 10.0, check_divergence_fixtures},
        {"error-reduction-fixture", 10.0, check_error_reduction},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (elapsed > c.budget_s) {
            ok = false;
            detail += " [over budget]";
        }
        std::printf("%s - %-34s (%.1fs) %s\n", ok ? "PASS" : "FAIL", c.name, elapsed,
                    detail.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
