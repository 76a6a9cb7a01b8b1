#include "locbasis/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "locbasis/io.hpp"
#include "locbasis/thermal.hpp"

namespace locbasis {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::string run_suffix(int n) {
    return "_n" + std::to_string(n);
}

json optimizer_to_json(const OptimizerConfig& cfg) {
    return json{{"max_proposals", cfg.max_proposals},
                {"saturation_window", cfg.saturation_window},
                {"min_delta", cfg.min_delta},
                {"renorm_interval", cfg.renorm_interval},
                {"theta_max", cfg.theta_max},
                {"window_rel_tol", cfg.window_rel_tol}};
}

OptimizerConfig optimizer_from_json(const json& j) {
    OptimizerConfig cfg;
    cfg.max_proposals = j.value("max_proposals", cfg.max_proposals);
    cfg.saturation_window = j.value("saturation_window", cfg.saturation_window);
    cfg.min_delta = j.value("min_delta", cfg.min_delta);
    cfg.renorm_interval = j.value("renorm_interval", cfg.renorm_interval);
    cfg.theta_max = j.value("theta_max", cfg.theta_max);
    cfg.window_rel_tol = j.value("window_rel_tol", cfg.window_rel_tol);
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j{{"n_values", cfg.n_values},
           {"seed", cfg.seed},
           {"output_dir", cfg.output_dir},
           {"emit_profiles", cfg.emit_profiles},
           {"workers", cfg.workers},
           {"optimizer", optimizer_to_json(cfg.optimizer)}};
    if (cfg.beta) {
        j["beta"] = *cfg.beta;
    } else {
        j["beta"] = nullptr;
    }
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.n_values = j.value("n_values", cfg.n_values);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.emit_profiles = j.value("emit_profiles", cfg.emit_profiles);
    cfg.workers = j.value("workers", cfg.workers);
    if (j.contains("optimizer")) {
        cfg.optimizer = optimizer_from_json(j.at("optimizer"));
    }
    if (j.contains("beta") && !j.at("beta").is_null()) {
        cfg.beta = j.at("beta").get<double>();
    }
    for (int n : cfg.n_values) {
        if (n < 1) throw std::invalid_argument("config: every n value must be >= 1");
    }
    if (cfg.n_values.empty()) throw std::invalid_argument("config: n_values must be nonempty");
    return cfg;
}

json fit_to_json(const FitResult& fit) {
    return json{{"model", fit.model == FitResult::Model::Log ? "log" : "power"},
                {"a", fit.a},
                {"b", fit.b},
                {"residual_rms", fit.residual_rms},
                {"n_points", fit.n_points}};
}

FitResult fit_from_json(const json& j) {
    FitResult fit;
    fit.model = j.at("model") == "log" ? FitResult::Model::Log : FitResult::Model::Power;
    fit.a = j.at("a");
    fit.b = j.at("b");
    fit.residual_rms = j.at("residual_rms");
    fit.n_points = j.at("n_points");
    return fit;
}

json record_to_json(const RunRecord& r) {
    json j{{"n", r.n},
           {"subseed", r.subseed},
           {"ok", r.ok},
           {"error", r.error},
           {"final_s", r.final_s},
           {"mean_variance", r.mean_variance},
           {"avg_de2", r.avg_de2},
           {"tail_fitted", r.tail_fitted},
           {"accepted", r.accepted},
           {"rejected", r.rejected},
           {"wall_seconds", r.wall_seconds},
           {"thermal", r.thermal},
           {"files", r.files}};
    if (r.tail_fitted > 0) {
        j["tail_median_nu"] = r.tail_median_nu;
        j["tail_iqr"] = r.tail_iqr;
    } else {
        j["tail_median_nu"] = nullptr;
        j["tail_iqr"] = nullptr;
    }
    if (r.thermal) {
        j["bandwidth"] = r.bandwidth;
        j["spectrum_low"] = r.spectrum_low;
        j["spectrum_high"] = r.spectrum_high;
    }
    return j;
}

RunRecord record_from_json(const json& j) {
    RunRecord r;
    r.n = j.at("n");
    r.subseed = j.at("subseed");
    r.ok = j.at("ok");
    r.error = j.at("error");
    r.final_s = j.at("final_s");
    r.mean_variance = j.at("mean_variance");
    r.avg_de2 = j.at("avg_de2");
    r.tail_fitted = j.at("tail_fitted");
    if (!j.at("tail_median_nu").is_null()) {
        r.tail_median_nu = j.at("tail_median_nu");
        r.tail_iqr = j.at("tail_iqr");
    }
    r.accepted = j.at("accepted");
    r.rejected = j.at("rejected");
    r.wall_seconds = j.at("wall_seconds");
    r.thermal = j.at("thermal");
    if (r.thermal) {
        r.bandwidth = j.at("bandwidth");
        r.spectrum_low = j.at("spectrum_low");
        r.spectrum_high = j.at("spectrum_high");
    }
    r.files = j.at("files").get<std::map<std::string, std::string>>();
    return r;
}

// Keep at most `cap` history samples, always including the first and last.
json thin_history(const std::vector<std::pair<std::uint64_t, double>>& history, std::size_t cap) {
    json out = json::array();
    if (history.empty()) return out;
    const std::size_t stride = std::max<std::size_t>(1, history.size() / cap);
    for (std::size_t i = 0; i < history.size(); i += stride) {
        out.push_back(json::array({history[i].first, history[i].second}));
    }
    const auto& last = history.back();
    if (out.back()[0] != last.first) {
        out.push_back(json::array({last.first, last.second}));
    }
    return out;
}

struct CsvBuilder {
    std::string text;

    void comment(const std::string& line) { text += "# " + line + "\n"; }
    void row(const std::vector<std::string>& cells, char sep) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text += sep;
            text += cells[i];
        }
        text += "\n";
    }
};

void write_states_csv(const fs::path& path, int n, const QuadratureMoments& mom,
                      const EnergyStats& stats, const TailSummary& tails) {
    std::vector<double> nu(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> tail_points(n, 0);
    for (const TailFit& fit : tails.fits) {
        nu[fit.state] = fit.nu;
        tail_points[fit.state] = fit.points_used;
    }
    CsvBuilder csv;
    csv.comment("per-state statistics, N=" + std::to_string(n) + " (units: hbar = omega = m = 1)");
    csv.row({"state", "mean_x", "mean_p", "dx2", "dp2", "mean_e", "de2", "tail_nu", "tail_points"}, ',');
    for (int s = 0; s < n; ++s) {
        csv.row({std::to_string(s), format_double(mom.mean_x(s)), format_double(mom.mean_p(s)),
                 format_double(mom.dx2(s)), format_double(mom.dp2(s)), format_double(stats.mean_e(s)),
                 format_double(stats.de2(s)), format_double(nu[s]), std::to_string(tail_points[s])},
                ',');
    }
    write_text_file(path, csv.text);
}

void write_profiles_csv(const fs::path& path, int n, const Eigen::VectorXd& grid,
                        const Eigen::MatrixXd& profiles) {
    CsvBuilder csv;
    csv.comment("position profiles |psi_n(x)|^2, N=" + std::to_string(n) +
                " (units: hbar = omega = m = 1)");
    std::vector<std::string> header{"x"};
    for (int s = 0; s < n; ++s) header.push_back("state" + std::to_string(s));
    csv.row(header, ',');
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        std::vector<std::string> cells{format_double(grid(i))};
        for (int s = 0; s < n; ++s) cells.push_back(format_double(profiles(i, s)));
        csv.row(cells, ',');
    }
    write_text_file(path, csv.text);
}

RunRecord execute_run(const ExperimentConfig& cfg, int n) {
    RunRecord record;
    record.n = n;
    record.subseed = derive_subseed(cfg.seed, std::uint64_t(n));

    const fs::path out_dir = cfg.output_dir;
    const std::string suffix = run_suffix(n);

    OptimizerConfig ocfg = cfg.optimizer;
    ocfg.seed = record.subseed;
    ocfg.max_proposals = budget_for(cfg.optimizer, n);

    const TruncatedSpace space = build_space(n);
    const QuadratureMatrices quads = build_quadratures(space);

    const auto t0 = std::chrono::steady_clock::now();
    OptimizeResult result = run(init_identity(space), ocfg, quads);
    record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    record.final_s = result.trace.final_s;
    record.accepted = result.trace.accepted;
    record.rejected = result.trace.rejected;

    const std::string basis_file = "basis" + suffix + ".lbmx";
    save_basis(out_dir / basis_file, result.basis, ocfg, result.trace.final_s);
    record.files["basis"] = basis_file;

    json trace_json{{"n", n},
                    {"subseed", record.subseed},
                    {"accepted", result.trace.accepted},
                    {"rejected", result.trace.rejected},
                    {"final_s", result.trace.final_s},
                    {"stop_reason", result.trace.stop_reason},
                    {"min_delta", ocfg.min_delta},
                    {"s_history", thin_history(result.trace.s_history, 2048)}};
    const std::string trace_file = "trace" + suffix + ".json";
    write_text_file(out_dir / trace_file, trace_json.dump(2) + "\n");
    record.files["trace"] = trace_file;

    record.mean_variance = mean_variance(result.basis, quads);
    const QuadratureMoments mom = compute_moments(result.basis, quads);
    const EnergyStats stats = energy_stats(result.basis);
    record.avg_de2 = stats.avg_de2;

    const Eigen::VectorXd grid = default_grid(space);
    const TailSummary tails = tail_summary(result.basis, grid);
    record.tail_fitted = static_cast<int>(tails.fits.size());
    record.tail_median_nu = tails.median_nu;
    record.tail_iqr = tails.iqr;

    const std::string states_file = "states" + suffix + ".csv";
    write_states_csv(out_dir / states_file, n, mom, stats, tails);
    record.files["states"] = states_file;

    json stats_json{{"n", n},
                    {"mean_variance", record.mean_variance},
                    {"avg_de2", record.avg_de2},
                    {"tail_fitted", record.tail_fitted},
                    {"mean_e", std::vector<double>(stats.mean_e.data(), stats.mean_e.data() + n)},
                    {"de2", std::vector<double>(stats.de2.data(), stats.de2.data() + n)},
                    {"dx2", std::vector<double>(mom.dx2.data(), mom.dx2.data() + n)},
                    {"dp2", std::vector<double>(mom.dp2.data(), mom.dp2.data() + n)}};
    if (record.tail_fitted > 0) {
        stats_json["tail_median_nu"] = tails.median_nu;
        stats_json["tail_iqr"] = tails.iqr;
    }
    const std::string stats_file = "stats" + suffix + ".json";
    write_text_file(out_dir / stats_file, stats_json.dump(2) + "\n");
    record.files["stats"] = stats_file;

    if (cfg.emit_profiles) {
        const Eigen::MatrixXd profiles = position_profiles(result.basis, grid);
        const std::string profiles_file = "profiles" + suffix + ".csv";
        write_profiles_csv(out_dir / profiles_file, n, grid, profiles);
        record.files["profiles"] = profiles_file;
    }

    if (cfg.beta) {
        const ThermalEnsemble ens = build_ensemble(result.basis, *cfg.beta);
        const BandProfile band = band_profile(ens);
        record.thermal = true;
        record.bandwidth = band.effective_bandwidth;

        MatrixFileInfo rho_info;
        rho_info.kind = MatrixKind::Density;
        rho_info.seed = record.subseed;
        const std::string rho_file = "rho" + suffix + ".lbmx";
        save_complex_matrix(out_dir / rho_file, ens.rho, rho_info);
        record.files["rho"] = rho_file;

        CsvBuilder band_csv;
        band_csv.comment("band weights w_d = sum_{|j-k|=d} |rho_jk|^2, N=" + std::to_string(n) +
                         ", beta=" + format_double(*cfg.beta));
        band_csv.row({"d", "w_d"}, ',');
        for (Eigen::Index d = 0; d < band.band_weight.size(); ++d) {
            band_csv.row({std::to_string(d), format_double(band.band_weight(d))}, ',');
        }
        const std::string band_file = "band" + suffix + ".csv";
        write_text_file(out_dir / band_file, band_csv.text);
        record.files["band"] = band_file;

        const ResponseSeries series = response(ens, default_perturbation(quads),
                                               uniform_times(2.0 * M_PI, 1024), "0.1 * x");
        const SpectralQuartiles quartiles = spectral_quartiles(series.spectrum);
        record.spectrum_low = quartiles.low;
        record.spectrum_high = quartiles.high;

        CsvBuilder resp_csv;
        resp_csv.comment("linear response delta<H0>(t), perturbation " + series.perturbation +
                         ", N=" + std::to_string(n) + ", beta=" + format_double(*cfg.beta));
        resp_csv.row({"t", "delta_h0"}, ',');
        for (Eigen::Index i = 0; i < series.times.size(); ++i) {
            resp_csv.row({format_double(series.times(i)), format_double(series.values(i))}, ',');
        }
        const std::string resp_file = "response" + suffix + ".csv";
        write_text_file(out_dir / resp_file, resp_csv.text);
        record.files["response"] = resp_file;

        CsvBuilder spec_csv;
        spec_csv.comment("response spectrum (one-sided DFT magnitudes), N=" + std::to_string(n) +
                         ", beta=" + format_double(*cfg.beta));
        spec_csv.row({"freq_index", "magnitude"}, ',');
        for (Eigen::Index m = 0; m < series.spectrum.size(); ++m) {
            spec_csv.row({std::to_string(m), format_double(series.spectrum(m))}, ',');
        }
        const std::string spec_file = "spectrum" + suffix + ".csv";
        write_text_file(out_dir / spec_file, spec_csv.text);
        record.files["spectrum"] = spec_file;
    }

    record.ok = true;
    return record;
}

}  // namespace

ExperimentConfig load_config(const fs::path& path) {
    return config_from_json(json::parse(read_text_file(path)));
}

void save_config(const ExperimentConfig& cfg, const fs::path& path) {
    write_text_file(path, config_to_json(cfg).dump(2) + "\n");
}

std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t n) {
    return splitmix64(splitmix64(seed) ^ (0x9E3779B97F4A7C15ull * n + 1ull));
}

std::uint64_t budget_for(const OptimizerConfig& cfg, int n) {
    if (cfg.max_proposals > 0) return cfg.max_proposals;
    const std::uint64_t scaled = 500'000ull * std::uint64_t(n);
    return std::min<std::uint64_t>(32'000'000ull, std::max<std::uint64_t>(1'000'000ull, scaled));
}

RunManifest run_sweep(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);

    RunManifest manifest;
    manifest.config = cfg;
    manifest.runs.resize(cfg.n_values.size());
    for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
        manifest.runs[i].n = cfg.n_values[i];
        manifest.runs[i].error = "pending";
    }

    const fs::path manifest_path = fs::path(cfg.output_dir) / "manifest.json";
    std::mutex mu;
    std::atomic<std::size_t> next{0};

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        std::min<std::size_t>(cfg.workers > 0 ? unsigned(cfg.workers) : hw, cfg.n_values.size());

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.n_values.size()) break;
            RunRecord record;
            try {
                record = execute_run(cfg, cfg.n_values[i]);
            } catch (const std::exception& e) {
                record = RunRecord{};
                record.n = cfg.n_values[i];
                record.subseed = derive_subseed(cfg.seed, std::uint64_t(cfg.n_values[i]));
                record.ok = false;
                record.error = e.what();
            }
            std::lock_guard<std::mutex> lock(mu);
            manifest.runs[i] = record;
            save_manifest(manifest, manifest_path);
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Size-dependence fits over the completed runs. The energy-variance power
    // law is asymptotic: the exact optima at tiny N (avg dE^2 = 1/4 at N=2)
    // sit well below it and would steepen an unweighted global fit, so the
    // power fit uses N >= 8 and falls back to all points for small sweeps.
    std::vector<std::pair<double, double>> var_points, de2_points, de2_asymptotic;
    for (const RunRecord& r : manifest.runs) {
        if (!r.ok) continue;
        var_points.emplace_back(double(r.n), r.mean_variance);
        if (r.avg_de2 > 0.0) {
            de2_points.emplace_back(double(r.n), r.avg_de2);
            if (r.n >= 8) de2_asymptotic.emplace_back(double(r.n), r.avg_de2);
        }
    }
    if (var_points.size() >= 3) {
        try {
            manifest.fig1_fit = fit_log(var_points);
        } catch (const std::invalid_argument&) {
        }
    }
    const auto& power_points = de2_asymptotic.size() >= 3 ? de2_asymptotic : de2_points;
    if (power_points.size() >= 3) {
        try {
            manifest.fig2_fit = fit_power(power_points);
        } catch (const std::invalid_argument&) {
        }
    }

    save_manifest(manifest, manifest_path);
    if (manifest.fig1_fit && manifest.fig2_fit) {
        emit_figure_data(manifest);
    }
    return manifest;
}

void save_manifest(const RunManifest& manifest, const fs::path& path) {
    json runs = json::array();
    for (const RunRecord& r : manifest.runs) runs.push_back(record_to_json(r));
    json j{{"format", 1}, {"config", config_to_json(manifest.config)}, {"runs", runs}};
    j["fits"] = json::object();
    j["fits"]["fig1"] = manifest.fig1_fit ? fit_to_json(*manifest.fig1_fit) : json(nullptr);
    j["fits"]["fig2"] = manifest.fig2_fit ? fit_to_json(*manifest.fig2_fit) : json(nullptr);
    write_text_file(path, j.dump(2) + "\n");
}

RunManifest load_manifest(const fs::path& path) {
    const json j = json::parse(read_text_file(path));
    RunManifest manifest;
    manifest.config = config_from_json(j.at("config"));
    for (const json& r : j.at("runs")) manifest.runs.push_back(record_from_json(r));
    if (j.contains("fits")) {
        if (!j.at("fits").at("fig1").is_null()) manifest.fig1_fit = fit_from_json(j.at("fits").at("fig1"));
        if (!j.at("fits").at("fig2").is_null()) manifest.fig2_fit = fit_from_json(j.at("fits").at("fig2"));
    }
    return manifest;
}

void emit_figure_data(const RunManifest& manifest) {
    if (!manifest.fig1_fit || !manifest.fig2_fit) {
        throw std::runtime_error("emit_figure_data: fits are absent (need at least 3 completed N values)");
    }
    const fs::path out_dir = manifest.config.output_dir;

    auto fmt4 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return std::string(buf);
    };

    auto write_fig = [&](const fs::path& path, const std::string& title, const std::string& model,
                         const FitResult& fit, auto value_of, auto curve_of) {
        std::string text;
        text += "# " + title + "\n";
        text += "# units: hbar = omega = m = 1 (all quantities dimensionless)\n";
        text += "# model: " + model + "\n";
        text += "# a = " + fmt4(fit.a) + "  b = " + fmt4(fit.b) +
                "  residual_rms = " + fmt4(fit.residual_rms) + "\n";
        text += "# columns: N  value\n";
        double n_min = 0.0, n_max = 0.0;
        bool first = true;
        for (const RunRecord& r : manifest.runs) {
            if (!r.ok) continue;
            text += std::to_string(r.n) + " " + format_double(value_of(r)) + "\n";
            n_min = first ? r.n : std::min(n_min, double(r.n));
            n_max = first ? r.n : std::max(n_max, double(r.n));
            first = false;
        }
        text += "\n\n";
        text += "# fitted curve samples: N  model(N)\n";
        const int samples = 64;
        for (int i = 0; i < samples; ++i) {
            const double ln_n = std::log(n_min) + (std::log(n_max) - std::log(n_min)) * i / (samples - 1);
            const double n = std::exp(ln_n);
            text += format_double(n) + " " + format_double(curve_of(fit, n)) + "\n";
        }
        write_text_file(path, text);
    };

    write_fig(out_dir / "fig1.csv", "fig1: mean of (dx^2 + dp^2) over basis states versus N",
              "mean_variance = a + b*ln(N)", *manifest.fig1_fit,
              [](const RunRecord& r) { return r.mean_variance; },
              [](const FitResult& f, double n) { return f.a + f.b * std::log(n); });
    write_fig(out_dir / "fig2.csv", "fig2: average dE^2 over basis states versus N",
              "avg_de2 = a*N^b", *manifest.fig2_fit,
              [](const RunRecord& r) { return r.avg_de2; },
              [](const FitResult& f, double n) { return f.a * std::pow(n, f.b); });
}

VerifyReport verify(const fs::path& manifest_path) {
    const RunManifest manifest = load_manifest(manifest_path);
    const fs::path out_dir = manifest_path.parent_path();

    VerifyReport report;
    auto check = [&](const std::string& name, bool pass, const std::string& detail) {
        report.checks.push_back({name, pass, detail});
        if (!pass) report.all_pass = false;
    };

    for (const RunRecord& r : manifest.runs) {
        const std::string tag = " (N=" + std::to_string(r.n) + ")";
        if (!r.ok) {
            check("run completed" + tag, false, r.error);
            continue;
        }
        try {
            const LocalizedBasis basis = load_basis(out_dir / r.files.at("basis"));
            const QuadratureMatrices quads = build_quadratures(basis.space);
            const int n = basis.dim();

            const double residual = unitarity_residual(basis.coeffs);
            check("unitarity residual < 1e-10" + tag, residual < 1e-10, format_double(residual));

            const QuadratureMoments mom = compute_moments(basis, quads);
            const double trace_sum = (mom.mean_x2 + mom.mean_p2).sum();
            const double trace_err = std::abs(trace_sum - double(n) * double(n));
            check("trace identity sum(x^2+p^2) = N^2 within 1e-8" + tag, trace_err <= 1e-8,
                  format_double(trace_err));

            double min_product = std::numeric_limits<double>::infinity();
            for (int s = 0; s < n; ++s) {
                min_product = std::min(min_product, mom.dx2(s) * mom.dp2(s));
            }
            check("uncertainty floor dx2*dp2 >= 1/4 - 1e-9" + tag, min_product >= 0.25 - 1e-9,
                  format_double(min_product));

            const EnergyStats stats = energy_stats(basis);
            const double energy_err = std::abs(stats.mean_e.sum() - 0.5 * double(n) * double(n));
            check("energy trace sum <H> = N^2/2 within 1e-9" + tag, energy_err <= 1e-9,
                  format_double(energy_err));

            const double mv = mean_variance(basis, quads);
            check("manifest mean variance matches recompute" + tag,
                  std::abs(mv - r.mean_variance) <= 1e-9, format_double(mv - r.mean_variance));

            const json trace = json::parse(read_text_file(out_dir / r.files.at("trace")));
            bool monotone = true;
            double prev = -std::numeric_limits<double>::infinity();
            for (const json& sample : trace.at("s_history")) {
                const double s = sample.at(1);
                if (!(s > prev)) {
                    monotone = false;
                    break;
                }
                prev = s;
            }
            check("S history strictly increasing" + tag, monotone,
                  std::to_string(trace.at("s_history").size()) + " samples");
        } catch (const std::exception& e) {
            check("artifacts readable" + tag, false, e.what());
        }
    }

    if (manifest.fig1_fit) {
        const FitResult& fit = *manifest.fig1_fit;
        check("fig1 slope b in [0.45, 0.75]", fit.b >= 0.45 && fit.b <= 0.75, format_double(fit.b));
        check("fig1 intercept a in [0.7, 1.3]", fit.a >= 0.7 && fit.a <= 1.3, format_double(fit.a));
        check("fig1 residual rms < 0.15", fit.residual_rms < 0.15, format_double(fit.residual_rms));
    }
    if (manifest.fig2_fit) {
        const FitResult& fit = *manifest.fig2_fit;
        check("fig2 exponent in [1.0, 1.5]", fit.b >= 1.0 && fit.b <= 1.5, format_double(fit.b));
    }
    // At-least-linear growth of the energy spread, factor-2 slack, over
    // doubling pairs with the larger member at N >= 8.
    for (const RunRecord& r : manifest.runs) {
        if (!r.ok || r.n < 8) continue;
        for (const RunRecord& half : manifest.runs) {
            if (!half.ok || half.n * 2 != r.n) continue;
            check("avg_de2(" + std::to_string(r.n) + ") >= avg_de2(" + std::to_string(half.n) + ")",
                  r.avg_de2 >= half.avg_de2,
                  format_double(r.avg_de2) + " vs " + format_double(half.avg_de2));
        }
    }

    if (manifest.config.beta) {
        const double beta = *manifest.config.beta;
        int n_largest = 0;
        for (const RunRecord& r : manifest.runs) {
            if (r.ok && r.thermal) n_largest = std::max(n_largest, r.n);
        }
        if (n_largest >= 2) {
            const TruncatedSpace space = build_space(n_largest);
            const QuadratureMatrices quads = build_quadratures(space);
            const ThermalEnsemble canonical = canonical_ensemble(space, beta);
            const ResponseSeries null_series =
                response(canonical, default_perturbation(quads), uniform_times(2.0 * M_PI, 1024));
            check("canonical (diagonal) rho gives null response < 1e-12",
                  null_series.values.cwiseAbs().maxCoeff() < 1e-12,
                  format_double(null_series.values.cwiseAbs().maxCoeff()));
        }
        for (const RunRecord& r : manifest.runs) {
            if (!r.ok || !r.thermal || r.n < 2) continue;
            const std::string tag = " (N=" + std::to_string(r.n) + ")";
            try {
                const LocalizedBasis basis = load_basis(out_dir / r.files.at("basis"));
                const QuadratureMatrices quads = build_quadratures(basis.space);
                const ThermalEnsemble ens = build_ensemble(basis, beta);
                const ResponseSeries series =
                    response(ens, default_perturbation(quads), uniform_times(2.0 * M_PI, 1024));
                const SpectralQuartiles q = spectral_quartiles(series.spectrum);
                check("low-frequency quartile outweighs high" + tag, q.low > q.high,
                      format_double(q.low) + " vs " + format_double(q.high));
                check("response at t=0 vanishes" + tag, std::abs(series.values(0)) < 1e-14,
                      format_double(series.values(0)));
                Eigen::VectorXd period_times(2);
                period_times << 0.0, 2.0 * M_PI;
                const ResponseSeries period =
                    response(ens, default_perturbation(quads), period_times);
                check("response periodic at t=2pi" + tag,
                      std::abs(period.values(1) - period.values(0)) < 1e-10,
                      format_double(period.values(1) - period.values(0)));
            } catch (const std::exception& e) {
                check("thermal artifacts readable" + tag, false, e.what());
            }
        }
    }

    return report;
}

}  // namespace locbasis
