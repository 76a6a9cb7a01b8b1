// Command-line driver: run seeded optimization sweeps over N, emit figure data
// and per-state statistics, or verify an existing output directory.
//
// Exit codes: 0 success, 1 run failure, 2 verification failure, 64 bad usage.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locbasis/harness.hpp"
#include "locbasis/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"locbasis: phase-space localized bases of the truncated oscillator space"};

    std::string config_path;
    std::vector<int> n_values;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double beta = 0.0;
    bool beta_given = false;
    std::string out_dir;
    bool emit_profiles = false;
    bool do_verify = false;

    app.add_option("--config", config_path, "JSON experiment configuration file");
    app.add_option("--n", n_values, "basis sizes to sweep (overrides config)")->delimiter(',');
    app.add_option("--seed", seed, "experiment seed (overrides config)")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--beta", beta, "inverse temperature; enables the thermal stage")
        ->each([&](const std::string&) { beta_given = true; });
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_flag("--emit-profiles", emit_profiles, "write per-state position profiles");
    app.add_flag("--verify", do_verify, "verify the manifest in the output directory instead of sweeping");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        locbasis::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = locbasis::load_config(config_path);
        }
        if (!n_values.empty()) cfg.n_values = n_values;
        if (seed_given) cfg.seed = seed;
        if (beta_given) cfg.beta = beta;
        if (emit_profiles) cfg.emit_profiles = true;
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        if (do_verify) {
            const std::filesystem::path manifest_path =
                std::filesystem::path(cfg.output_dir) / "manifest.json";
            const locbasis::VerifyReport report = locbasis::verify(manifest_path);
            for (const locbasis::VerifyCheck& c : report.checks) {
                std::printf("%s %s [%s]\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
            }
            std::printf("%s: %zu checks\n", report.all_pass ? "verification passed" : "verification FAILED",
                        report.checks.size());
            return report.all_pass ? 0 : 2;
        }

        const locbasis::RunManifest manifest = locbasis::run_sweep(cfg);
        bool any_failed = false;
        for (const locbasis::RunRecord& r : manifest.runs) {
            if (r.ok) {
                std::printf("N=%d  S=%s  mean_variance=%s  avg_de2=%s  accepted=%llu  (%.1fs)\n", r.n,
                            locbasis::format_double(r.final_s).c_str(),
                            locbasis::format_double(r.mean_variance).c_str(),
                            locbasis::format_double(r.avg_de2).c_str(),
                            static_cast<unsigned long long>(r.accepted), r.wall_seconds);
            } else {
                any_failed = true;
                std::printf("N=%d  FAILED: %s\n", r.n, r.error.c_str());
            }
        }
        if (manifest.fig1_fit) {
            std::printf("fig1 fit: mean_variance = %s + %s ln(N), rms %s\n",
                        locbasis::format_double(manifest.fig1_fit->a).c_str(),
                        locbasis::format_double(manifest.fig1_fit->b).c_str(),
                        locbasis::format_double(manifest.fig1_fit->residual_rms).c_str());
        }
        if (manifest.fig2_fit) {
            std::printf("fig2 fit: avg_de2 = %s * N^%s, rms %s\n",
                        locbasis::format_double(manifest.fig2_fit->a).c_str(),
                        locbasis::format_double(manifest.fig2_fit->b).c_str(),
                        locbasis::format_double(manifest.fig2_fit->residual_rms).c_str());
        }
        std::printf("outputs in %s\n", cfg.output_dir.c_str());
        return any_failed ? 1 : 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
