// harness.hpp — experiment driver: sweep the basis optimization over a list of
// N values, persist every artifact, fit the size dependence of the variance
// and of the energy spread, and verify the whole output set from disk.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locbasis/analysis.hpp"
#include "locbasis/optimizer.hpp"

namespace locbasis {

struct ExperimentConfig {
    std::vector<int> n_values = {2, 4, 8, 16, 32, 64};
    std::uint64_t seed = 7;
    std::optional<double> beta;  // enables the thermal stage when set
    std::string output_dir = "out";
    bool emit_profiles = false;
    // Per-run settings; max_proposals == 0 selects the size-scaled default
    // budget min(32e6, max(1e6, 500'000 * N)).
    OptimizerConfig optimizer = default_sweep_optimizer();
    int workers = 0;  // 0 = hardware concurrency

    static OptimizerConfig default_sweep_optimizer() {
        OptimizerConfig cfg;
        cfg.max_proposals = 0;
        return cfg;
    }
};

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

// All randomness flows from the experiment seed through a per-N split, so
// adding or removing an N value leaves the other runs untouched.
std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t n);
std::uint64_t budget_for(const OptimizerConfig& cfg, int n);

struct RunRecord {
    int n = 0;
    std::uint64_t subseed = 0;
    bool ok = false;
    std::string error;

    double final_s = 0.0;
    double mean_variance = 0.0;
    double avg_de2 = 0.0;
    double tail_median_nu = 0.0;
    double tail_iqr = 0.0;
    int tail_fitted = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    double wall_seconds = 0.0;

    // thermal stage (present when the config carries beta)
    bool thermal = false;
    int bandwidth = 0;
    double spectrum_low = 0.0;
    double spectrum_high = 0.0;

    std::map<std::string, std::string> files;  // role -> path relative to output_dir
};

struct RunManifest {
    ExperimentConfig config;
    std::vector<RunRecord> runs;
    std::optional<FitResult> fig1_fit;  // mean variance = a + b ln N
    std::optional<FitResult> fig2_fit;  // avg dE^2 = a N^b
};

// Optimize, persist, and analyze every requested N. Failures of individual
// runs are recorded in the manifest without aborting the sweep; the manifest
// on disk is refreshed after every completed N.
RunManifest run_sweep(const ExperimentConfig& cfg);

void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

// fig1.csv / fig2.csv: gnuplot-ready data block plus fitted-curve block, fit
// coefficients echoed in '#' header comments. Throws when fits are absent.
void emit_figure_data(const RunManifest& manifest);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass = true;
};

// Reloads every artifact named by the manifest and replays the invariant
// suite: unitarity, trace identities, monotonicity, uncertainty floor, fit
// bands, and the thermal response checks when a thermal stage was run.
VerifyReport verify(const std::filesystem::path& manifest_path);

}  // namespace locbasis
