// io.hpp — persistence: the binary complex-matrix container used for bases and
// density matrices, plus deterministic text output helpers.
//
// File layout (all integers and floats little-endian):
//   magic "LBMX" | u32 version | u32 kind | u64 rows | u64 cols | u64 seed
//   | f64 final_s | u64 max_proposals | u64 saturation_window
//   | u64 renorm_interval | f64 min_delta | f64 theta_max | f64 window_rel_tol
//   | rows*cols complex entries as (re f64, im f64), row-major.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "locbasis/optimizer.hpp"

namespace locbasis {

enum class MatrixKind : std::uint32_t {
    Basis = 0,
    Density = 1,
    Generic = 2,
};

struct MatrixFileInfo {
    std::uint32_t version = 1;
    MatrixKind kind = MatrixKind::Generic;
    std::uint64_t seed = 0;
    double final_s = 0.0;
    OptimizerConfig config{};
};

void save_complex_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m,
                         const MatrixFileInfo& info);
Eigen::MatrixXcd load_complex_matrix(const std::filesystem::path& path, MatrixFileInfo* info = nullptr);

void save_basis(const std::filesystem::path& path, const LocalizedBasis& basis,
                const OptimizerConfig& cfg, double final_s);
LocalizedBasis load_basis(const std::filesystem::path& path, MatrixFileInfo* info = nullptr);

// Writes via a temporary file and rename, so a crash never leaves a torn file.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// Shortest round-trippable decimal form ("%.17g" would be noisy; 12 digits is
// stable and deterministic across runs).
std::string format_double(double v);

}  // namespace locbasis
