// optimizer.hpp — stochastic search for phase-space-localized orthonormal bases.
//
// Starting from the oscillator eigenstates, random two-row unitary blocks are
// proposed and kept exactly when they increase the localization objective
//   S = sum_n <n~|x|n~>^2 + <n~|p|n~>^2,
// which is equivalent to minimizing the summed variances because
// sum_n (<x^2> + <p^2>)_n = N^2 for every unitary basis of the truncated space.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "locbasis/oscillator.hpp"

namespace locbasis {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Orthonormal basis of the truncated space. Row n of coeffs holds the
// expansion coefficients U_{n,j} of localized state n over oscillator levels.
struct LocalizedBasis {
    TruncatedSpace space;
    Eigen::MatrixXcd coeffs;

    int dim() const { return space.dim; }
};

// Identity transformation: the basis states are the oscillator eigenstates.
LocalizedBasis init_identity(const TruncatedSpace& space);

// A unitary acting on rows (row_a, row_b) only, through the three-angle block
//   [  e^{i alpha} cos theta    e^{i beta} sin theta  ]
//   [ -e^{-i beta} sin theta    e^{-i alpha} cos theta ].
struct RotationProposal {
    int row_a = 0;
    int row_b = 1;
    double theta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    Eigen::Matrix2cd block() const;
};

struct OptimizerConfig {
    std::uint64_t seed = 1;
    std::uint64_t max_proposals = 50'000'000;
    // Stop after this many consecutive rejections; 0 selects 5000 * N.
    std::uint64_t saturation_window = 0;
    // Smallest improvement counted as acceptance (strict inequality).
    double min_delta = 0.0;
    // Accepted steps between row re-orthonormalizations.
    std::uint64_t renorm_interval = 10'000;
    // Proposal angle range for theta; full range by default. Shrinking it
    // gives small-step proposals for late-stage refinement.
    double theta_max = kTwoPi;
    // Also stop when the relative gain in S over one saturation window of
    // proposals falls below this.
    double window_rel_tol = 1e-9;
};

struct OptimizationTrace {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    // (proposal index, S after acceptance) samples; non-decreasing in S.
    std::vector<std::pair<std::uint64_t, double>> s_history;
    double final_s = 0.0;
    std::string stop_reason;
};

// Deterministic uniform source. Draws come straight from mt19937_64 so the
// proposal stream is identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

    // Uniform on {0, ..., bound-1} via bit-mask rejection (no modulo bias).
    std::uint64_t uniform_index(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

// Random pair of distinct rows (uniform over unordered pairs) and three
// uniform angles; theta is drawn on [0, theta_max), alpha and beta on [0, 2pi).
RotationProposal propose(Rng& rng, int dim);
RotationProposal propose(Rng& rng, int dim, double theta_max);

// Per-state first and second quadrature moments, evaluated with the exact
// x^2 / p^2 matrix elements.
struct QuadratureMoments {
    Eigen::VectorXd mean_x, mean_p, mean_x2, mean_p2, dx2, dp2;
};

QuadratureMoments compute_moments(const LocalizedBasis& basis, const QuadratureMatrices& quads);

// S = sum_n <x>_n^2 + <p>_n^2. Throws if the means carry imaginary residue
// above 1e-9 (a corrupted, non-Hermitian evaluation).
double objective_s(const LocalizedBasis& basis, const QuadratureMatrices& quads);

// Mean of (dx^2 + dp^2) over the basis states, computed as (N^2 - S)/N and
// cross-checked against the direct per-state sum. Throws if the two routes
// disagree beyond 1e-6 (which would signal broken x^2/p^2 matrices).
double mean_variance(const LocalizedBasis& basis, const QuadratureMatrices& quads);

// Cached per-row ladder data for O(N) proposal evaluation. Row n of a_rows
// holds (a u_n) where a is the lowering operator; a_mean(n) = <n~|a|n~>.
// S relates to the cache through S = 2 sum_n |a_mean(n)|^2.
struct MomentCache {
    Eigen::MatrixXcd a_rows;
    Eigen::VectorXcd a_mean;
    double s = 0.0;
};

MomentCache build_cache(const LocalizedBasis& basis);

// S(after) - S(before) for a proposal, in O(N) work from the cache.
double delta_s(const LocalizedBasis& basis, const RotationProposal& prop, const MomentCache& cache);

// Returns the basis with rows (row_a, row_b) replaced by the block mix.
LocalizedBasis apply_rotation(const LocalizedBasis& basis, const RotationProposal& prop);

struct OptimizeResult {
    LocalizedBasis basis;
    OptimizationTrace trace;
};

// Greedy Monte-Carlo search: propose, keep iff delta S > min_delta, stop at
// max_proposals, after saturation_window consecutive rejections, or when the
// window-relative improvement drops below window_rel_tol. Rows are
// re-orthonormalized every renorm_interval accepted steps and at exit;
// the final unitarity residual is below 1e-10.
OptimizeResult run(LocalizedBasis basis, const OptimizerConfig& cfg, const QuadratureMatrices& quads);

// Modified Gram-Schmidt over rows, in place.
void orthonormalize_rows(Eigen::MatrixXcd& m);

// max |(U U† - I)_{jk}|
double unitarity_residual(const Eigen::MatrixXcd& m);

}  // namespace locbasis
