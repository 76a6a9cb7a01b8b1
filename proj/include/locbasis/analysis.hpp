// analysis.hpp — statistics of localized bases: energy spread, log / power-law
// curve fits, position-space profiles and their tail exponents, and the
// phase-space localization estimate for macroscopic parameters.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "locbasis/optimizer.hpp"

namespace locbasis {

// Per-state energy mean and variance, taken with the diagonal Hamiltonian:
// mean_e(n) = sum_j |U_{n,j}|^2 (j+1/2), de2(n) = <H^2>_n - mean_e(n)^2.
struct EnergyStats {
    Eigen::VectorXd mean_e;
    Eigen::VectorXd de2;
    double avg_de2 = 0.0;
};

EnergyStats energy_stats(const LocalizedBasis& basis);

// Least-squares fit result. For Model::Log, y = a + b ln N; for Model::Power,
// y = a N^b (fitted as a line in ln N / ln y). residual_rms is taken in the
// space the regression was solved in: y for Log, ln y for Power.
struct FitResult {
    enum class Model { Log, Power };
    Model model = Model::Log;
    double a = 0.0;
    double b = 0.0;
    double residual_rms = 0.0;
    int n_points = 0;
};

FitResult fit_log(const std::vector<std::pair<double, double>>& points);
FitResult fit_power(const std::vector<std::pair<double, double>>& points);

// |psi(x)|^2 for one localized state on a grid, with psi = sum_j U_{n,j} phi_j.
// Throws when the trapezoidal norm misses 1 by more than 1e-2 (grid too
// narrow or too coarse for this state).
Eigen::VectorXd position_profile(const LocalizedBasis& basis, int state, const Eigen::VectorXd& grid);

// All states at once; column n = |psi_n|^2 on the grid.
Eigen::MatrixXd position_profiles(const LocalizedBasis& basis, const Eigen::VectorXd& grid);

// Power-law fit |psi(x)| ~ A x^nu over a window, via log-log regression of
// sqrt(|psi|^2) against x.
struct TailFit {
    int state = -1;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double nu = 0.0;
    double amplitude = 0.0;
    double residual_rms = 0.0;
    int points_used = 0;
};

TailFit fit_tail(const Eigen::VectorXd& grid, const Eigen::VectorXd& profile, double x_lo, double x_hi);

// Tail fits for every state with the default window
// [max(3, first local minimum of |psi|^2 past <x>), 0.8 sqrt(2N)].
// States whose window collapses or holds fewer than 8 grid points are skipped.
struct TailSummary {
    std::vector<TailFit> fits;
    double median_nu = 0.0;
    double iqr = 0.0;
    int attempted = 0;
};

TailSummary tail_summary(const LocalizedBasis& basis, const Eigen::VectorXd& grid);

// Index of the state localized nearest the phase-space origin
// (smallest <x>^2 + <p>^2).
int central_state(const QuadratureMoments& moments);

// Phase-space cell count N = volume / (2 pi hbar) and the localized-state
// width sqrt(0.5 + 0.3 ln N) it implies.
struct LocalizationEstimate {
    double state_count = 0.0;
    double width = 0.0;
};

LocalizationEstimate localization_estimate(double phase_space_volume, double hbar);

// Average over states of the quadrature estimate of <x^4>; diagnostic for the
// near-linear growth of the quartic moment with N.
double mean_x4_by_quadrature(const LocalizedBasis& basis, const Eigen::VectorXd& grid);

// Trapezoidal quadrature over a (not necessarily uniform) grid.
double trapezoid(const Eigen::VectorXd& grid, const Eigen::VectorXd& values);

// Interpolated quantile of a copy of the data (q in [0, 1]).
double quantile(std::vector<double> values, double q);

}  // namespace locbasis
