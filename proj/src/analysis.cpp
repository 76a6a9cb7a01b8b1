#include "locbasis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace locbasis {

namespace {

// Shared core of the two fits: least squares of y against t.
struct LineFit {
    double intercept, slope, residual_rms;
};

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= double(n);
    my /= double(n);
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
    }
    if (stt <= 0.0) {
        throw std::invalid_argument("fit: all abscissae coincide (rank-deficient)");
    }
    LineFit fit;
    fit.slope = sty / stt;
    fit.intercept = my - fit.slope * mt;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * t[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / double(n));
    return fit;
}

}  // namespace

EnergyStats energy_stats(const LocalizedBasis& basis) {
    const int n = basis.dim();
    EnergyStats stats;
    stats.mean_e.resize(n);
    stats.de2.resize(n);
    for (int s = 0; s < n; ++s) {
        double e1 = 0.0, e2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = std::norm(basis.coeffs(s, j));
            const double ej = basis.space.energies(j);
            e1 += w * ej;
            e2 += w * ej * ej;
        }
        stats.mean_e(s) = e1;
        stats.de2(s) = e2 - e1 * e1;
    }
    stats.avg_de2 = stats.de2.mean();
    return stats;
}

FitResult fit_log(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) {
        throw std::invalid_argument("fit_log: need at least 3 points");
    }
    std::vector<double> t, y;
    for (const auto& [n, v] : points) {
        if (n < 1.0) throw std::invalid_argument("fit_log: N values must be >= 1");
        if (!std::isfinite(v)) throw std::invalid_argument("fit_log: non-finite y value");
        t.push_back(std::log(n));
        y.push_back(v);
    }
    const LineFit line = fit_line(t, y);
    FitResult out;
    out.model = FitResult::Model::Log;
    out.a = line.intercept;
    out.b = line.slope;
    out.residual_rms = line.residual_rms;
    out.n_points = static_cast<int>(points.size());
    return out;
}

FitResult fit_power(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) {
        throw std::invalid_argument("fit_power: need at least 3 points");
    }
    std::vector<double> t, z;
    for (const auto& [n, v] : points) {
        if (n < 1.0) throw std::invalid_argument("fit_power: N values must be >= 1");
        if (!(v > 0.0)) throw std::invalid_argument("fit_power: y values must be positive");
        t.push_back(std::log(n));
        z.push_back(std::log(v));
    }
    const LineFit line = fit_line(t, z);
    FitResult out;
    out.model = FitResult::Model::Power;
    out.a = std::exp(line.intercept);
    out.b = line.slope;
    out.residual_rms = line.residual_rms;
    out.n_points = static_cast<int>(points.size());
    return out;
}

Eigen::MatrixXd position_profiles(const LocalizedBasis& basis, const Eigen::VectorXd& grid) {
    const Eigen::MatrixXd phi = eval_eigenfunctions(basis.space, grid);
    // psi_n on the grid: phi (m x N) times the state's coefficient column.
    const Eigen::MatrixXcd psi = phi.cast<std::complex<double>>() * basis.coeffs.transpose();
    return psi.cwiseAbs2();
}

Eigen::VectorXd position_profile(const LocalizedBasis& basis, int state, const Eigen::VectorXd& grid) {
    if (state < 0 || state >= basis.dim()) {
        throw std::invalid_argument("position_profile: state index out of range");
    }
    const Eigen::MatrixXd phi = eval_eigenfunctions(basis.space, grid);
    const Eigen::VectorXcd psi = phi.cast<std::complex<double>>() * basis.coeffs.row(state).transpose();
    const Eigen::VectorXd profile = psi.cwiseAbs2();
    const double norm = trapezoid(grid, profile);
    if (std::abs(norm - 1.0) > 1e-2) {
        throw std::runtime_error("position_profile: profile norm misses 1 by more than 1e-2");
    }
    return profile;
}

TailFit fit_tail(const Eigen::VectorXd& grid, const Eigen::VectorXd& profile, double x_lo, double x_hi) {
    if (!(x_lo < x_hi)) {
        throw std::invalid_argument("fit_tail: window must satisfy x_lo < x_hi");
    }
    if (x_lo <= 0.0) {
        throw std::invalid_argument("fit_tail: window must lie at positive x");
    }
    if (grid.size() != profile.size()) {
        throw std::invalid_argument("fit_tail: grid/profile size mismatch");
    }
    std::vector<double> lx, ly;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double x = grid(i);
        if (x < x_lo || x > x_hi) continue;
        const double p = profile(i);
        if (!(p > 0.0)) continue;  // exact zeros carry no log-log information
        lx.push_back(std::log(x));
        ly.push_back(0.5 * std::log(p));
    }
    if (lx.size() < 8) {
        throw std::invalid_argument("fit_tail: fewer than 8 usable grid points in window");
    }
    const LineFit line = fit_line(lx, ly);
    TailFit fit;
    fit.x_lo = x_lo;
    fit.x_hi = x_hi;
    fit.nu = line.slope;
    fit.amplitude = std::exp(line.intercept);
    fit.residual_rms = line.residual_rms;
    fit.points_used = static_cast<int>(lx.size());
    return fit;
}

TailSummary tail_summary(const LocalizedBasis& basis, const Eigen::VectorXd& grid) {
    const int n = basis.dim();
    const Eigen::MatrixXd profiles = position_profiles(basis, grid);
    const double x_hi = 0.8 * std::sqrt(2.0 * n);

    TailSummary summary;
    summary.attempted = n;
    std::vector<double> nus;
    for (int s = 0; s < n; ++s) {
        const Eigen::VectorXd prof = profiles.col(s);
        const double mean_x = trapezoid(grid, (grid.array() * prof.array()).matrix());

        // Window start: first local minimum of |psi|^2 past <x>, floored at 3.
        double x0 = mean_x;
        for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) {
            if (grid(i) <= mean_x) continue;
            if (prof(i) <= prof(i - 1) && prof(i) < prof(i + 1)) {
                x0 = grid(i);
                break;
            }
        }
        const double x_lo = std::max(3.0, x0);
        if (x_lo >= x_hi) continue;
        try {
            TailFit fit = fit_tail(grid, prof, x_lo, x_hi);
            fit.state = s;
            nus.push_back(fit.nu);
            summary.fits.push_back(fit);
        } catch (const std::invalid_argument&) {
            // window too thin for this state; leave it out of the statistics
        }
    }
    if (!nus.empty()) {
        summary.median_nu = quantile(nus, 0.5);
        summary.iqr = quantile(nus, 0.75) - quantile(nus, 0.25);
    } else {
        summary.median_nu = std::numeric_limits<double>::quiet_NaN();
        summary.iqr = std::numeric_limits<double>::quiet_NaN();
    }
    return summary;
}

int central_state(const QuadratureMoments& moments) {
    const Eigen::Index n = moments.mean_x.size();
    if (n == 0) {
        throw std::invalid_argument("central_state: empty moments");
    }
    int best = 0;
    double best_r2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index s = 0; s < n; ++s) {
        const double r2 = moments.mean_x(s) * moments.mean_x(s) + moments.mean_p(s) * moments.mean_p(s);
        if (r2 < best_r2) {
            best_r2 = r2;
            best = static_cast<int>(s);
        }
    }
    return best;
}

LocalizationEstimate localization_estimate(double phase_space_volume, double hbar) {
    if (!(phase_space_volume > 0.0) || !(hbar > 0.0)) {
        throw std::invalid_argument("localization_estimate: volume and hbar must be positive");
    }
    LocalizationEstimate est;
    est.state_count = phase_space_volume / (2.0 * M_PI * hbar);
    est.width = std::sqrt(0.5 + 0.3 * std::log(est.state_count));
    return est;
}

double mean_x4_by_quadrature(const LocalizedBasis& basis, const Eigen::VectorXd& grid) {
    const Eigen::MatrixXd profiles = position_profiles(basis, grid);
    const Eigen::ArrayXd x4 = grid.array().square().square();
    double acc = 0.0;
    for (int s = 0; s < basis.dim(); ++s) {
        acc += trapezoid(grid, (profiles.col(s).array() * x4).matrix());
    }
    return acc / double(basis.dim());
}

double trapezoid(const Eigen::VectorXd& grid, const Eigen::VectorXd& values) {
    if (grid.size() != values.size() || grid.size() < 2) {
        throw std::invalid_argument("trapezoid: need matching grids with at least 2 points");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
        acc += 0.5 * (grid(i + 1) - grid(i)) * (values(i) + values(i + 1));
    }
    return acc;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("quantile: empty data");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * double(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - double(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace locbasis
