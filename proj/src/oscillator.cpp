#include "locbasis/oscillator.hpp"

#include <cmath>
#include <stdexcept>

namespace locbasis {

TruncatedSpace build_space(int dim) {
    if (dim < 1) {
        throw std::invalid_argument("build_space: dim must be >= 1");
    }
    TruncatedSpace space;
    space.dim = dim;
    space.energies.resize(dim);
    for (int j = 0; j < dim; ++j) {
        space.energies(j) = j + 0.5;
    }
    return space;
}

QuadratureMatrices build_quadratures(const TruncatedSpace& space) {
    const int n = space.dim;
    QuadratureMatrices q;
    q.x = Eigen::MatrixXd::Zero(n, n);
    q.p = Eigen::MatrixXcd::Zero(n, n);
    q.x2 = Eigen::MatrixXd::Zero(n, n);
    q.p2 = Eigen::MatrixXd::Zero(n, n);
    q.energies = space.energies;

    const std::complex<double> i_unit(0.0, 1.0);
    for (int j = 0; j + 1 < n; ++j) {
        const double c = std::sqrt((j + 1) / 2.0);
        q.x(j, j + 1) = c;
        q.x(j + 1, j) = c;
        q.p(j, j + 1) = -i_unit * c;
        q.p(j + 1, j) = i_unit * c;
    }
    for (int j = 0; j < n; ++j) {
        q.x2(j, j) = j + 0.5;
        q.p2(j, j) = j + 0.5;
    }
    // <j|x^2|j+2> = sqrt((j+1)(j+2))/2 from a^2; p^2 carries the opposite sign.
    for (int j = 0; j + 2 < n; ++j) {
        const double c = 0.5 * std::sqrt(double(j + 1) * double(j + 2));
        q.x2(j, j + 2) = c;
        q.x2(j + 2, j) = c;
        q.p2(j, j + 2) = -c;
        q.p2(j + 2, j) = -c;
    }
    return q;
}

Eigen::MatrixXd eval_eigenfunctions(const TruncatedSpace& space, const Eigen::VectorXd& grid) {
    const int n = space.dim;
    const Eigen::Index m = grid.size();
    if (m == 0) {
        throw std::invalid_argument("eval_eigenfunctions: empty grid");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!std::isfinite(grid(i))) {
            throw std::invalid_argument("eval_eigenfunctions: non-finite grid entry");
        }
    }

    // Recurrence coefficients shared across grid points.
    Eigen::VectorXd c_up(n), c_down(n);
    for (int j = 0; j < n; ++j) {
        c_up(j) = std::sqrt(2.0 / (j + 1));
        c_down(j) = std::sqrt(double(j) / (j + 1));
    }

    const double log_phi0_norm = -0.25 * std::log(M_PI);
    Eigen::MatrixXd phi(m, n);

    for (Eigen::Index i = 0; i < m; ++i) {
        const double x = grid(i);
        // Seed phi_0 = pi^{-1/4} exp(-x^2/2) as mantissa * 2^exponent so the
        // Gaussian factor survives far beyond the double underflow point.
        const double log_phi0 = log_phi0_norm - 0.5 * x * x;
        int expo = static_cast<int>(std::floor(log_phi0 / M_LN2));
        double cur = std::exp(log_phi0 - expo * M_LN2);
        double prev = 0.0;

        phi(i, 0) = std::ldexp(cur, expo);
        for (int j = 0; j + 1 < n; ++j) {
            const double next = x * c_up(j) * cur - c_down(j) * prev;
            prev = cur;
            cur = next;
            // Keep the mantissa pair in range; magnitudes climb from the
            // underflow-scale seed back to O(1) near the turning point.
            if (std::abs(cur) > 0x1p500) {
                cur = std::ldexp(cur, -512);
                prev = std::ldexp(prev, -512);
                expo += 512;
            }
            phi(i, j + 1) = std::ldexp(cur, expo);
        }
    }
    return phi;
}

Eigen::VectorXd default_grid(const TruncatedSpace& space) {
    const double half_width = 1.5 * std::sqrt(2.0 * space.dim);
    const int count = 4096;
    Eigen::VectorXd grid(count);
    const double step = 2.0 * half_width / (count - 1);
    for (int i = 0; i < count; ++i) {
        grid(i) = -half_width + i * step;
    }
    return grid;
}

}  // namespace locbasis
