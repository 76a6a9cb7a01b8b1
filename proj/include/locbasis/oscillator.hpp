// oscillator.hpp — truncated harmonic-oscillator space: level energies, quadrature
// matrix elements, and stable grid evaluation of the oscillator eigenfunctions.

#pragma once

#include <Eigen/Dense>

namespace locbasis {

// The lowest N oscillator levels. Units are fixed to hbar = omega = m = 1,
// so E_j = j + 1/2 and the top retained level sits at N - 1/2.
struct TruncatedSpace {
    int dim = 0;
    Eigen::VectorXd energies;
};

TruncatedSpace build_space(int dim);

// Matrix elements of x, p, x^2, p^2 over the retained levels.
//
// x and p are tridiagonal with x(j, j+1) = sqrt((j+1)/2) and
// p(j, j+1) = -i sqrt((j+1)/2). x2 and p2 hold the exact pentadiagonal
// elements <j|x^2|k> of the untruncated operators; these differ from the
// square of the truncated x matrix in the last two rows.
struct QuadratureMatrices {
    Eigen::MatrixXd x;
    Eigen::MatrixXcd p;
    Eigen::MatrixXd x2;
    Eigen::MatrixXd p2;
    Eigen::VectorXd energies;

    int dim() const { return static_cast<int>(energies.size()); }
};

QuadratureMatrices build_quadratures(const TruncatedSpace& space);

// Normalized oscillator eigenfunctions phi_j(x) for j = 0..dim-1 on a grid.
// Row i = grid point, column j = level. Uses the normalized three-term
// recurrence phi_{j+1} = x sqrt(2/(j+1)) phi_j - sqrt(j/(j+1)) phi_{j-1}
// with an exponent-carrying representation, so levels in the thousands and
// grid points far outside the classically allowed region stay finite.
Eigen::MatrixXd eval_eigenfunctions(const TruncatedSpace& space, const Eigen::VectorXd& grid);

// Default evaluation grid: 4096 points on [-1.5 sqrt(2N), 1.5 sqrt(2N)],
// covering the top level's classical turning point sqrt(2N-1) with margin.
Eigen::VectorXd default_grid(const TruncatedSpace& space);

}  // namespace locbasis
