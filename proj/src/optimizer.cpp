#include "locbasis/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace locbasis {

namespace {

using Complex = std::complex<double>;

// (a u): (a u)_j = sqrt(j+1) u_{j+1}, last entry 0.
Eigen::RowVectorXcd ladder_image(const Eigen::RowVectorXcd& row) {
    const Eigen::Index n = row.size();
    Eigen::RowVectorXcd out(n);
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        out(j) = std::sqrt(double(j + 1)) * row(j + 1);
    }
    out(n - 1) = Complex(0.0, 0.0);
    return out;
}

// New ladder means of the two mixed rows. With m_a = <a>_a, m_b = <a>_b and
// cross terms q_ab = u_a† a u_b, q_ba = u_b† a u_a, the mixed row
// u_a' = B00 u_a + B01 u_b has
//   <a>_a' = |B00|^2 m_a + conj(B00) B01 q_ab + conj(B01) B00 q_ba + |B01|^2 m_b.
struct MixedMeans {
    Complex ma, mb;
};

MixedMeans mixed_means(const Eigen::Matrix2cd& b, Complex ma, Complex mb, Complex q_ab, Complex q_ba) {
    MixedMeans out;
    out.ma = std::norm(b(0, 0)) * ma + std::conj(b(0, 0)) * b(0, 1) * q_ab +
             std::conj(b(0, 1)) * b(0, 0) * q_ba + std::norm(b(0, 1)) * mb;
    out.mb = std::norm(b(1, 0)) * ma + std::conj(b(1, 0)) * b(1, 1) * q_ab +
             std::conj(b(1, 1)) * b(1, 0) * q_ba + std::norm(b(1, 1)) * mb;
    return out;
}

struct ProposalEval {
    double ds;
    MixedMeans means;
    Complex q_ab, q_ba;
};

ProposalEval evaluate_proposal(const Eigen::MatrixXcd& coeffs, const MomentCache& cache,
                               const RotationProposal& prop, const Eigen::Matrix2cd& block) {
    const int a = prop.row_a;
    const int b = prop.row_b;
    ProposalEval ev;
    ev.q_ab = coeffs.row(a).dot(cache.a_rows.row(b));
    ev.q_ba = coeffs.row(b).dot(cache.a_rows.row(a));
    ev.means = mixed_means(block, cache.a_mean(a), cache.a_mean(b), ev.q_ab, ev.q_ba);
    const double before = std::norm(cache.a_mean(a)) + std::norm(cache.a_mean(b));
    const double after = std::norm(ev.means.ma) + std::norm(ev.means.mb);
    ev.ds = 2.0 * (after - before);
    return ev;
}

void mix_rows(Eigen::MatrixXcd& m, int a, int b, const Eigen::Matrix2cd& block) {
    const Eigen::RowVectorXcd ra = m.row(a);
    const Eigen::RowVectorXcd rb = m.row(b);
    m.row(a) = block(0, 0) * ra + block(0, 1) * rb;
    m.row(b) = block(1, 0) * ra + block(1, 1) * rb;
}

}  // namespace

LocalizedBasis init_identity(const TruncatedSpace& space) {
    LocalizedBasis basis;
    basis.space = space;
    basis.coeffs = Eigen::MatrixXcd::Identity(space.dim, space.dim);
    return basis;
}

Eigen::Matrix2cd RotationProposal::block() const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Complex ea(std::cos(alpha), std::sin(alpha));
    const Complex eb(std::cos(beta), std::sin(beta));
    Eigen::Matrix2cd b;
    b(0, 0) = ea * c;
    b(0, 1) = eb * s;
    b(1, 0) = -std::conj(eb) * s;
    b(1, 1) = std::conj(ea) * c;
    return b;
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
    if (bound < 2) return 0;
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    while (true) {
        const std::uint64_t v = engine_() & mask;
        if (v < bound) return v;
    }
}

RotationProposal propose(Rng& rng, int dim) {
    return propose(rng, dim, kTwoPi);
}

RotationProposal propose(Rng& rng, int dim, double theta_max) {
    if (dim < 2) {
        throw std::invalid_argument("propose: need dim >= 2 to pick a row pair");
    }
    RotationProposal prop;
    prop.row_a = static_cast<int>(rng.uniform_index(dim));
    prop.row_b = static_cast<int>(rng.uniform_index(dim - 1));
    if (prop.row_b >= prop.row_a) ++prop.row_b;
    prop.theta = theta_max * rng.uniform();
    prop.alpha = kTwoPi * rng.uniform();
    prop.beta = kTwoPi * rng.uniform();
    return prop;
}

QuadratureMoments compute_moments(const LocalizedBasis& basis, const QuadratureMatrices& quads) {
    const int n = basis.dim();
    if (quads.dim() != n) {
        throw std::invalid_argument("compute_moments: dimension mismatch");
    }
    QuadratureMoments mom;
    mom.mean_x.resize(n);
    mom.mean_p.resize(n);
    mom.mean_x2.resize(n);
    mom.mean_p2.resize(n);
    mom.dx2.resize(n);
    mom.dp2.resize(n);

    const Eigen::MatrixXcd xc = quads.x.cast<Complex>();
    const Eigen::MatrixXcd x2c = quads.x2.cast<Complex>();
    const Eigen::MatrixXcd p2c = quads.p2.cast<Complex>();
    for (int s = 0; s < n; ++s) {
        const Eigen::VectorXcd u = basis.coeffs.row(s).transpose();
        mom.mean_x(s) = (u.adjoint() * xc * u)(0).real();
        mom.mean_p(s) = (u.adjoint() * quads.p * u)(0).real();
        mom.mean_x2(s) = (u.adjoint() * x2c * u)(0).real();
        mom.mean_p2(s) = (u.adjoint() * p2c * u)(0).real();
        mom.dx2(s) = mom.mean_x2(s) - mom.mean_x(s) * mom.mean_x(s);
        mom.dp2(s) = mom.mean_p2(s) - mom.mean_p(s) * mom.mean_p(s);
    }
    return mom;
}

double objective_s(const LocalizedBasis& basis, const QuadratureMatrices& quads) {
    const int n = basis.dim();
    if (quads.dim() != n) {
        throw std::invalid_argument("objective_s: dimension mismatch");
    }
    const Eigen::MatrixXcd xc = quads.x.cast<Complex>();
    double s = 0.0;
    for (int row = 0; row < n; ++row) {
        const Eigen::VectorXcd u = basis.coeffs.row(row).transpose();
        const Complex mx = (u.adjoint() * xc * u)(0);
        const Complex mp = (u.adjoint() * quads.p * u)(0);
        if (std::abs(mx.imag()) > 1e-9 || std::abs(mp.imag()) > 1e-9) {
            throw std::runtime_error("objective_s: imaginary residue above 1e-9, basis is corrupted");
        }
        s += mx.real() * mx.real() + mp.real() * mp.real();
    }
    return s;
}

double mean_variance(const LocalizedBasis& basis, const QuadratureMatrices& quads) {
    const int n = basis.dim();
    const double s = objective_s(basis, quads);
    const double via_trace = (double(n) * double(n) - s) / double(n);

    const QuadratureMoments mom = compute_moments(basis, quads);
    const double direct = (mom.dx2 + mom.dp2).mean();
    if (std::abs(via_trace - direct) > 1e-6) {
        throw std::runtime_error("mean_variance: trace route and per-state route disagree");
    }
    return via_trace;
}

MomentCache build_cache(const LocalizedBasis& basis) {
    const int n = basis.dim();
    MomentCache cache;
    cache.a_rows.resize(n, n);
    cache.a_mean.resize(n);
    for (int row = 0; row < n; ++row) {
        cache.a_rows.row(row) = ladder_image(basis.coeffs.row(row));
        cache.a_mean(row) = basis.coeffs.row(row).dot(cache.a_rows.row(row));
    }
    cache.s = 2.0 * cache.a_mean.squaredNorm();
    return cache;
}

double delta_s(const LocalizedBasis& basis, const RotationProposal& prop, const MomentCache& cache) {
    return evaluate_proposal(basis.coeffs, cache, prop, prop.block()).ds;
}

LocalizedBasis apply_rotation(const LocalizedBasis& basis, const RotationProposal& prop) {
    const int n = basis.dim();
    if (prop.row_a < 0 || prop.row_b < 0 || prop.row_a >= n || prop.row_b >= n ||
        prop.row_a == prop.row_b) {
        throw std::invalid_argument("apply_rotation: invalid row pair");
    }
    LocalizedBasis out = basis;
    mix_rows(out.coeffs, prop.row_a, prop.row_b, prop.block());
    return out;
}

void orthonormalize_rows(Eigen::MatrixXcd& m) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < i; ++k) {
            const Complex overlap = m.row(k).dot(m.row(i));
            m.row(i) -= overlap * m.row(k);
        }
        m.row(i) /= m.row(i).norm();
    }
}

double unitarity_residual(const Eigen::MatrixXcd& m) {
    const Eigen::MatrixXcd gram = m * m.adjoint();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(m.rows(), m.rows());
    return (gram - eye).cwiseAbs().maxCoeff();
}

OptimizeResult run(LocalizedBasis basis, const OptimizerConfig& cfg, const QuadratureMatrices& quads) {
    const int n = basis.dim();
    if (quads.dim() != n) {
        throw std::invalid_argument("run: dimension mismatch");
    }
    if (cfg.max_proposals < 1) {
        throw std::invalid_argument("run: max_proposals must be >= 1");
    }
    if (cfg.min_delta < 0.0) {
        throw std::invalid_argument("run: min_delta must be >= 0");
    }

    OptimizeResult result;
    result.trace = OptimizationTrace{};

    if (n < 2) {
        // No row pairs exist; the single state is already the whole basis.
        result.basis = std::move(basis);
        result.trace.final_s = 0.0;
        result.trace.stop_reason = "no pairs";
        return result;
    }

    const std::uint64_t window =
        cfg.saturation_window > 0 ? cfg.saturation_window : 5000ull * std::uint64_t(n);

    Rng rng(cfg.seed);
    MomentCache cache = build_cache(basis);

    // s accumulates accepted improvements only, so the recorded history is
    // strictly increasing even across re-orthonormalization checkpoints.
    double s = cache.s;
    std::uint64_t consecutive_rejections = 0;
    std::uint64_t proposals = 0;
    double window_start_s = s;
    std::uint64_t next_window_mark = window;
    std::string stop_reason = "max proposals";

    auto checkpoint = [&]() {
        const double residual = unitarity_residual(basis.coeffs);
        if (residual > 1e-6) {
            throw std::runtime_error("run: unitarity residual exceeded 1e-6 at checkpoint");
        }
        orthonormalize_rows(basis.coeffs);
        cache = build_cache(basis);
        // Conservation: sum_j <j|x^2+p^2|j> weighted by column norms must
        // equal N^2, and the accumulated S must track the recomputed one.
        double trace_x2p2 = 0.0;
        for (int j = 0; j < n; ++j) {
            trace_x2p2 += (2.0 * j + 1.0) * basis.coeffs.col(j).squaredNorm();
        }
        if (std::abs(trace_x2p2 - double(n) * double(n)) > 1e-8) {
            throw std::runtime_error("run: quadrature trace identity violated at checkpoint");
        }
        if (std::abs(cache.s - s) > 1e-8 * std::max(1.0, std::abs(s))) {
            throw std::runtime_error("run: accumulated S drifted from recomputed S");
        }
    };

    while (proposals < cfg.max_proposals) {
        ++proposals;
        const RotationProposal prop = propose(rng, n, cfg.theta_max);
        const Eigen::Matrix2cd block = prop.block();
        const ProposalEval ev = evaluate_proposal(basis.coeffs, cache, prop, block);

        if (ev.ds > cfg.min_delta) {
            mix_rows(basis.coeffs, prop.row_a, prop.row_b, block);
            mix_rows(cache.a_rows, prop.row_a, prop.row_b, block);
            cache.a_mean(prop.row_a) = ev.means.ma;
            cache.a_mean(prop.row_b) = ev.means.mb;
            s += ev.ds;
            consecutive_rejections = 0;
            ++result.trace.accepted;
            result.trace.s_history.emplace_back(proposals, s);
            if (result.trace.accepted % cfg.renorm_interval == 0) {
                checkpoint();
            }
        } else {
            ++result.trace.rejected;
            if (++consecutive_rejections >= window) {
                stop_reason = "saturation window";
                break;
            }
        }

        if (proposals >= next_window_mark) {
            if (s - window_start_s < cfg.window_rel_tol * std::max(1.0, std::abs(s))) {
                stop_reason = "window improvement below tolerance";
                break;
            }
            window_start_s = s;
            next_window_mark = proposals + window;
        }
    }

    orthonormalize_rows(basis.coeffs);
    const double residual = unitarity_residual(basis.coeffs);
    if (residual > 1e-10) {
        throw std::runtime_error("run: final unitarity residual above 1e-10");
    }
    cache = build_cache(basis);
    result.trace.final_s = cache.s;
    result.trace.stop_reason = stop_reason;
    result.basis = std::move(basis);
    return result;
}

}  // namespace locbasis
