#include "locbasis/thermal.hpp"

#include <cmath>
#include <stdexcept>

#include "locbasis/analysis.hpp"

namespace locbasis {

namespace {

using Complex = std::complex<double>;

void validate_ensemble(const ThermalEnsemble& ens) {
    const double trace = ens.rho.trace().real();
    if (std::abs(trace - 1.0) > 1e-12) {
        throw std::runtime_error("thermal: ensemble trace is not 1");
    }
    if ((ens.rho - ens.rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::runtime_error("thermal: ensemble density matrix is not Hermitian");
    }
}

}  // namespace

ThermalEnsemble build_ensemble(const LocalizedBasis& basis, double beta) {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("build_ensemble: beta must be positive");
    }
    const int n = basis.dim();
    const EnergyStats stats = energy_stats(basis);

    // Boltzmann weights over the states' mean energies, shifted to guard the
    // exponentials against underflow wiping out every weight.
    const double e_min = stats.mean_e.minCoeff();
    Eigen::VectorXd w(n);
    for (int s = 0; s < n; ++s) {
        w(s) = std::exp(-beta * (stats.mean_e(s) - e_min));
    }
    ThermalEnsemble ens;
    ens.space = basis.space;
    ens.beta = beta;
    ens.probs = w / w.sum();
    ens.rho = basis.coeffs.transpose() * ens.probs.asDiagonal() * basis.coeffs.conjugate();
    validate_ensemble(ens);
    return ens;
}

ThermalEnsemble canonical_ensemble(const TruncatedSpace& space, double beta) {
    return build_ensemble(init_identity(space), beta);
}

BandProfile band_profile(const ThermalEnsemble& ens) {
    const Eigen::Index n = ens.rho.rows();
    BandProfile profile;
    profile.band_weight = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            profile.band_weight(std::abs(j - k)) += std::norm(ens.rho(j, k));
        }
    }
    const double total = profile.band_weight.sum();
    double cum = 0.0;
    for (Eigen::Index d = 0; d < n; ++d) {
        cum += profile.band_weight(d);
        if (cum >= 0.99 * total) {
            profile.effective_bandwidth = static_cast<int>(d);
            break;
        }
    }
    return profile;
}

ResponseSeries response(const ThermalEnsemble& ens, const Eigen::MatrixXcd& h1,
                        const Eigen::VectorXd& times, const std::string& label) {
    const Eigen::Index n = ens.rho.rows();
    if (h1.rows() != n || h1.cols() != n) {
        throw std::invalid_argument("response: perturbation dimension mismatch");
    }
    if ((h1 - h1.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("response: perturbation is not Hermitian");
    }
    const Eigen::Index nt = times.size();
    if (nt < 1 || times(0) != 0.0) {
        throw std::invalid_argument("response: time grid must start at 0");
    }
    if (nt >= 3) {
        const double dt = times(1) - times(0);
        for (Eigen::Index i = 1; i + 1 < nt; ++i) {
            if (std::abs((times(i + 1) - times(i)) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
                throw std::invalid_argument("response: time grid must be uniform");
            }
        }
    }

    // T_jk = rho_jk (h1)_kj; the response is ph^T T conj(ph) - sum(T) with
    // phases ph_j = e^{i E_j t}.
    const Eigen::MatrixXcd weights = ens.rho.cwiseProduct(h1.transpose());
    const Complex static_sum = weights.sum();

    ResponseSeries series;
    series.times = times;
    series.values.resize(nt);
    series.perturbation = label;
    Eigen::VectorXcd phase(n);
    for (Eigen::Index it = 0; it < nt; ++it) {
        const double t = times(it);
        for (Eigen::Index j = 0; j < n; ++j) {
            phase(j) = Complex(std::cos(ens.space.energies(j) * t), std::sin(ens.space.energies(j) * t));
        }
        const Complex moving = (phase.transpose() * weights * phase.conjugate())(0);
        const Complex value = moving - static_sum;
        if (std::abs(value.imag()) > 1e-10) {
            throw std::runtime_error("response: imaginary residue above 1e-10");
        }
        series.values(it) = value.real();
    }

    // One-sided DFT magnitudes.
    const Eigen::Index half = nt / 2;
    series.spectrum.resize(half + 1);
    for (Eigen::Index m = 0; m <= half; ++m) {
        Complex acc(0.0, 0.0);
        const double w = -2.0 * M_PI * double(m) / double(nt);
        for (Eigen::Index i = 0; i < nt; ++i) {
            acc += series.values(i) * Complex(std::cos(w * double(i)), std::sin(w * double(i)));
        }
        series.spectrum(m) = std::abs(acc);
    }
    return series;
}

Eigen::MatrixXcd default_perturbation(const QuadratureMatrices& quads, double lambda) {
    return lambda * quads.x.cast<Complex>();
}

Eigen::VectorXd uniform_times(double t_end, int count) {
    if (count < 1 || !(t_end > 0.0)) {
        throw std::invalid_argument("uniform_times: need count >= 1 and t_end > 0");
    }
    Eigen::VectorXd times(count);
    for (int i = 0; i < count; ++i) {
        times(i) = t_end * double(i) / double(count);
    }
    return times;
}

SpectralQuartiles spectral_quartiles(const Eigen::VectorXd& spectrum) {
    const Eigen::Index nb = spectrum.size();
    if (nb < 4) {
        throw std::invalid_argument("spectral_quartiles: need at least 4 bins");
    }
    const Eigen::Index q = nb / 4;
    SpectralQuartiles out;
    out.low = spectrum.head(q).sum();
    out.high = spectrum.tail(q).sum();
    return out;
}

}  // namespace locbasis
