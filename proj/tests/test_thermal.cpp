#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "locbasis/analysis.hpp"
#include "locbasis/thermal.hpp"
#include "test_util.hpp"

using namespace locbasis;

namespace {

// One moderately optimized N=32 basis shared across the expensive cases.
const OptimizeResult& optimized32() {
    static const OptimizeResult result = [] {
        const TruncatedSpace space = build_space(32);
        const QuadratureMatrices quads = build_quadratures(space);
        OptimizerConfig cfg;
        cfg.seed = 21;
        cfg.max_proposals = 2'000'000;
        return run(init_identity(space), cfg, quads);
    }();
    return result;
}

}  // namespace

TEST_CASE("identity-basis ensemble is the canonical diagonal matrix") {
    const TruncatedSpace space = build_space(6);
    const double beta = 0.7;
    const ThermalEnsemble ens = build_ensemble(init_identity(space), beta);

    double z = 0.0;
    for (int j = 0; j < 6; ++j) z += std::exp(-beta * (j + 0.5));
    for (int j = 0; j < 6; ++j) {
        CHECK(ens.rho(j, j).real() == doctest::Approx(std::exp(-beta * (j + 0.5)) / z).epsilon(1e-12));
        for (int k = 0; k < 6; ++k) {
            if (j != k) CHECK(std::abs(ens.rho(j, k)) < 1e-15);
        }
    }

    CHECK(ens.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ens.probs.minCoeff() >= 0.0);
    CHECK(ens.probs.sum() == doctest::Approx(1.0).epsilon(1e-13));

    // deep cold limit: everything condenses into the ground state
    const ThermalEnsemble cold = build_ensemble(init_identity(space), 1000.0);
    CHECK(cold.rho(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(build_ensemble(init_identity(space), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_ensemble(init_identity(space), -1.0), std::invalid_argument);
}

TEST_CASE("ensemble invariants for a generic unitary basis") {
    const int n = 16;
    const LocalizedBasis basis = testutil::basis_from_matrix(testutil::random_unitary(n, 3));
    const ThermalEnsemble ens = build_ensemble(basis, 0.3);

    CHECK(std::abs(ens.rho.trace().real() - 1.0) < 1e-12);
    CHECK((ens.rho - ens.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(ens.rho);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
    CHECK(ens.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("band profile: diagonal, pure off-diagonal support, sum rule") {
    const TruncatedSpace space = build_space(4);

    // canonical rho is diagonal: all weight in w_0, bandwidth 0
    const ThermalEnsemble canonical = canonical_ensemble(space, 0.5);
    const BandProfile flat = band_profile(canonical);
    CHECK(flat.effective_bandwidth == 0);
    for (int d = 1; d < 4; ++d) CHECK(flat.band_weight(d) == 0.0);
    CHECK(flat.band_weight(0) == doctest::Approx(canonical.rho.cwiseAbs2().sum()).epsilon(1e-14));

    // point mass on a state supported on levels {0, 3}: bandwidth equals the
    // support spread, and the pure-state sum rule saturates at 1
    Eigen::VectorXcd u(4);
    u << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    ThermalEnsemble pure;
    pure.space = space;
    pure.beta = 1.0;
    pure.probs = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    pure.rho = u * u.adjoint();
    const BandProfile banded = band_profile(pure);
    CHECK(banded.band_weight(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(banded.band_weight(3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(banded.effective_bandwidth == 3);
    CHECK(banded.band_weight.sum() == doctest::Approx(1.0).epsilon(1e-13));

    // mixed state: sum of band weights = ||rho||_F^2 < 1
    const BandProfile mixed = band_profile(canonical);
    CHECK(mixed.band_weight.sum() == doctest::Approx(canonical.rho.cwiseAbs2().sum()).epsilon(1e-14));
    CHECK(mixed.band_weight.sum() < 1.0);
}

TEST_CASE("optimized ensemble is banded: narrower than a random unitary's") {
    const LocalizedBasis& basis = optimized32().basis;
    const double beta = 0.2;
    const ThermalEnsemble ens = build_ensemble(basis, beta);
    const BandProfile band = band_profile(ens);

    CHECK(band.effective_bandwidth > 0);
    CHECK(band.effective_bandwidth < 31);

    // Against a dense random unitary the banding shows up in the bulk of the
    // weight: the optimized rho crosses 90% of its Frobenius weight within a
    // few diagonals and carries far more absolute weight there. (The 99%
    // threshold is not a usable comparison point: the optimized rho keeps
    // ~2% genuine weight in far corners, while the random ensemble is close
    // to maximally mixed and has nothing but dust off the diagonal.)
    const LocalizedBasis random_basis =
        testutil::basis_from_matrix(testutil::random_unitary(32, 77));
    const BandProfile random_band = band_profile(build_ensemble(random_basis, beta));

    auto crossing = [](const Eigen::VectorXd& w, double fraction) {
        const double target = fraction * w.sum();
        double cum = 0.0;
        for (Eigen::Index d = 0; d < w.size(); ++d) {
            cum += w(d);
            if (cum >= target) return static_cast<int>(d);
        }
        return static_cast<int>(w.size() - 1);
    };
    CHECK(crossing(band.band_weight, 0.90) < crossing(random_band.band_weight, 0.90));
    CHECK(band.band_weight.head(7).sum() > 2.0 * random_band.band_weight.head(7).sum());
}

TEST_CASE("canonical response vanishes identically") {
    const TruncatedSpace space = build_space(32);
    const QuadratureMatrices quads = build_quadratures(space);
    const ThermalEnsemble canonical = canonical_ensemble(space, 0.2);
    const ResponseSeries series =
        response(canonical, default_perturbation(quads), uniform_times(2.0 * M_PI, 1024));
    CHECK(series.values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("optimized-basis response: real, zero at t=0, periodic, low-frequency heavy") {
    const LocalizedBasis& basis = optimized32().basis;
    const QuadratureMatrices quads = build_quadratures(basis.space);
    const ThermalEnsemble ens = build_ensemble(basis, 0.2);

    const ResponseSeries series =
        response(ens, default_perturbation(quads), uniform_times(2.0 * M_PI, 1024));
    CHECK(std::abs(series.values(0)) < 1e-14);
    CHECK(series.values.cwiseAbs().maxCoeff() > 1e-6);  // the banded rho does respond

    const SpectralQuartiles q = spectral_quartiles(series.spectrum);
    CHECK(q.low > q.high);

    Eigen::VectorXd period_times(2);
    period_times << 0.0, 2.0 * M_PI;
    const ResponseSeries period = response(ens, default_perturbation(quads), period_times);
    CHECK(std::abs(period.values(1) - period.values(0)) < 1e-10);
}

TEST_CASE("response input validation") {
    const TruncatedSpace space = build_space(4);
    const QuadratureMatrices quads = build_quadratures(space);
    const ThermalEnsemble ens = canonical_ensemble(space, 1.0);

    Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(4, 4);
    skew(0, 1) = std::complex<double>(0.0, 0.5);
    skew(1, 0) = std::complex<double>(0.0, 0.5);  // equal, not conjugate: not Hermitian
    CHECK_THROWS_AS(response(ens, skew, uniform_times(2.0 * M_PI, 16)), std::invalid_argument);

    Eigen::VectorXd shifted(3);
    shifted << 1.0, 2.0, 3.0;
    CHECK_THROWS_AS(response(ens, default_perturbation(quads), shifted), std::invalid_argument);

    Eigen::VectorXd ragged(4);
    ragged << 0.0, 1.0, 2.0, 4.0;
    CHECK_THROWS_AS(response(ens, default_perturbation(quads), ragged), std::invalid_argument);
}

TEST_CASE("spectral quartile bookkeeping") {
    Eigen::VectorXd spectrum(8);
    spectrum << 4, 3, 0, 0, 0, 0, 1, 2;
    const SpectralQuartiles q = spectral_quartiles(spectrum);
    CHECK(q.low == doctest::Approx(7.0));
    CHECK(q.high == doctest::Approx(3.0));
    CHECK_THROWS_AS(spectral_quartiles(Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST_CASE("nearly-diagonal Gaussian kernel has oscillator eigenfunctions") {
    // The kernel exp(-(x-x')^2/(2 s1^2) - (x+x')^2/(2 s2^2)) with s1 << s2 is
    // nearly diagonal in both position and momentum, yet its eigenvectors are
    // the eigenfunctions of an oscillator with length scale (s1 s2 / 2)^{1/2},
    // spreading as sqrt(n) rather than staying localized.
    const double s1 = 0.1, s2 = 10.0;
    const int m = 321;
    const Eigen::VectorXd grid = testutil::linspace(-4.0, 4.0, m);
    const double h = grid(1) - grid(0);

    Eigen::MatrixXd kernel(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double d = grid(i) - grid(j);
            const double s = grid(i) + grid(j);
            kernel(i, j) = std::exp(-d * d / (2 * s1 * s1) - s * s / (2 * s2 * s2));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel * h);

    // scaled oscillator eigenfunctions phi_k(sqrt(lambda) x), lambda = 2/(s1 s2)
    const double scale = std::sqrt(2.0 / (s1 * s2));
    const Eigen::MatrixXd phi = eval_eigenfunctions(build_space(3), grid * scale);
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd expected = phi.col(k).normalized();
        const Eigen::VectorXd found = solver.eigenvectors().col(m - 1 - k);
        const double overlap = std::abs(found.dot(expected));
        CHECK(overlap > 0.9);
    }
}
