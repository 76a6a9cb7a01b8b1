// thermal.hpp — thermal mixtures of localized states, their band structure in
// the energy representation, and the linear response they produce.
//
// A mixture rho = sum_n p_n |n~><n~| of localized states is nondiagonal in the
// oscillator (energy) basis but narrowly banded, because each localized state
// occupies a narrow range of levels. A canonical mixture of the eigenstates
// themselves is strictly diagonal and produces no response at all; the banded
// one responds at the low frequencies E_k - E_j present inside the band.

#pragma once

#include <string>

#include "locbasis/optimizer.hpp"

namespace locbasis {

struct ThermalEnsemble {
    TruncatedSpace space;
    double beta = 0.0;
    // Occupation probabilities over localized states (simplex vector).
    Eigen::VectorXd probs;
    // Density matrix in the oscillator basis: Hermitian, PSD, unit trace.
    Eigen::MatrixXcd rho;
};

// p_n proportional to exp(-beta <H>_n); the weights reduce to canonical
// Boltzmann factors when the localized states are energy eigenstates.
ThermalEnsemble build_ensemble(const LocalizedBasis& basis, double beta);

// exp(-beta H)/Z over the retained levels: the diagonal comparison baseline.
ThermalEnsemble canonical_ensemble(const TruncatedSpace& space, double beta);

// Weight per diagonal distance: band_weight(d) = sum_{|j-k|=d} |rho_jk|^2.
// effective_bandwidth is the smallest d* with 99% of the total inside d <= d*.
struct BandProfile {
    Eigen::VectorXd band_weight;
    int effective_bandwidth = 0;
};

BandProfile band_profile(const ThermalEnsemble& ens);

struct ResponseSeries {
    Eigen::VectorXd times;
    Eigen::VectorXd values;     // delta <H0>(t), real up to 1e-10 residue
    Eigen::VectorXd spectrum;   // one-sided DFT magnitudes of values
    std::string perturbation;
};

// delta <H0>(t) = sum_{j,k} (e^{-i (E_k - E_j) t} - 1) rho_jk (h1)_kj for each
// time on a uniform grid starting at 0. Throws on non-Hermitian h1.
ResponseSeries response(const ThermalEnsemble& ens, const Eigen::MatrixXcd& h1,
                        const Eigen::VectorXd& times, const std::string& label = "H1");

// lambda * x: the default dipole-like perturbation.
Eigen::MatrixXcd default_perturbation(const QuadratureMatrices& quads, double lambda = 0.1);

// count points 0, dt, ..., (count-1) dt with dt = t_end / count; the endpoint
// is excluded so the grid spans exactly one period for DFT purposes.
Eigen::VectorXd uniform_times(double t_end, int count);

// Summed spectral magnitude in the lowest and highest quarter of the
// one-sided frequency bins.
struct SpectralQuartiles {
    double low = 0.0;
    double high = 0.0;
};

SpectralQuartiles spectral_quartiles(const Eigen::VectorXd& spectrum);

}  // namespace locbasis
