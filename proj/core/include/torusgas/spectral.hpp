#pragma once

#include <span>

#include "torusgas/grid.hpp"

namespace torusgas {

class KernelSpec;

// f̂(m) = n^{-d} Σ_x f(x) e^{-2πi m·x/T}, so that f(x) = Σ_m f̂(m) e^{2πi m·x/T}.
SpectralField forward_transform(const GridField& field);

// Throws NonRealSpectrum if the coefficients are not conjugate symmetric
// to 1e-10 (relative to max(1, max|c|)).
GridField inverse_transform(const SpectralField& spec);

// Σ_m |f̂(m)| |m|^α over the resolved lattice. NegativeOrder for α < 0.
double sobolev_seminorm(const SpectralField& spec, double alpha);
double sobolev_seminorm(const GridField& field, double alpha);

// ∫ μ log μ, with 0 log 0 = 0.
double entropy(const ProbabilityDensity& mu);
// ∫ μ log(μ/ν); +infinity if ν vanishes where μ does not.
double relative_entropy(const ProbabilityDensity& mu, const ProbabilityDensity& nu);

// ℰ(μ) = T^{-d} Σ_m ĝ(m) |μ̃(m)|² with μ̃(m) = T^d f̂(m) the moments of the
// density whose series coefficients are `density`. Logs a LatticeTruncation
// warning when the outer half of the resolved band carries more than 1e-8 of
// the total.
double interaction_energy(const KernelSpec& kernel, const SpectralField& density);
double interaction_energy(const KernelSpec& kernel, const GridField& density);
// 𝒢(μ, ν) = T^{-d} Re Σ_m ĝ(m) μ̃(m) conj(ν̃(m)).
double bilinear_energy(const KernelSpec& kernel, const SpectralField& mu, const SpectralField& nu);

// Coefficient-wise product with a real multiplier table (FFT order).
SpectralField multiply(const SpectralField& spec, std::span<const double> multiplier);

// Trigonometric interpolation onto a finer grid by zero padding. The Nyquist
// mode is split symmetrically so real fields stay real.
GridField spectral_refine(const GridField& field, int n_fine);

// Σ_x f g h^d.
double inner_product(const GridField& f, const GridField& g);

}  // namespace torusgas
