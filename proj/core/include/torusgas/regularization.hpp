#pragma once

#include <vector>

#include "torusgas/grid.hpp"
#include "torusgas/kernels.hpp"
#include "torusgas/particles.hpp"

namespace torusgas {

// emp^t: the empirical measure run through the flow with multiplier
// e^{-t/ĝ(m)}, zero mode left at 1.
struct RegularizedEmpirical {
  double t;
  // May dip below zero when the kernel's heat-like field is not positive.
  GridField density;
  double min_value;
  Configuration source;

  // Negative parts set to zero and the result renormalized.
  ProbabilityDensity probability() const;
};

RegularizedEmpirical regularize(const Configuration& config, const KernelSpec& kernel, double t, const TorusGrid& grid);

// Smallest box half-width M with e^{-t/ĝ(m)} below tol on the axis point
// (M,0,0); beyond it the damped spectrum no longer matters.
int regularization_cutoff(const KernelSpec& kernel, double t, double tol = 1e-10);

// ℰ(emp^t) = T^{-d} Σ_m ĝ(m) e^{-2t/ĝ(m)} |ẽ(m)|² (zero mode undamped).
double regularized_energy(const KernelSpec& kernel, const EmpiricalMoments& moments, double t);

struct EnergyGap {
  std::size_t n_points;
  double t;
  double regularized;  // ℰ(emp^t)
  double pair;         // ℰ^≠(emp)
  double gap;
  // t^{1-d/γ}/N + t
  double bound_shape;
  double ratio;
  int cutoff;
};

EnergyGap energy_gap(const Configuration& config, const PairInteraction& pair, const KernelSpec& kernel, double t);
// One moment computation shared across all t.
std::vector<EnergyGap> energy_gap_sweep(const Configuration& config, const PairInteraction& pair,
                                        const KernelSpec& kernel, const std::vector<double>& ts);

struct TestError {
  double t;
  double err;
  // max{t, t^{α/λ}} ‖f‖_{W^α}
  double bound_shape;
  double ratio;
};

// |∫ f d(emp^t - emp)| = |Σ_{m≠0} f̂(m) ẽ(-m)(e^{-t/ĝ(m)} - 1)| over the lattice of f's grid.
TestError test_error(const Configuration& config, const KernelSpec& kernel, const GridField& f, double t, double alpha);
std::vector<TestError> test_error_sweep(const Configuration& config, const KernelSpec& kernel, const GridField& f,
                                        const std::vector<double>& ts, double alpha);

// Exponent e with t = N^e: -γ/d for α >= λ, else (1 - d/γ - α/λ)^{-1}. A zero
// or nonnegative denominator warns and falls back to -γ/d.
double optimal_t_exponent(double alpha, double lambda, double gamma, int d);
double optimal_t(double n_points, double alpha, double lambda, double gamma, int d);

// max{-γ/d, (λ/α - λd/(αγ) - 1)^{-1}}. DegenerateExponent when the bracket is 0.
double p_star(double alpha, double lambda, double gamma, int d);

struct ExponentTable {
  double p_star;
  double q_star;  // p*(min{α,κ})
  double m_star;  // max{p*, (s-d)/d}
  double optimal_t_exponent;
  // False when the second p* branch was unusable and -γ/d was taken.
  bool second_branch_valid;
};

ExponentTable exponents(double alpha, double kappa, double lambda, double gamma, int d, double s);

}  // namespace torusgas
