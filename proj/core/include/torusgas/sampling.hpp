#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "torusgas/equilibrium.hpp"
#include "torusgas/interpolation.hpp"
#include "torusgas/kernels.hpp"
#include "torusgas/particles.hpp"
#include "torusgas/statistics.hpp"

namespace torusgas {

struct GibbsParams {
  std::size_t n_points;
  double beta;
  double theta() const { return static_cast<double>(n_points) * beta; }
};

// Density ∝ exp(-β H_N) with H_N = Σ_{i≠j} g(x_i - x_j) + N Σ_i V(x_i).
class GibbsModel {
 public:
  GibbsModel(KernelSpec kernel, Potential V, GibbsParams params, std::shared_ptr<const PairInteraction> pair = nullptr);

  const GibbsParams& params() const { return params_; }
  const KernelSpec& kernel() const { return kernel_; }
  const Potential& potential() const { return V_; }
  const PairInteraction& pair() const { return *pair_; }
  const PeriodicInterpolator& potential_interpolator() const { return v_interp_; }

  double hamiltonian(const Configuration& config) const;
  // Energy carried by particle i if it sat at x: 2 Σ_{j≠i} g(x - x_j) + N V(x).
  double particle_energy(std::span<const double> coords, std::size_t i, const double* x) const;
  // Metropolis acceptance for moving particle i to y under a symmetric proposal.
  double acceptance(const Configuration& config, std::size_t i, const double* y) const;

 private:
  KernelSpec kernel_;
  Potential V_;
  GibbsParams params_;
  std::shared_ptr<const PairInteraction> pair_;
  PeriodicInterpolator v_interp_;
};

struct ChainOptions {
  // One sweep is N single-particle proposals with uniformly chosen indices.
  std::size_t sweeps = 1000;
  std::size_t burn_in = 200;
  std::size_t thin = 1;
  // Half-width of the uniform box proposal.
  double proposal_scale = 0.1;
  std::uint64_t seed = 0;
  // Adapt the scale towards 30-50% acceptance during burn-in, then freeze it.
  bool tune = true;
  std::size_t recompute_every = 1000;
};

struct ChainResult {
  std::vector<Configuration> samples;
  std::vector<double> energies;
  double acceptance_rate;
  double proposal_scale;
  std::uint64_t seed;
  double tau_energy;
  std::size_t proposals;
  // Proposals closer to another point than the pair table resolves.
  std::size_t rejected_coincident;
  // Largest relative gap between running and recomputed H.
  double max_drift;
};

ChainResult mcmc_sample(const GibbsModel& model, const ChainOptions& options, const Configuration* initial = nullptr);
// Independent chains, seeds[k] for chain k, spread over `threads` workers.
// Output order follows seeds, so pooling does not depend on scheduling.
std::vector<ChainResult> run_chains(const GibbsModel& model, const ChainOptions& options,
                                    const std::vector<std::uint64_t>& seeds, int threads);

struct QuadratureResult {
  double log_z;
  // |log Z_q - log Z_{q/2}| after Richardson extrapolation of Z.
  double change;
  int nodes;
};

// log Z by the tensor trapezoid rule on q^{dN} nodes, Richardson-extrapolated
// in q and doubled until the change is below tol. N <= 3.
QuadratureResult direct_log_partition(const GibbsModel& model, int quadrature_n = 32, double tol = 1e-7,
                                      std::size_t budget = std::size_t{1} << 33);

struct PartitionEstimates {
  double log_z;
  double normalized;           // log Z / (N²β)
  double lower_bound_thermal;  // -ℰ_V^θ(μ_θ) + ℰ(μ_θ)/N
  double lower_bound_eq;       // -ℰ_V(μ_∞) - ent[μ_∞]/θ + ℰ(μ_∞)/N
  // log Z/(N²β) + ℰ_V^θ(μ_θ), the trend column against N^{p*}.
  double gap_thermal;
  double log_k_inf;    // log Z - N²β ℰ_V(μ_∞)
  double log_k_theta;  // log Z - N²β ℰ_V^θ(μ_θ)
  double quadrature_change;
};

PartitionEstimates partition_lower_bounds(const GibbsModel& model, const ThermalEquilibrium& thermal,
                                          const EquilibriumApprox& eq, const QuadratureResult& quad);

// ℱ_{N,β}(μ^{⊗N}) = N²ℰ_V(μ) - Nℰ(μ) + (N/β) ent[μ].
double product_free_energy(const GibbsModel& model, const ProbabilityDensity& mu);

struct FreeEnergyCheck {
  double reference;  // -log Z / β
  std::vector<double> values;
  double min_defect;
};

FreeEnergyCheck free_energy_check(const GibbsModel& model, const std::vector<ProbabilityDensity>& mus, double log_z);

// ‖h_{-1/2}(f)‖²_{L²} = T^d Σ_{m≠0} |f̂(m)|²/ĝ(m).
double h_half_norm_sq(const KernelSpec& kernel, const GridField& f);
// Largest r with mu + r·direction >= 0 everywhere (inf if direction >= 0).
double positivity_radius(const ProbabilityDensity& mu, const GridField& direction);

struct ConcentrationPoint {
  double r;
  double p_hat;
  Interval p_ci;
  // -log P̂/(N²β) and its one-sided uncertainty from the Wilson upper end.
  double rate;
  double rate_ci;
  double leading;  // r²/‖h_{-1/2} f‖²
  // P̂ < 10/M: too deep in the tail to test.
  bool censored;
  bool pass;
  // R(f,r) and R̃(f,r); NaN where the tilted measure is not a density.
  double rate_term_eq;
  double rate_term_thermal;
};

struct BoundReport {
  double h_norm_sq;
  double n2beta;
  std::size_t samples;
  double tau;
  double n_eff;
  double r0_eq;
  double r0_thermal;
  std::vector<ConcentrationPoint> points;
};

// One-sided check of P(|Fluct| >= r) against exp(-N²β r²/‖h_{-1/2} f‖²).
// StationarityGateFailed if τ >= M/50.
BoundReport concentration_report(const std::vector<double>& fluct, double n2beta, double h_norm_sq,
                                 const std::vector<double>& r_grid);

// Adds R, R̃ and the positivity radii from the solved measures.
void attach_rate_terms(BoundReport& report, const KernelSpec& kernel, const GridField& f,
                       const EquilibriumApprox& eq, const ThermalEquilibrium& thermal);

struct LaplacePrediction {
  double upper;  // r²/4 ‖·‖² + (ent[μ_∞] - log|Σ|)/θ
  double lower;  // r²/4 ‖·‖² - (ent[μ_∞ + r h_{-1}(f)/2] - log|Σ|)/θ
  // μ_∞ + r h_{-1}(f)/2 >= 0 and supp h_{-1}(f) ⊂ Σ.
  bool lower_applicable;
};

LaplacePrediction laplace_prediction(const KernelSpec& kernel, const GridField& f, const EquilibriumApprox& eq,
                                     double theta, double r);

struct LaplacePoint {
  double r;
  double estimate;  // log E exp(N²β r Fluct) / (N²β)
  double std_error;
  double ess;
  bool gated;  // ESS below the floor, not tested
  double upper;
  double lower;
  bool lower_applicable;
  double allowance;
  bool pass;
};

struct LaplaceReport {
  std::vector<LaplacePoint> points;
  double slope_estimate;  // d/dr log E exp(N²β r Fluct) at r = 0
  double slope_expected;  // N²β mean(Fluct)
  double slope_std_error;
  bool slope_pass;
  bool convex;
};

struct LaplaceOptions {
  int blocks = 20;
  double ess_floor = 100.0;
  double z = 3.0;
  // Ĉ N^{p*} part of the allowance.
  double rate_allowance = 0.0;
  double slope_step = 1e-3;
};

LaplaceReport laplace_report(const std::vector<double>& fluct, double n2beta, const std::vector<double>& r_grid,
                             const std::vector<LaplacePrediction>& predictions, const LaplaceOptions& options = {});

}  // namespace torusgas
