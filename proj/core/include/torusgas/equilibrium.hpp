#pragma once

#include <string>
#include <vector>

#include "torusgas/grid.hpp"
#include "torusgas/kernels.hpp"

namespace torusgas {

// Confining potential on a grid. Lower semicontinuity cannot be checked on a
// grid and is assumed; integrability is automatic.
class Potential {
 public:
  Potential(GridField field, std::string description);

  static Potential zero(const TorusGrid& grid);
  // a Σ_k cos(2π k x_i / T) summed over axes i.
  static Potential cosine(const TorusGrid& grid, double a, int k = 1);
  // -a exp(-|x - c|²/(2σ²)) with c the torus centre, periodized by minimum image.
  static Potential gaussian_well(const TorusGrid& grid, double a, double sigma);
  static Potential from_file(const TorusGrid& grid, const std::string& path);

  const GridField& field() const { return field_; }
  const TorusGrid& grid() const { return field_.grid(); }
  const std::string& description() const { return description_; }
  Potential shifted(double c) const;

 private:
  GridField field_;
  std::string description_;
};

// h(μ) = g * μ on the grid (multiplier ĝ, zero mode kept).
GridField interaction_potential(const KernelSpec& kernel, const GridField& density);

// ℰ_V(μ) = ℰ(μ) + ∫V dμ.
double energy_mean_field(const KernelSpec& kernel, const Potential& V, const ProbabilityDensity& mu);
// ℰ_V^θ(μ) = ℰ_V(μ) + θ^{-1} ent[μ].
double energy_thermal(const KernelSpec& kernel, const Potential& V, double theta, const ProbabilityDensity& mu);

struct ThermalOptions {
  double tol = 1e-10;
  int max_iter = 400;
  double damping = 0.5;
  // Damped fixed-point sweeps before switching to Newton.
  int warmup_iter = 25;
  double cg_rel_tol = 1e-14;
  int cg_max_iter = 4000;
};

struct ThermalEquilibrium {
  ProbabilityDensity mu;
  // log μ_θ kept separately: it is finite even where μ underflows.
  GridField log_mu;
  double c_theta;
  double theta;
  // sup |2h(μ) + V + θ^{-1} log μ - c_θ|, recomputed from scratch on return.
  double residual;
  int iterations;
  int newton_iterations;
  double damping_final;
};

ThermalEquilibrium solve_thermal(const KernelSpec& kernel, const Potential& V, double theta,
                                 const ThermalOptions& options = {}, const GridField* initial_log_density = nullptr);
ThermalEquilibrium solve_thermal(const KernelSpec& kernel, const Potential& V, double theta, double tol, int max_iter,
                                 double damping);

// FOC field 2h(μ) + V + θ^{-1} log μ and its μ-average.
struct FocCheck {
  double c;
  double residual;
};
FocCheck thermal_foc(const KernelSpec& kernel, const Potential& V, double theta, const ProbabilityDensity& mu,
                     const GridField& log_mu);

struct SupportSensitivity {
  double threshold;
  double measure;
  std::size_t nodes;
};

struct EquilibriumOptions {
  std::vector<double> theta_ladder{1.0, 10.0, 100.0, 1e3, 1e4};
  double support_threshold = 1e-3;
  ThermalOptions thermal{};
};

struct EquilibriumApprox {
  ProbabilityDensity mu;
  double c_inf;
  // 1 on Σ, 0 elsewhere.
  GridField sigma_mask;
  double sigma_measure;
  std::vector<double> theta_ladder;
  // ζ_∞ = V + 2h(μ_∞) - c_∞, unclipped.
  GridField zeta;
  std::vector<double> rung_residuals;
  std::vector<SupportSensitivity> sensitivity;
  // The last rung, used as the smooth stand-in for μ_∞.
  ThermalEquilibrium final_rung;

  double zeta_min() const;
  double zeta_max_on_support() const;
};

EquilibriumApprox solve_equilibrium(const KernelSpec& kernel, const Potential& V, const EquilibriumOptions& options = {});

struct ZetaWeights {
  GridField rho;
  double z;
  ProbabilityDensity p;
};

ZetaWeights zeta_weights(const EquilibriumApprox& eq, double theta);

}  // namespace torusgas
