#pragma once

#include <span>
#include <string>
#include <vector>

#include "torusgas/equilibrium.hpp"
#include "torusgas/grid.hpp"
#include "torusgas/interpolation.hpp"
#include "torusgas/kernels.hpp"

namespace torusgas {

// N labelled points in [0,T)^d, stored point-major (x_0, y_0, x_1, y_1, ...).
class Configuration {
 public:
  Configuration(int dim, double side, std::vector<double> coords);
  // Wraps arbitrary coordinates into [0,T).
  static Configuration wrapped(int dim, double side, std::vector<double> coords);

  int dim() const { return dim_; }
  double side() const { return side_; }
  std::size_t size() const { return coords_.size() / dim_; }
  const double* point(std::size_t i) const { return coords_.data() + i * dim_; }
  std::span<const double> coords() const { return coords_; }

  Configuration translated(std::span<const double> shift) const;
  Configuration permuted(std::span<const std::size_t> order) const;
  // Smallest torus distance between two distinct points (inf for N < 2).
  double min_distance() const;

 private:
  int dim_;
  double side_;
  std::vector<double> coords_;
};

double torus_distance(const double* a, const double* b, int dim, double side);

// CSV: "# d=<d> T=<T>" line, header "x0[,x1[,x2]]", one point per row.
void write_configuration_csv(const Configuration& config, const std::string& path);
Configuration read_configuration_csv(const std::string& path);

// ẽ(m) = N^{-1} Σ_i e^{-2πi m·x_i/T} on the box |m_k| <= cutoff.
class EmpiricalMoments {
 public:
  EmpiricalMoments(int dim, int cutoff, std::vector<Complex> coeffs);
  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  Complex at(const std::array<int, 3>& m) const;
  std::span<const Complex> coeffs() const { return coeffs_; }

 private:
  int dim_;
  int cutoff_;
  std::vector<Complex> coeffs_;
};

EmpiricalMoments empirical_moments(const Configuration& config, int cutoff);
// Moments on the lattice of `grid` in FFT order (Nyquist index holds m = -n/2).
std::vector<Complex> empirical_moments_on_grid(const Configuration& config, const TorusGrid& grid);

// Tabulated real-space g with multilinear lookup. The table comes from
// evaluate_g_real; coincidences closer than spacing/16 are refused.
class PairInteraction {
 public:
  explicit PairInteraction(const KernelSpec& kernel, int n = 0, const RealSpaceOptions& options = {});

  double operator()(const double* dx) const { return interp_(dx); }
  int dim() const { return dim_; }
  double side() const { return side_; }
  double min_separation() const { return min_sep_; }
  bool singular() const { return table_.singular_at_origin; }
  const RealSpaceKernel& table() const { return table_; }

  static int default_resolution(int dim);

 private:
  int dim_;
  double side_;
  RealSpaceKernel table_;
  PeriodicInterpolator interp_;
  double min_sep_;
};

// Throws CoincidentPoints if two points are closer than the table allows.
void require_separated(const PairInteraction& pair, const Configuration& config);

// ℰ^≠(emp) = N^{-2} Σ_{i≠j} g(x_i - x_j).
double pair_energy(const PairInteraction& pair, const Configuration& config);
// Σ_{i≠j} g(x_i - x_j) + N Σ_i V(x_i).
double hamiltonian(const PairInteraction& pair, const PeriodicInterpolator& V, const Configuration& config);
double hamiltonian(const PairInteraction& pair, const Potential& V, const Configuration& config);

// N^{-1} Σ_i f(x_i).
double empirical_mean(const PeriodicInterpolator& f, const Configuration& config);

// F_N(X, μ) = ℰ^≠(emp) - 2𝒢(emp, μ) + ℰ(μ), 𝒢 via interpolated h(μ).
double f_energy(const PairInteraction& pair, const KernelSpec& kernel, const Configuration& config,
                const ProbabilityDensity& mu);

// The three fields the splitting formula consumes, prepared once per reference
// measure so many configurations can be checked cheaply.
struct SplittingReference {
  std::string label;
  ProbabilityDensity mu;
  // ℰ_V(μ_∞) or ℰ_V^θ(μ_θ).
  double energy;
  double self_energy;  // ℰ(μ)
  PeriodicInterpolator h_mu;
  PeriodicInterpolator zeta;
  PeriodicInterpolator V;
};

// ζ_∞ = V + 2h(μ_∞) - c_∞ with c_∞ = ∫(2h + V) dμ_∞.
SplittingReference splitting_reference(const KernelSpec& kernel, const Potential& V, const EquilibriumApprox& eq);
// ζ_θ = -θ^{-1} log μ_θ.
SplittingReference splitting_reference(const KernelSpec& kernel, const Potential& V, const ThermalEquilibrium& th);

struct SplittingTerms {
  double hamiltonian;
  double mean_field;  // N² ℰ_V^{(θ)}(μ)
  double f_energy;    // N² F_N
  double zeta;        // N² ∫ζ d emp
  double defect;      // |H - sum| / max(1, |H|)
};

SplittingTerms splitting_check(const PairInteraction& pair, const SplittingReference& ref, const Configuration& config);

// Fluct[f] = N^{-1} Σ f(x_i) - ∫ f dμ_ref.
double fluctuation(const Configuration& config, const GridField& f, const ProbabilityDensity& reference);

// Fluctuation observable with interpolator and reference mean precomputed.
class FluctuationObservable {
 public:
  FluctuationObservable(const GridField& f, const ProbabilityDensity& reference);
  double operator()(const Configuration& config) const { return empirical_mean(interp_, config) - mean_; }
  double reference_mean() const { return mean_; }
  const GridField& f() const { return f_; }

 private:
  GridField f_;
  PeriodicInterpolator interp_;
  double mean_;
};

}  // namespace torusgas
