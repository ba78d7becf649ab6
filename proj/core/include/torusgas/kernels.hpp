#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "torusgas/grid.hpp"

namespace torusgas {

// |g(x)| <= C|x|^{-s} near the origin.
struct PowerLawSingularity {
  double s;
};
// |g(x)| <= C|log|x|| near the origin.
struct LogarithmicSingularity {};
// g continuous (γ > d): nothing to exclude.
struct BoundedKernel {};
using Singularity = std::variant<PowerLawSingularity, LogarithmicSingularity, BoundedKernel>;

std::string describe(const Singularity& s);
// s for the power-law case, 0 for logarithmic/bounded kernels.
double singularity_exponent(const Singularity& s);

using LatticePoint = std::array<int, 3>;

// Interaction kernel through its Fourier coefficients ĝ(m), bound to a torus
// dimension and side. Immutable; safe to share between threads provided the
// coefficient rule is pure.
class KernelSpec {
 public:
  using Rule = std::function<double(const LatticePoint& m)>;

  KernelSpec(std::string name, int dim, double side, Rule rule, double zero_mode, double gamma, double lambda,
             Singularity singularity, std::vector<std::pair<std::string, double>> parameters = {});

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double side() const { return side_; }
  double zero_mode() const { return zero_mode_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  const Singularity& singularity() const { return singularity_; }
  const std::vector<std::pair<std::string, double>>& parameters() const { return parameters_; }

  double coefficient(const LatticePoint& m) const;
  // ĝ on the grid lattice in FFT order. Throws NonPositiveCoefficient if any
  // resolved coefficient is <= 0 or not finite.
  std::vector<double> coefficients(const TorusGrid& grid) const;
  void require_compatible(const TorusGrid& grid) const;

 private:
  std::string name_;
  int dim_;
  double side_;
  Rule rule_;
  double zero_mode_;
  double gamma_;
  double lambda_;
  Singularity singularity_;
  std::vector<std::pair<std::string, double>> parameters_;
};

// ĝ(m) = |m|^{-γ}.
KernelSpec riesz_kernel(const TorusGrid& grid, double gamma, double zero_mode = 1.0);
// ĝ(m) = (2π|m|/T)^{-2}; h_{-1} is then -Δ.
KernelSpec coulomb_kernel(const TorusGrid& grid, double zero_mode = 1.0);
// Tabulated ĝ; entries missing for m are looked up at -m. The zero mode comes
// from the table if present, else `zero_mode`. γ, λ are fitted from the table.
KernelSpec tabulated_kernel(const TorusGrid& grid, const std::map<LatticePoint, double>& entries,
                            double zero_mode = 1.0);
// Reads "m1 [m2 [m3]] value" lines; '#' starts a comment.
KernelSpec load_tabulated_kernel(const TorusGrid& grid, const std::string& path, double zero_mode = 1.0);
// Generic rule with declared exponents (used for perturbed power laws).
KernelSpec custom_kernel(const TorusGrid& grid, std::string name, KernelSpec::Rule rule, double gamma,
                         double lambda, double zero_mode = 1.0);

// ĝ(m)^α f̂(m); the zero mode is removed when α <= 0.
SpectralField apply_h_alpha(const KernelSpec& kernel, const SpectralField& f, double alpha);
GridField apply_h_alpha(const KernelSpec& kernel, const GridField& f, double alpha);

// exp(-t/ĝ(m)) for m != 0 and 1 at m = 0; entries below 1e-300 are zero.
std::vector<double> heat_multiplier(const KernelSpec& kernel, const TorusGrid& grid, double t);

struct HeatKernelField {
  double t;
  // p(x,t) = T^{-d}(1 + Σ_{m≠0} e^{-t/ĝ(m)} e^{2πi m·x/T}); integrates to 1.
  GridField field;
};

HeatKernelField heat_kernel(const KernelSpec& kernel, const TorusGrid& grid, double t);

struct RealSpaceOptions {
  // Nodes with torus distance below exclusion*T from the origin are left out
  // of the convergence test.
  double exclusion = 1.0 / 32.0;
  double rel_tol = 1e-6;
  // Largest n per dimension the doubling may reach; 0 picks a budget by d.
  int max_n = 0;
};

struct RealSpaceKernel {
  // g sampled on the requested grid, taken from the finest level computed.
  GridField field;
  int finest_n;
  double relative_change;
  bool singular_at_origin;
};

// Spectral synthesis of g with a doubling convergence test away from the
// origin. SlowConvergence if the change never drops below rel_tol.
RealSpaceKernel evaluate_g_real(const KernelSpec& kernel, int n, const RealSpaceOptions& options = {});

struct AdmissibilityReport {
  double gamma_fit;
  double gamma_residual;
  double lambda_fit;
  double lambda_residual;
  // Tightest C, c with c|m|^{-λ} <= ĝ(m) <= C|m|^{-γ} on the resolved lattice.
  double upper_constant;
  double lower_constant;
  // Minimum of T^d·p(z,s) over nodes and the s sweep (mean-one normalization).
  double min_p;
  double argmin_s;
  double admissibility_C;
  // Resolution used for each s (grid is refined until the edge mode is damped).
  std::vector<int> resolution_per_s;
  std::vector<double> min_p_per_s;
};

AdmissibilityReport check_admissibility(const KernelSpec& kernel, const TorusGrid& grid,
                                        const std::vector<double>& s_sweep);

// n points log-spaced in [lo, hi].
std::vector<double> logspace(double lo, double hi, int count);

}  // namespace torusgas
