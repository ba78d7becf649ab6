#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "torusgas/equilibrium.hpp"
#include "torusgas/kernels.hpp"
#include "torusgas/particles.hpp"

namespace torusgas {

// Kernel and potential presets as they appear in experiment configs.
struct KernelChoice {
  std::string name = "riesz";  // riesz | coulomb | table
  double gamma = 2.0;
  double zero_mode = 1.0;
  std::string table_path;
  KernelSpec build(const TorusGrid& grid) const;
};

struct PotentialChoice {
  std::string preset = "cosine";  // zero | cosine | gaussian_well | file
  double amplitude = 0.5;
  int mode = 1;
  double sigma = 0.1;
  std::string path;
  Potential build(const TorusGrid& grid) const;

  static PotentialChoice cosine(double a) {
    PotentialChoice c;
    c.amplitude = a;
    return c;
  }
};

// Numbers behind one acceptance line. `columns`/`rows` hold the per-case
// detail that ends up in CSV; metrics are the headline values.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;
};

struct SpectralAudit {
  int fields = 50;
  int n_1d = 256;
  int n_2d = 128;
  double tol = 1e-10;
  std::uint64_t seed = 1;
};
CriterionResult audit_spectral(const SpectralAudit& a);

struct SplittingAudit {
  std::size_t n_points = 16;
  int configs = 100;
  double theta = 16.0;
  double cos_amplitude = 1.0;
  double tol = 1e-8;
  std::uint64_t seed = 2;
};
CriterionResult audit_splitting(const SplittingAudit& a);

struct ThermalAudit {
  int dim = 1;
  double side = 1.0;
  int n = 256;
  KernelChoice kernel{};
  PotentialChoice potential{};
  std::vector<double> thetas{1.0, 10.0, 100.0};
  int perturbations = 20;
  double residual_tol = 1e-8;
  double margin = -1e-10;
  std::uint64_t seed = 3;
};
CriterionResult audit_thermal(const ThermalAudit& a);

struct PartitionAudit {
  KernelChoice kernel{};
  PotentialChoice potential = PotentialChoice::cosine(0.5);
  int dim = 1;
  double side = 1.0;
  int n = 256;
  std::vector<int> n_points{2, 3};
  std::vector<double> thetas{1.0, 4.0, 16.0};
  double tol = 1e-6;
  double quadrature_tol = 1e-7;
  int quadrature_n = 32;
};
CriterionResult audit_partition(const PartitionAudit& a);

struct RegularizationAudit {
  double t_lo = 1e-4;
  double t_hi = 1e-1;
  int t_count = 13;
  std::vector<int> n_points{16, 64, 256};
  double gamma_ratio = 0.9;
  double gamma_slope = 0.5;
  std::vector<int> slope_points{64, 128, 256, 512, 1024};
  // Density whose quantiles place the points: 1 + amplitude·cos(2πx).
  double phi_amplitude = 0.5;
  double ratio_tol = 0.2;
  double slope_tol = 0.15;
};
CriterionResult audit_regularization(const RegularizationAudit& a);

struct ConstructionAudit {
  std::vector<int> n_points{32, 64, 128, 256};
  int seeds = 32;
  double p = 1.0 / 3.0;
  double a = 0.25;
  double alpha = 1.0;
  double v_amplitude = 0.5;
  double phi_amplitude = 0.6;
  double c_tol = 0.3;
  std::uint64_t seed = 6;
};
CriterionResult audit_construction(const ConstructionAudit& a);
// One configuration from the audit's target density, for inspection.
Configuration construction_sample(const ConstructionAudit& a, std::size_t n_points, std::uint64_t seed);

// Shared Monte Carlo setup of the concentration and Laplace checks.
struct GibbsAudit {
  KernelChoice kernel{};
  PotentialChoice potential = PotentialChoice::cosine(0.5);
  int dim = 1;
  double side = 1.0;
  int n = 256;
  std::size_t n_points = 32;
  // β <= 0 means 1/√N.
  double beta = 0.0;
  std::size_t samples = 10000;
  int chains = 4;
  std::size_t thin = 20;
  std::size_t burn_in = 2000;
  int test_mode = 1;  // f = cos(2π k x_1)
  std::uint64_t seed = 7;
  int threads = 1;
  std::vector<double> conc_r{0.0, 0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.15, 0.2};
  std::vector<double> laplace_r{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  double laplace_alpha = 2.0;
};
CriterionResult audit_concentration(const GibbsAudit& a);
CriterionResult audit_laplace(const GibbsAudit& a);

struct AdmissibilityAudit {
  int n_1d = 256;
  int n_2d = 64;
  std::vector<double> riesz_gammas{1.5, 2.0};
  int s_count = 9;
  double min_p_tol = -1e-8;
  double c_tol = 0.05;
};
CriterionResult audit_admissibility(const AdmissibilityAudit& a);

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int threads = 1;
};

// Criteria 1..9 in order with their default setups.
CriterionResult run_criterion(int id, const AcceptanceOptions& options);
inline constexpr int kCriteria = 9;

}  // namespace torusgas
