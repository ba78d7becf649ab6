#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "torusgas/verification.hpp"

namespace torusgas::cli {

inline constexpr int kSchemaVersion = 1;

struct SamplingSection {
  std::size_t samples = 10000;
  int chains = 4;
  std::size_t thin = 20;
  std::size_t burn_in = 2000;
  double proposal_scale = 0.1;
  std::size_t recompute_every = 1000;
};

// One run's worth of settings. Every field has a default, so `{}` is a valid
// config; unknown keys anywhere are rejected.
struct ExperimentConfig {
  int dim = 1;
  double side = 1.0;
  int n = 256;
  KernelChoice kernel{};
  PotentialChoice potential = PotentialChoice::cosine(0.5);
  std::size_t n_points = 32;
  // β; 0 means 1/√N unless theta is given.
  double beta = 0.0;
  double theta = 0.0;
  double solver_tol = 1e-10;
  int solver_max_iter = 400;
  std::vector<double> theta_ladder{1.0, 10.0, 100.0, 1e3, 1e4};
  double support_threshold = 1e-3;
  SamplingSection sampling{};
  int test_mode = 1;
  std::vector<double> conc_r = GibbsAudit{}.conc_r;
  std::vector<double> laplace_r = GibbsAudit{}.laplace_r;
  double laplace_alpha = 2.0;
  std::vector<double> s_sweep = logspace(1e-4, 1.0, 9);
  SpectralAudit spectral{};
  SplittingAudit splitting{};
  ThermalAudit thermal{};
  PartitionAudit partition{};
  RegularizationAudit regularization{};
  ConstructionAudit construction{};
  AdmissibilityAudit admissibility{};
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  double resolved_beta() const;
  GibbsAudit gibbs_audit(int threads) const;
  EquilibriumOptions equilibrium_options() const;
};

// Throws ConfigError naming the offending key path (e.g. "sampling.thin").
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
// Every effective value, in the same schema parse_config accepts.
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace torusgas::cli
