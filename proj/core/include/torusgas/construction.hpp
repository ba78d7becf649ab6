#pragma once

#include <cstdint>
#include <vector>

#include "torusgas/grid.hpp"
#include "torusgas/kernels.hpp"
#include "torusgas/particles.hpp"

namespace torusgas {

struct ConstructionParams {
  // η̄ = T·N^{-p} before rounding to a whole number of cubes per side; p < 1/d.
  double p = 0.25;
  // Exclusion fraction, τ_j = a η̄ n_j^{-1/d}.
  double a = 0.25;
  std::uint64_t seed = 0;
  // Rejected draws allowed per point before PlacementFailure.
  int max_retries = 100000;
};

struct CubeLayout {
  int per_side;
  double eta_bar;
  // φ(K_j) and n_j, cubes in row-major order (last axis fastest).
  std::vector<double> masses;
  std::vector<int> counts;
  std::vector<double> tau;
};

// n_j = ⌊N w_j⌋ plus one for the largest remainders until Σ n_j = N. Ties go
// to the lower cube index.
std::vector<int> largest_remainder(const std::vector<double>& weights, std::size_t n_points);

CubeLayout cube_layout(const ProbabilityDensity& phi, std::size_t n_points, const ConstructionParams& params);

struct Construction {
  Configuration config;
  CubeLayout layout;
  std::vector<int> cube_of_point;
  // Σ over placements of log(((η̄-2τ)^d - i ω_d τ^d)/η̄^d), i points already in
  // the cube: the volume fraction still available to the i-th point.
  double log_volume_ratio;
  std::size_t draws;
};

// Sequential rejection placement: each cube receives n_j points inside K_j
// shrunk by τ_j, pairwise at least τ_j apart.
Construction generate(const ProbabilityDensity& phi, std::size_t n_points, const ConstructionParams& params,
                      const GridField* support_mask = nullptr);

struct TestErrorCheck {
  double err;       // |N^{-1} Σ f(x_i) - ∫ f φ|
  // Worst case of err over every placement with the same cube counts and τ.
  double envelope;
  double norm;      // ‖f‖_{W^α}
  double shape;     // N^{-αp} ‖f‖_{W^α}
};

struct ConstructionReport {
  std::size_t n_points;
  double min_separation;
  // a η̄ max_j n_j^{-1/d}
  double separation_bound;
  // min_separation · N^{1/d}
  double r_achieved;
  bool separation_ok;
  bool counts_ok;
  double f_energy;       // F_N(X, μ)
  double target_energy;  // ℰ(φ - μ)
  double energy_defect;
  std::vector<TestErrorCheck> test_errors;
};

ConstructionReport verify(const Construction& c, const ProbabilityDensity& phi, const std::vector<GridField>& f_list,
                          double alpha, const ConstructionParams& params, const KernelSpec& kernel,
                          const PairInteraction& pair, const ProbabilityDensity& mu);

}  // namespace torusgas
