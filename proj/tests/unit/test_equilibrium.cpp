#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "torusgas/equilibrium.hpp"
#include "torusgas/errors.hpp"
#include "torusgas/spectral.hpp"

using namespace torusgas;

namespace {

constexpr double kPi = std::numbers::pi;

ProbabilityDensity perturbed(const ProbabilityDensity& mu, unsigned seed, double eps) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const auto& g = mu.grid();
  // Smooth random factor exp(eps Σ_{k≤4} a_k cos(2πkx) + b_k sin(2πkx)).
  double a[5], b[5];
  for (int k = 0; k < 5; ++k) a[k] = nd(rng), b[k] = nd(rng);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.node(i)[0], s = 0.0;
    for (int k = 1; k < 5; ++k) s += a[k] * std::cos(2 * kPi * k * x) + b[k] * std::sin(2 * kPi * k * x);
    v[i] = mu[i] * std::exp(eps * s);
  }
  return ProbabilityDensity::normalized(GridField(g, v));
}

}  // namespace

TEST(Potential, Presets) {
  TorusGrid g(2, 16);
  auto c = Potential::cosine(g, 0.5, 2);
  EXPECT_NEAR(c.field()[0], 1.0, 1e-15);
  auto w = Potential::gaussian_well(g, 2.0, 0.1);
  EXPECT_NEAR(w.field().min(), -2.0, 1e-15);
  EXPECT_EQ(Potential::zero(g).field().sup_norm(), 0.0);
}

TEST(SolveThermal, ZeroPotentialIsUniform) {
  for (double T : {1.0, 2.0}) {
    TorusGrid g(1, 64, T);
    auto k = riesz_kernel(g, 2.0, 1.3);
    for (double theta : {0.5, 16.0}) {
      auto th = solve_thermal(k, Potential::zero(g), theta);
      for (double v : th.mu.values()) EXPECT_NEAR(v, 1.0 / T, 1e-14);
      EXPECT_NEAR(th.c_theta, 2 * 1.3 / T + std::log(1.0 / T) / theta, 1e-13);
      EXPECT_LT(th.residual, 1e-12);
    }
  }
}

TEST(SolveThermal, CosinePotentialConvergesAndBeatsUniform) {
  TorusGrid g(1, 256);
  auto k = riesz_kernel(g, 2.0);
  auto V = Potential::cosine(g, 1.0);
  auto th = solve_thermal(k, V, 1.0);
  EXPECT_LT(th.residual, 1e-8);
  auto unif = ProbabilityDensity::uniform(g);
  EXPECT_LE(energy_thermal(k, V, 1.0, th.mu), energy_thermal(k, V, 1.0, unif));
  auto check = thermal_foc(k, V, 1.0, th.mu, th.log_mu);
  EXPECT_NEAR(check.c, th.c_theta, 1e-14);
}

TEST(SolveThermal, SmallThetaOneStepOracle) {
  TorusGrid g(1, 128);
  auto k = riesz_kernel(g, 2.0);
  auto V = Potential::cosine(g, 1.0);
  const double theta = 1e-4;
  auto th = solve_thermal(k, V, theta);
  // h(uniform) is constant, so the one-step density is normalize(e^{-θV}).
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-theta * V.field()[i]);
  auto oracle = ProbabilityDensity::normalized(GridField(g, v));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(th.mu[i], oracle[i], 1e-5);
}

TEST(SolveThermal, LargeThetaNewton) {
  TorusGrid g(1, 256);
  auto k = riesz_kernel(g, 2.0);
  auto V = Potential::cosine(g, 4.0);
  for (double theta : {1e2, 1e4}) {
    auto th = solve_thermal(k, V, theta);
    EXPECT_LT(th.residual, 1e-10) << theta;
    // μ_θ > 0 in exact arithmetic; deep in the vacated region it underflows,
    // log μ_θ stays finite.
    EXPECT_GE(th.mu.field().min(), 0.0);
    EXPECT_TRUE(std::isfinite(th.log_mu.min()));
  }
}

TEST(SolveThermal, TwoDimensionalCoulomb) {
  TorusGrid g(2, 32);
  auto k = coulomb_kernel(g);
  auto V = Potential::gaussian_well(g, 1.0, 0.15);
  auto th = solve_thermal(k, V, 50.0);
  EXPECT_LT(th.residual, 1e-10);
}

TEST(SolveThermal, Minimality) {
  TorusGrid g(1, 256);
  auto k = riesz_kernel(g, 2.0);
  auto V = Potential::cosine(g, 1.0);
  const double theta = 4.0;
  auto th = solve_thermal(k, V, theta);
  double e0 = energy_thermal(k, V, theta, th.mu);
  for (unsigned s = 0; s < 20; ++s) {
    auto mu = perturbed(th.mu, s, 0.2);
    EXPECT_GE(energy_thermal(k, V, theta, mu) - e0, -1e-10);
  }
}

TEST(SolveThermal, ReportsNoConvergence) {
  TorusGrid g(1, 256);
  auto k = riesz_kernel(g, 2.0);
  ThermalOptions opt;
  opt.max_iter = 2;
  opt.warmup_iter = 2;
  EXPECT_THROW(solve_thermal(k, Potential::cosine(g, 4.0), 1e3, opt), NoConvergence);
  opt.damping = 1.5;
  EXPECT_THROW(solve_thermal(k, Potential::cosine(g, 4.0), 1e3, opt), InvalidArgument);
}

TEST(Energies, ZeroPotentialUniform) {
  TorusGrid g(1, 64);
  auto k = riesz_kernel(g, 2.0);
  auto u = ProbabilityDensity::uniform(g);
  EXPECT_NEAR(energy_mean_field(k, Potential::zero(g), u), 1.0, 1e-14);
  EXPECT_NEAR(energy_thermal(k, Potential::zero(g), 3.0, u), 1.0, 1e-14);
}

TEST(Energies, ReflectionSymmetryForEvenPotential) {
  TorusGrid g(1, 128);
  auto k = riesz_kernel(g, 1.5);
  auto V = Potential::cosine(g, 0.7, 2);
  auto mu = perturbed(ProbabilityDensity::uniform(g), 3, 0.5);
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = mu[(g.size() - i) % g.size()];
  ProbabilityDensity mr(GridField(g, r));
  EXPECT_NEAR(energy_mean_field(k, V, mu), energy_mean_field(k, V, mr), 1e-13);
}

TEST(SolveEquilibrium, ZeroPotential) {
  TorusGrid g(1, 64);
  auto k = riesz_kernel(g, 2.0);
  auto eq = solve_equilibrium(k, Potential::zero(g));
  EXPECT_NEAR(eq.sigma_measure, 1.0, 1e-15);
  EXPECT_LT(eq.zeta.sup_norm(), 1e-12);
  for (double v : eq.mu.values()) EXPECT_NEAR(v, 1.0, 1e-13);
}

TEST(SolveEquilibrium, WeakCosineMatchesLinearSolve) {
  TorusGrid g(1, 256);
  auto k = riesz_kernel(g, 2.0);
  const double a = 0.5;
  auto V = Potential::cosine(g, a);
  EquilibriumOptions opt;
  opt.theta_ladder = {1, 10, 100, 1e3, 1e4, 1e5, 1e6, 1e7};
  auto eq = solve_equilibrium(k, V, opt);
  // μ̂(m) = -V̂(m)/(2ĝ(m)) for m ≠ 0: μ = 1 - (a/2) cos(2πx).
  auto vh = forward_transform(V.field());
  auto gh = k.coefficients(g);
  std::vector<Complex> c(g.size());
  c[0] = 1.0;
  for (std::size_t i = 1; i < g.size(); ++i) c[i] = -vh[i] / (2.0 * gh[i]);
  auto oracle = inverse_transform(SpectralField(g, c));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(eq.mu[i], oracle[i], 1e-6);
  EXPECT_NEAR(eq.sigma_measure, 1.0, 1e-15);
}

TEST(SolveEquilibrium, StrongPotentialVacatesRegion) {
  TorusGrid g(1, 256);
  auto k = riesz_kernel(g, 2.0);
  auto V = Potential::cosine(g, 4.0);
  EquilibriumOptions opt;
  opt.theta_ladder = {1, 10, 100, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  auto eq = solve_equilibrium(k, V, opt);
  EXPECT_LT(eq.sigma_measure, 0.95);
  EXPECT_GT(eq.sigma_measure, 0.3);
  EXPECT_GE(eq.zeta_min(), -1e-6);
  EXPECT_LE(eq.zeta_max_on_support(), 1e-6);
  // ζ strictly positive well inside the vacated region (around x = 0).
  EXPECT_GT(eq.zeta[0], 1e-2);
  // Jensen: ent[μ_∞] ≥ log(1/|Σ|).
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = eq.sigma_mask[i] / eq.sigma_measure;
  ProbabilityDensity usig(GridField(g, u));
  EXPECT_GE(relative_entropy(eq.mu, usig), 0.0);
  EXPECT_EQ(eq.sensitivity.size(), 3u);
}

TEST(SolveEquilibrium, DefaultLadderResidualIsReported) {
  TorusGrid g(1, 128);
  auto k = riesz_kernel(g, 2.0);
  auto eq = solve_equilibrium(k, Potential::cosine(g, 4.0));
  EXPECT_EQ(eq.rung_residuals.size(), 5u);
  for (double r : eq.rung_residuals) EXPECT_LT(r, 1e-10);
  EXPECT_THROW(solve_equilibrium(k, Potential::zero(g), EquilibriumOptions{{10.0, 1.0}}), InvalidArgument);
}

TEST(ZetaWeights, TrivialAndTrend) {
  TorusGrid g(1, 128);
  auto k = riesz_kernel(g, 2.0);
  auto flat = solve_equilibrium(k, Potential::zero(g));
  auto w0 = zeta_weights(flat, 100.0);
  EXPECT_NEAR(w0.z, 1.0, 1e-10);
  for (double r : w0.rho.values()) EXPECT_NEAR(r, 1.0, 1e-10);

  EquilibriumOptions opt;
  opt.theta_ladder = {1, 10, 100, 1e3, 1e4, 1e5};
  auto eq = solve_equilibrium(k, Potential::cosine(g, 4.0), opt);
  double prev = std::numeric_limits<double>::infinity();
  for (double theta : {10.0, 100.0, 1e3, 1e4}) {
    auto w = zeta_weights(eq, theta);
    EXPECT_NEAR(w.p.field().integral(), 1.0, 1e-12);
    double gap = std::abs(w.z - eq.sigma_measure);
    EXPECT_LT(gap, prev) << theta;
    prev = gap;
  }
}
