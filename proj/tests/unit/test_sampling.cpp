#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "torusgas/equilibrium.hpp"
#include "torusgas/errors.hpp"
#include "torusgas/sampling.hpp"
#include "torusgas/spectral.hpp"

using namespace torusgas;

namespace {

constexpr double kPi = std::numbers::pi;

double bernoulli_g(double x) {
  x -= std::floor(x);
  return 1.0 + 2.0 * kPi * kPi * (x * x - x + 1.0 / 6.0);
}

// One table shared by every model: riesz γ = 2 on the unit circle.
class Gibbs1d : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    grid_ = new TorusGrid(1, 256);
    kernel_ = new KernelSpec(riesz_kernel(*grid_, 2.0));
    pair_ = std::make_shared<const PairInteraction>(*kernel_, 1 << 16);
  }
  static void TearDownTestSuite() {
    delete kernel_;
    delete grid_;
    pair_.reset();
  }
  GibbsModel model(std::size_t n, double beta, double a = 0.0) const {
    return GibbsModel(*kernel_, a == 0.0 ? Potential::zero(*grid_) : Potential::cosine(*grid_, a), {n, beta}, pair_);
  }
  static TorusGrid* grid_;
  static KernelSpec* kernel_;
  static std::shared_ptr<const PairInteraction> pair_;
};
TorusGrid* Gibbs1d::grid_ = nullptr;
KernelSpec* Gibbs1d::kernel_ = nullptr;
std::shared_ptr<const PairInteraction> Gibbs1d::pair_;

}  // namespace

TEST_F(Gibbs1d, HighTemperatureIsUniform) {
  auto m = model(8, 1e-6, 1.0);
  ChainOptions o;
  o.sweeps = 2000;
  o.burn_in = 100;
  o.thin = 10;
  o.seed = 11;
  auto res = mcmc_sample(m, o);
  std::vector<double> xs;
  // One coordinate per kept sample keeps the draws close to independent.
  for (std::size_t k = 0; k < res.samples.size(); ++k) xs.push_back(res.samples[k].point(k % 8)[0]);
  EXPECT_GT(ks_uniform(xs).p_value, 1e-3);
}

TEST_F(Gibbs1d, SingleParticleMatchesBessel) {
  // N = 1: density ∝ exp(-β a cos 2πx), so E cos 2πx = -I1(βa)/I0(βa).
  const double beta = 2.0;
  auto m = model(1, beta, 1.0);
  ChainOptions o;
  o.sweeps = 200000;
  o.burn_in = 1000;
  o.proposal_scale = 0.3;
  o.seed = 5;
  auto res = mcmc_sample(m, o);
  std::vector<double> c;
  for (const auto& s : res.samples) c.push_back(std::cos(2.0 * kPi * s.point(0)[0]));
  const double tau = autocorrelation_time(c);
  const double se = std::sqrt(variance(c) * tau / c.size());
  const double exact = -std::cyl_bessel_i(1.0, beta) / std::cyl_bessel_i(0.0, beta);
  EXPECT_NEAR(mean(c), exact, 4.0 * se);
}

TEST_F(Gibbs1d, IncrementalEnergyDoesNotDrift) {
  auto m = model(16, 0.5, 1.0);
  ChainOptions o;
  o.sweeps = 300;
  o.burn_in = 50;
  o.recompute_every = 100;
  o.seed = 2;
  WarningCapture cap;
  auto res = mcmc_sample(m, o);
  EXPECT_LT(res.max_drift, 1e-6);
  EXPECT_FALSE(cap.contains("EnergyDrift"));
  EXPECT_GT(res.acceptance_rate, 0.1);
  EXPECT_NEAR(res.energies.back(), m.hamiltonian(res.samples.back()), 1e-6 * std::abs(res.energies.back()) + 1e-9);
}

TEST_F(Gibbs1d, DetailedBalanceIsExact) {
  auto m = model(6, 0.7, 0.5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> c(6);
    for (auto& x : c) x = u(rng);
    Configuration a(1, 1.0, c);
    const std::size_t i = trial % 6;
    double y = u(rng);
    c[i] = y;
    Configuration b(1, 1.0, c);
    double x = a.point(i)[0];
    const double lhs = m.acceptance(a, i, &y) / m.acceptance(b, i, &x);
    const double rhs = std::exp(-0.7 * (m.hamiltonian(b) - m.hamiltonian(a)));
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
  }
}

TEST_F(Gibbs1d, ChainsAreReproducibleAcrossThreadCounts) {
  auto m = model(8, 0.3, 1.0);
  ChainOptions o;
  o.sweeps = 50;
  o.burn_in = 20;
  auto one = run_chains(m, o, {1, 2, 3}, 1);
  auto many = run_chains(m, o, {1, 2, 3}, 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(one[k].seed, many[k].seed);
    EXPECT_EQ(one[k].energies, many[k].energies);
  }
  EXPECT_NE(one[0].energies, one[1].energies);
}

TEST_F(Gibbs1d, LogPartitionAtZeroCoupling) {
  // β → 0: Z → T^{dN}, and the first correction is -β E_unif[H] = -β N(N-1) ĝ(0).
  auto m = model(3, 1e-9, 1.0);
  auto q = direct_log_partition(m, 16, 1e-14);
  EXPECT_NEAR(q.log_z, -1e-9 * 6.0, 1e-13);
}

TEST_F(Gibbs1d, TwoParticlesReduceToOneIntegral) {
  // V = 0, N = 2: Z = ∫∫ exp(-2β g(x-y)) = ∫ exp(-2β g(u)) du, with g the
  // Bernoulli closed form, integrated by composite Gauss-Legendre.
  const double beta = 0.8;
  auto m = model(2, beta);
  auto q = direct_log_partition(m, 32, 1e-11);
  const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                        0.2369268850561891};
  const int panels = 400;
  double z = 0.0;
  for (int p = 0; p < panels; ++p)
    for (int k = 0; k < 5; ++k) {
      const double u = (p + 0.5 * (xs[k] + 1.0)) / panels;
      z += ws[k] * 0.5 / panels * std::exp(-2.0 * beta * bernoulli_g(u));
    }
  EXPECT_NEAR(q.log_z, std::log(z), 1e-8);
}

TEST_F(Gibbs1d, LogPartitionIsConvexInBeta) {
  // d²/dβ² log Z = Var H >= 0.
  std::vector<double> lz;
  for (double beta : {0.5, 1.0, 1.5}) lz.push_back(direct_log_partition(model(3, beta, 1.0), 16).log_z);
  EXPECT_GT(lz[0] - 2.0 * lz[1] + lz[2], 0.0);
}

TEST_F(Gibbs1d, BudgetIsEnforced) {
  EXPECT_THROW(direct_log_partition(model(3, 1.0, 1.0), 64, 1e-30, 1 << 20), BudgetExceeded);
  EXPECT_THROW(direct_log_partition(model(4, 1.0), 8), InvalidArgument);
}

TEST_F(Gibbs1d, PartitionLowerBoundsAndFreeEnergyHold) {
  EquilibriumOptions eo;
  auto eq = solve_equilibrium(*kernel_, Potential::cosine(*grid_, 1.0), eo);
  for (std::size_t n : {2u, 3u}) {
    for (double theta : {1.0, 4.0, 16.0}) {
      auto m = model(n, theta / n, 1.0);
      auto th = solve_thermal(*kernel_, m.potential(), theta);
      auto quad = direct_log_partition(m, 32);
      auto p = partition_lower_bounds(m, th, eq, quad);
      EXPECT_GE(p.normalized, p.lower_bound_thermal - 1e-9) << n << " " << theta;
      EXPECT_GE(p.normalized, p.lower_bound_eq - 1e-9) << n << " " << theta;
      // Gibbs variational principle for product trial measures.
      auto fe = free_energy_check(m, {ProbabilityDensity::uniform(*grid_), th.mu, eq.mu}, quad.log_z);
      EXPECT_GE(fe.min_defect, -1e-8);
    }
  }
  auto m = model(2, 1.0, 1.0);
  auto wrong = solve_thermal(*kernel_, m.potential(), 3.0);
  auto quad = direct_log_partition(m, 16, 1e-6);
  EXPECT_THROW(partition_lower_bounds(m, wrong, eq, quad), InvalidArgument);
}

TEST(SamplingHelpers, HalfNormOfCosine) {
  TorusGrid g(1, 64);
  auto f = GridField::from_function(g, [](auto x) { return std::cos(2.0 * kPi * x[0]); });
  EXPECT_NEAR(h_half_norm_sq(riesz_kernel(g, 2.0), f), 0.5, 1e-13);
  // Second harmonic: ĝ(2) = 1/4 quadruples the weight.
  auto f2 = GridField::from_function(g, [](auto x) { return std::cos(4.0 * kPi * x[0]); });
  EXPECT_NEAR(h_half_norm_sq(riesz_kernel(g, 2.0), f2), 2.0, 1e-12);
  auto mu = ProbabilityDensity::uniform(g);
  EXPECT_NEAR(positivity_radius(mu, f), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(positivity_radius(mu, GridField(g, 1.0))));
}

TEST(SamplingHelpers, ConcentrationAtZeroRadius) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  std::vector<double> x(5000);
  for (auto& v : x) v = 0.01 * n01(rng);
  auto rep = concentration_report(x, 100.0, 0.5, {0.0, 0.01, 1.0});
  EXPECT_EQ(rep.points[0].p_hat, 1.0);
  EXPECT_EQ(rep.points[0].rate, 0.0);
  EXPECT_TRUE(rep.points[0].pass);
  EXPECT_TRUE(rep.points[2].censored);
  EXPECT_NEAR(rep.tau, 1.0, 0.2);
  // A frozen random walk fails the stationarity gate.
  std::vector<double> walk(5000);
  double s = 0.0;
  for (auto& v : walk) v = s += n01(rng);
  EXPECT_THROW(concentration_report(walk, 100.0, 0.5, {0.1}), StationarityGateFailed);
}

TEST(SamplingHelpers, LaplaceReportOnGaussianSamples) {
  // Fluct ~ N(0, s²): log E exp(a F)/(N²β) = a² s²/(2 N²β) with a = N²β r.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  const double s = 0.01, n2b = 50.0;
  std::vector<double> x(200000);
  for (auto& v : x) v = s * n01(rng);
  std::vector<double> rs{0.0, 0.5, 1.0, 1.5};
  std::vector<LaplacePrediction> pred(rs.size());
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const double exact = n2b * rs[k] * rs[k] * s * s / 2.0;
    pred[k] = {exact, exact, true};
  }
  auto rep = laplace_report(x, n2b, rs, pred);
  EXPECT_EQ(rep.points[0].estimate, 0.0);
  for (const auto& p : rep.points) EXPECT_TRUE(p.pass) << p.r;
  EXPECT_TRUE(rep.slope_pass);
  EXPECT_TRUE(rep.convex);
  std::vector<double> big{1.0, -1.0, 0.5, 0.2};
  for (int i = 0; i < 40; ++i) big.push_back(0.0);
  EXPECT_THROW(laplace_report(big, 1000.0, {1.0}, {{0, 0, true}}), OverflowGuard);
}

TEST(SamplingHelpers, LaplacePredictionAtZero) {
  TorusGrid g(1, 128);
  auto k = riesz_kernel(g, 2.0);
  auto V = Potential::cosine(g, 0.5);
  auto eq = solve_equilibrium(k, V);
  auto f = GridField::from_function(g, [](auto x) { return std::cos(2.0 * kPi * x[0]); });
  auto p = laplace_prediction(k, f, eq, 5.0, 0.0);
  EXPECT_TRUE(p.lower_applicable);
  EXPECT_NEAR(p.upper, (entropy(eq.mu) - std::log(eq.sigma_measure)) / 5.0, 1e-14);
  EXPECT_NEAR(p.lower, -p.upper, 1e-12);
  EXPECT_LE(p.lower, 0.0);
  // h_{-1}(cos) = cos for γ = 2, so the tilt leaves the density once r/2 > min μ_∞.
  EXPECT_FALSE(laplace_prediction(k, f, eq, 5.0, 10.0).lower_applicable);
}

TEST_F(Gibbs1d, ZeroPotentialBoundIsClosedForm) {
  // V = 0: μ_θ is uniform, ℰ_V^θ(μ_θ) = ĝ(0) and bound a is -ĝ(0)(1 - 1/N).
  auto eq = solve_equilibrium(*kernel_, Potential::zero(*grid_));
  for (std::size_t n : {2u, 3u}) {
    auto m = model(n, 2.0 / n);
    auto th = solve_thermal(*kernel_, m.potential(), 2.0);
    auto p = partition_lower_bounds(m, th, eq, direct_log_partition(m, 32));
    EXPECT_NEAR(p.lower_bound_thermal, -(1.0 - 1.0 / n), 1e-12);
    EXPECT_GE(p.normalized, p.lower_bound_thermal - 1e-6);
  }
}

TEST(GibbsPositive, LogPartitionDecreasesInBeta) {
  // ĝ(0) = 2 lifts g above zero and V = cos + 1 >= 0, so exp(-βH) falls
  // pointwise as β grows.
  TorusGrid grid(1, 128);
  auto kernel = riesz_kernel(grid, 2.0, 2.0);
  auto pair = std::make_shared<const PairInteraction>(kernel, 1 << 14);
  auto V = Potential::cosine(grid, 1.0).shifted(1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double beta : {0.2, 0.5, 1.0, 2.0}) {
    auto lz = direct_log_partition(GibbsModel(kernel, V, {3, beta}, pair), 16).log_z;
    EXPECT_LT(lz, prev) << beta;
    prev = lz;
  }
}

TEST_F(Gibbs1d, RandomProductMeasuresNeverBeatTheGibbsFreeEnergy) {
  auto m = model(2, 1.5, 1.0);
  auto quad = direct_log_partition(m, 32);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ProbabilityDensity> mus;
  for (int k = 0; k < 10; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng);
    mus.push_back(ProbabilityDensity::normalized(GridField::from_function(*grid_, [&](auto x) {
      return std::exp(a * std::cos(2.0 * kPi * x[0]) + b * std::sin(2.0 * kPi * x[0]) + c * std::cos(4.0 * kPi * x[0]));
    })));
  }
  auto fe = free_energy_check(m, mus, quad.log_z);
  EXPECT_GE(fe.min_defect, -1e-8);
  // The thermal equilibrium is the better product trial measure.
  auto th = solve_thermal(*kernel_, m.potential(), 3.0);
  auto pair = free_energy_check(m, {ProbabilityDensity::uniform(*grid_), th.mu}, quad.log_z);
  EXPECT_LT(pair.values[1], pair.values[0]);
}
