#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "torusgas/errors.hpp"
#include "torusgas/particles.hpp"
#include "torusgas/spectral.hpp"

using namespace torusgas;

namespace {

constexpr double kPi = std::numbers::pi;

Configuration random_config(int d, std::size_t n, unsigned seed, double side = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<double> c(n * d);
  for (auto& x : c) x = u(rng);
  return Configuration(d, side, c);
}

// Periodic Bernoulli closed form of the γ = 2, d = 1 Riesz kernel with ĝ(0) = 1.
double bernoulli_g(double x) {
  x -= std::floor(x);
  return 1.0 + 2.0 * kPi * kPi * (x * x - x + 1.0 / 6.0);
}

}  // namespace

TEST(Configuration, ValidatesAndWraps) {
  EXPECT_THROW(Configuration(1, 1.0, {0.5, 1.0}), InvalidArgument);
  EXPECT_THROW(Configuration(2, 1.0, {0.1, 0.2, 0.3}), InvalidArgument);
  EXPECT_THROW(Configuration(4, 1.0, {}), InvalidArgument);
  auto c = Configuration::wrapped(1, 2.0, {-0.5, 4.25, -1e-300});
  EXPECT_DOUBLE_EQ(c.point(0)[0], 1.5);
  EXPECT_DOUBLE_EQ(c.point(1)[0], 0.25);
  EXPECT_LT(c.point(2)[0], 2.0);
}

TEST(Configuration, TorusDistanceUsesMinimumImage) {
  Configuration c(2, 1.0, {0.05, 0.5, 0.95, 0.5});
  EXPECT_NEAR(c.min_distance(), 0.1, 1e-15);
}

TEST(Configuration, CsvRoundTrip) {
  auto c = random_config(3, 17, 5, 2.0);
  auto path = (std::filesystem::temp_directory_path() / "tg_config.csv").string();
  write_configuration_csv(c, path);
  auto r = read_configuration_csv(path);
  ASSERT_EQ(r.size(), c.size());
  EXPECT_EQ(r.dim(), 3);
  EXPECT_EQ(r.side(), 2.0);
  for (std::size_t i = 0; i < c.coords().size(); ++i) EXPECT_EQ(r.coords()[i], c.coords()[i]);
}

TEST(EmpiricalMoments, MatchDirectSum) {
  for (int d = 1; d <= 3; ++d) {
    auto c = random_config(d, 9, 10 + d, 1.5);
    const int cutoff = d == 1 ? 200 : (d == 2 ? 12 : 4);
    auto mom = empirical_moments(c, cutoff);
    std::mt19937 rng(d);
    std::uniform_int_distribution<int> u(-cutoff, cutoff);
    for (int trial = 0; trial < 40; ++trial) {
      std::array<int, 3> m{0, 0, 0};
      for (int k = 0; k < d; ++k) m[k] = u(rng);
      Complex direct = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        double ph = 0.0;
        for (int k = 0; k < d; ++k) ph += m[k] * c.point(i)[k];
        direct += std::exp(Complex(0.0, -2.0 * kPi * ph / 1.5));
      }
      direct /= static_cast<double>(c.size());
      EXPECT_LT(std::abs(mom.at(m) - direct), 1e-12) << "d=" << d;
    }
  }
}

TEST(EmpiricalMoments, LargeCutoffStaysAccurate) {
  Configuration c(1, 1.0, {0.123456789, 0.987654321});
  auto mom = empirical_moments(c, 1 << 18);
  const int m = (1 << 18) - 3;
  Complex direct = 0.5 * (std::exp(Complex(0, -2 * kPi * std::fmod(m * 0.123456789, 1.0))) +
                          std::exp(Complex(0, -2 * kPi * std::fmod(m * 0.987654321, 1.0))));
  EXPECT_LT(std::abs(mom.at({m, 0, 0}) - direct), 1e-9);
}

TEST(EmpiricalMoments, NodesAgreeWithGridTransform) {
  // Points on nodes: ẽ equals the transform of the count field scaled by n^d/N.
  TorusGrid g(2, 16, 1.0);
  std::vector<double> counts(g.size(), 0.0);
  std::vector<double> coords;
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> u(0, g.size() - 1);
  for (int i = 0; i < 11; ++i) {
    auto k = u(rng);
    counts[k] += 1.0;
    auto x = g.node(k);
    coords.push_back(x[0]);
    coords.push_back(x[1]);
  }
  for (auto& v : counts) v *= static_cast<double>(g.size()) / 11.0;
  auto spec = forward_transform(GridField(g, counts));
  auto mom = empirical_moments_on_grid(Configuration(2, 1.0, coords), g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(mom[i] - spec[i]), 1e-12);
}

class BernoulliPair : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    TorusGrid g(1, 64);
    RealSpaceOptions opts;
    opts.rel_tol = 1e-8;
    pair_ = new PairInteraction(riesz_kernel(g, 2.0), 1 << 14, opts);
  }
  static void TearDownTestSuite() { delete pair_; }
  static PairInteraction* pair_;
};
PairInteraction* BernoulliPair::pair_ = nullptr;

TEST_F(BernoulliPair, TableMatchesClosedForm) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 50; ++i) {
    double x = u(rng);
    EXPECT_NEAR((*pair_)(&x), bernoulli_g(x), 1e-6);
  }
}

TEST_F(BernoulliPair, PairEnergyTwoPoints) {
  Configuration c(1, 1.0, {0.1, 0.35});
  EXPECT_NEAR(pair_energy(*pair_, c), 0.5 * bernoulli_g(0.25), 1e-6);
}

TEST_F(BernoulliPair, PairEnergyDirectSum) {
  auto c = random_config(1, 40, 8);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      if (i != j) s += bernoulli_g(c.point(i)[0] - c.point(j)[0]);
  EXPECT_NEAR(pair_energy(*pair_, c), s / (40.0 * 40.0), 1e-6);
}

TEST_F(BernoulliPair, CoincidentPointsRejected) {
  Configuration c(1, 1.0, {0.3, 0.3 + 1e-9});
  EXPECT_THROW(pair_energy(*pair_, c), CoincidentPoints);
}

TEST_F(BernoulliPair, HamiltonianSymmetries) {
  TorusGrid g(1, 64);
  auto V = Potential::cosine(g, 0.7);
  auto c = random_config(1, 30, 9);
  const double h = hamiltonian(*pair_, V, c);
  std::vector<std::size_t> order(c.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
  EXPECT_NEAR(hamiltonian(*pair_, V, c.permuted(order)), h, 1e-10 * std::abs(h));
  // Without V the energy is translation invariant.
  auto V0 = Potential::zero(g);
  const double shift = 0.3141;
  EXPECT_NEAR(hamiltonian(*pair_, V0, c.translated(std::span(&shift, 1))), hamiltonian(*pair_, V0, c), 1e-6);
}

TEST_F(BernoulliPair, FEnergySinglePointUniform) {
  // N = 1: ℰ^≠ = 0, h(uniform) = ĝ(0) = 1, ℰ(uniform) = 1.
  TorusGrid g(1, 64);
  Configuration c(1, 1.0, {0.42});
  EXPECT_NEAR(f_energy(*pair_, riesz_kernel(g, 2.0), c, ProbabilityDensity::uniform(g)), -1.0, 1e-10);
}

TEST_F(BernoulliPair, SplittingIdentityZeroTemperature) {
  TorusGrid g(1, 64);
  auto kernel = riesz_kernel(g, 2.0);
  auto V = Potential::cosine(g, 3.0);
  EquilibriumOptions opts;
  opts.theta_ladder = {1, 10, 100, 1e3};
  auto eq = solve_equilibrium(kernel, V, opts);
  auto ref = splitting_reference(kernel, V, eq);
  for (unsigned seed = 0; seed < 5; ++seed) {
    auto t = splitting_check(*pair_, ref, random_config(1, 64, 100 + seed));
    EXPECT_LT(t.defect, 1e-10);
  }
}

TEST_F(BernoulliPair, SplittingIdentityThermal) {
  TorusGrid g(1, 64);
  auto kernel = riesz_kernel(g, 2.0);
  auto V = Potential::cosine(g, 1.0);
  auto th = solve_thermal(kernel, V, 5.0);
  auto ref = splitting_reference(kernel, V, th);
  for (unsigned seed = 0; seed < 5; ++seed) {
    auto t = splitting_check(*pair_, ref, random_config(1, 64, 200 + seed));
    EXPECT_LT(t.defect, 1e-9);
  }
}

TEST(Splitting, TwoDimensionalCoulomb) {
  // The identity does not depend on how well the table resolves g, so a
  // coarse table is enough here.
  TorusGrid g(2, 32);
  auto kernel = coulomb_kernel(g);
  auto V = Potential::gaussian_well(g, 2.0, 0.15);
  RealSpaceOptions ro;
  ro.rel_tol = 1e-2;
  PairInteraction pair(kernel, 128, ro);
  auto th = solve_thermal(kernel, V, 10.0);
  auto ref = splitting_reference(kernel, V, th);
  auto t = splitting_check(pair, ref, random_config(2, 40, 4));
  EXPECT_LT(t.defect, 1e-9);
}

TEST(Fluctuation, LatticeCancelsLowModes) {
  TorusGrid g(1, 64);
  auto f = GridField::from_function(g, [](auto x) { return std::cos(2 * kPi * 3 * x[0]); });
  std::vector<double> pts;
  for (int k = 0; k < 16; ++k) pts.push_back((k + 0.37) / 16.0);
  auto mu = ProbabilityDensity::uniform(g);
  EXPECT_NEAR(fluctuation(Configuration(1, 1.0, pts), f, mu), 0.0, 1e-9);
  auto one = GridField(g, 2.5);
  EXPECT_NEAR(fluctuation(random_config(1, 7, 1), one, mu), 0.0, 1e-12);
}

TEST(Fluctuation, SinglePointValue) {
  TorusGrid g(1, 64);
  auto f = GridField::from_function(g, [](auto x) { return std::sin(2 * kPi * x[0]); });
  FluctuationObservable obs(f, ProbabilityDensity::uniform(g));
  EXPECT_NEAR(obs.reference_mean(), 0.0, 1e-14);
  EXPECT_NEAR(obs(Configuration(1, 1.0, {0.1})), std::sin(0.2 * kPi), 1e-9);
}
