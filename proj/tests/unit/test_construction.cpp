#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "torusgas/construction.hpp"
#include "torusgas/equilibrium.hpp"
#include "torusgas/errors.hpp"

using namespace torusgas;

namespace {

constexpr double kPi = std::numbers::pi;

ProbabilityDensity bump(const TorusGrid& g, double eps) {
  return ProbabilityDensity::normalized(GridField::from_function(g, [&](auto x) {
    double v = 1.0;
    for (int k = 0; k < g.dim(); ++k) v *= 1.0 + eps * std::sin(2 * kPi * x[k]);
    return v;
  }));
}

}  // namespace

TEST(LargestRemainder, TiesGoToLowerIndex) {
  auto c = largest_remainder({0.25, 0.25, 0.25, 0.25}, 6);
  EXPECT_EQ(c, (std::vector<int>{2, 2, 1, 1}));
  auto e = largest_remainder({0.1, 0.6, 0.3}, 7);  // shares 0.7, 4.2, 2.1
  EXPECT_EQ(e, (std::vector<int>{1, 4, 2}));
}

TEST(LargestRemainder, SumsToNForRandomWeights) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 40), nn(1, 500);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(len(rng));
    for (auto& x : w) x = u(rng);
    const std::size_t n = nn(rng);
    auto c = largest_remainder(w, n);
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::size_t{0}), n);
    const double tot = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) {
      EXPECT_GE(c[j], std::floor(n * w[j] / tot));
      EXPECT_LE(c[j], std::ceil(n * w[j] / tot));
    }
  }
}

TEST(Construction, UniformOnePointPerCube) {
  TorusGrid g(2, 64);
  ConstructionParams p;
  p.p = 0.49;  // 64^0.49 rounds to 8 cubes per side
  p.a = 0.3;
  p.seed = 11;
  auto c = generate(ProbabilityDensity::uniform(g), 64, p);
  EXPECT_EQ(c.layout.per_side, 8);
  for (int n : c.layout.counts) EXPECT_EQ(n, 1);
  EXPECT_GE(c.config.min_distance(), p.a * c.layout.eta_bar);
}

TEST(Construction, LinearDensityCounts) {
  // φ(x) = 2x: cube [j/k, (j+1)/k) has mass (2j+1)/k².
  TorusGrid g(1, 1 << 12);
  auto phi = ProbabilityDensity::normalized(GridField::from_function(g, [](auto x) { return 2.0 * x[0]; }));
  ConstructionParams p;
  p.p = 0.45;
  p.seed = 2;
  auto c = generate(phi, 64, p);
  const int k = c.layout.per_side;
  ASSERT_EQ(k, 6);
  int total = 0;
  for (int j = 0; j < k; ++j) {
    const double share = 64.0 * (2.0 * j + 1) / (k * k);
    EXPECT_GE(c.layout.counts[j], std::floor(share));
    EXPECT_LE(c.layout.counts[j], std::ceil(share));
    EXPECT_NEAR(c.layout.masses[j], (2.0 * j + 1) / (k * k), 1e-3);
    total += c.layout.counts[j];
  }
  EXPECT_EQ(total, 64);
}

TEST(Construction, SeparationAndOccupancyHold) {
  TorusGrid g(2, 64);
  auto phi = bump(g, 0.6);
  auto kernel = coulomb_kernel(g);
  RealSpaceOptions ro;
  ro.rel_tol = 1e-2;
  PairInteraction pair(kernel, 128, ro);
  ConstructionParams p;
  p.p = 0.3;
  for (unsigned seed = 0; seed < 20; ++seed) {
    p.seed = seed;
    auto c = generate(phi, 150, p);
    ASSERT_EQ(c.config.size(), 150u);
    const int max_n = *std::max_element(c.layout.counts.begin(), c.layout.counts.end());
    EXPECT_GE(c.config.min_distance(), p.a * c.layout.eta_bar / std::sqrt(max_n));
    std::vector<int> per(c.layout.counts.size(), 0);
    for (int j : c.cube_of_point) per[j] += 1;
    EXPECT_EQ(per, c.layout.counts);
    if (seed == 0) {
      auto r = verify(c, phi, {}, 1.0, p, kernel, pair, phi);
      EXPECT_TRUE(r.separation_ok) << r.min_separation << " vs " << r.separation_bound;
      EXPECT_TRUE(r.counts_ok);
      EXPECT_NEAR(r.target_energy, 0.0, 1e-14);
    }
  }
}

TEST(Construction, DeterministicUnderSeed) {
  TorusGrid g(1, 256);
  auto phi = bump(g, 0.5);
  ConstructionParams p;
  p.seed = 99;
  auto a = generate(phi, 100, p);
  auto b = generate(phi, 100, p);
  for (std::size_t i = 0; i < a.config.coords().size(); ++i) EXPECT_EQ(a.config.coords()[i], b.config.coords()[i]);
  p.seed = 100;
  auto c = generate(phi, 100, p);
  EXPECT_NE(a.config.coords()[0], c.config.coords()[0]);
}

TEST(Construction, LargeExclusionFails) {
  TorusGrid g(2, 64);
  ConstructionParams p;
  p.a = 0.6;  // τ = 0.6 η̄ for a single point leaves no room
  p.p = 0.49;
  EXPECT_THROW(generate(ProbabilityDensity::uniform(g), 64, p), PlacementFailure);
}

TEST(Construction, RejectsMassOutsideSupport) {
  TorusGrid g(1, 64);
  GridField mask = GridField::from_function(g, [](auto x) { return x[0] < 0.5 ? 1.0 : 0.0; });
  EXPECT_THROW(generate(ProbabilityDensity::uniform(g), 10, ConstructionParams{}, &mask), InvalidArgument);
}

TEST(Construction, VolumeRatioMatchesFormula) {
  TorusGrid g(1, 256);
  ConstructionParams p;
  p.p = 0.45;
  p.a = 0.2;
  auto c = generate(ProbabilityDensity::uniform(g), 32, p);
  double expect = 0.0;
  for (std::size_t j = 0; j < c.layout.counts.size(); ++j) {
    const double eta = c.layout.eta_bar, tau = c.layout.tau[j];
    for (int i = 0; i < c.layout.counts[j]; ++i) expect += std::log((eta - 2 * tau - i * 2 * tau) / eta);
  }
  EXPECT_NEAR(c.log_volume_ratio, expect, 1e-12);
  EXPECT_GE(c.draws, 32u);
}

TEST(Construction, TestErrorBelowEnvelope) {
  TorusGrid g(1, 256);
  auto phi = bump(g, 0.5);
  auto kernel = riesz_kernel(g, 2.0);
  PairInteraction pair(kernel, 1 << 14);
  auto f = GridField::from_function(g, [](auto x) { return std::cos(2 * kPi * x[0]); });
  auto f3 = GridField::from_function(g, [](auto x) { return std::sin(6 * kPi * x[0]); });
  ConstructionParams p;
  p.p = 1.0 / 3.0;
  for (std::size_t n : {32u, 64u, 128u}) {
    for (unsigned seed = 0; seed < 5; ++seed) {
      p.seed = seed;
      auto c = generate(phi, n, p);
      auto r = verify(c, phi, {f, f3}, 1.0, p, kernel, pair, ProbabilityDensity::uniform(g));
      for (const auto& t : r.test_errors) {
        EXPECT_LE(t.err, t.envelope);
        EXPECT_GT(t.envelope, 0.0);
      }
      EXPECT_NEAR(r.test_errors[0].norm, 1.0, 1e-12);
      EXPECT_TRUE(std::isfinite(r.energy_defect));
    }
  }
}
