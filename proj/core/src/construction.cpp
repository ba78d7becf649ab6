#include "torusgas/construction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "torusgas/equilibrium.hpp"
#include "torusgas/errors.hpp"
#include "torusgas/interpolation.hpp"
#include "torusgas/spectral.hpp"

namespace torusgas {

namespace {

// Volume of the unit ball.
double ball_volume(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    default: return 4.0 * std::numbers::pi / 3.0;
  }
}

std::size_t ipow(int base, int e) {
  std::size_t r = 1;
  for (int k = 0; k < e; ++k) r *= static_cast<std::size_t>(base);
  return r;
}

std::array<int, 3> cube_index(std::size_t j, int per_side, int d) {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = d - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(j % per_side);
    j /= per_side;
  }
  return idx;
}

std::size_t cube_of(const double* x, double eta, int per_side, int d) {
  std::size_t j = 0;
  for (int k = 0; k < d; ++k) j = j * per_side + std::min(per_side - 1, static_cast<int>(x[k] / eta));
  return j;
}

}  // namespace

std::vector<int> largest_remainder(const std::vector<double>& weights, std::size_t n_points) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(total > 0.0)) throw InvalidArgument("cube weights must have positive total");
  std::vector<int> counts(weights.size());
  std::vector<double> rem(weights.size());
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] < 0.0) throw InvalidArgument("negative cube weight");
    const double share = n_points * weights[j] / total;
    counts[j] = static_cast<int>(std::floor(share));
    rem[j] = share - counts[j];
    assigned += counts[j];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < n_points; ++k, ++assigned) counts[order[k % order.size()]] += 1;
  return counts;
}

CubeLayout cube_layout(const ProbabilityDensity& phi, std::size_t n_points, const ConstructionParams& params) {
  const auto& grid = phi.grid();
  const int d = grid.dim();
  if (n_points < 1) throw InvalidArgument("N must be >= 1");
  if (!(params.p > 0.0) || params.p >= 1.0 / d) throw InvalidArgument("p must lie in (0, 1/d)");
  if (!(params.a > 0.0) || params.a >= 1.0) throw InvalidArgument("a must lie in (0, 1)");
  CubeLayout L{};
  // Whole number of cubes per side so they tile the torus; η̄ moves by the rounding.
  L.per_side = std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(n_points), params.p))));
  L.eta_bar = grid.side() / L.per_side;
  const std::size_t cubes = ipow(L.per_side, d);
  L.masses.assign(cubes, 0.0);
  // Cube masses by node assignment; the grid is refined so every cube holds
  // at least 16 nodes per axis.
  GridField f = phi.field();
  if (grid.n() < 16 * L.per_side) {
    int n = grid.n();
    while (n < 16 * L.per_side) n *= 2;
    auto fine = spectral_refine(f, n);
    std::vector<double> v(fine.values().begin(), fine.values().end());
    for (double& x : v) x = std::max(x, 0.0);
    f = GridField(fine.grid(), std::move(v));
  }
  const auto& fg = f.grid();
  for (std::size_t i = 0; i < fg.size(); ++i) {
    auto x = fg.node(i);
    L.masses[cube_of(x.data(), L.eta_bar, L.per_side, d)] += f[i] * fg.cell_volume();
  }
  const double total = std::accumulate(L.masses.begin(), L.masses.end(), 0.0);
  for (double& m : L.masses) m /= total;
  L.counts = largest_remainder(L.masses, n_points);
  L.tau.resize(cubes);
  for (std::size_t j = 0; j < cubes; ++j)
    L.tau[j] = L.counts[j] > 0 ? params.a * L.eta_bar * std::pow(static_cast<double>(L.counts[j]), -1.0 / d) : 0.0;
  return L;
}

Construction generate(const ProbabilityDensity& phi, std::size_t n_points, const ConstructionParams& params,
                      const GridField* support_mask) {
  const auto& grid = phi.grid();
  const int d = grid.dim();
  if (support_mask) {
    if (!(support_mask->grid() == grid)) throw InvalidArgument("support mask and density grids differ");
    const double scale = phi.field().max();
    for (std::size_t i = 0; i < grid.size(); ++i)
      if ((*support_mask)[i] <= 0.0 && phi[i] > 1e-12 * scale)
        throw InvalidArgument("target density has mass outside the support mask");
  }
  CubeLayout L = cube_layout(phi, n_points, params);
  const double eta = L.eta_bar;
  const double omega = ball_volume(d);
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> coords;
  coords.reserve(n_points * d);
  std::vector<int> owner;
  owner.reserve(n_points);
  double log_ratio = 0.0;
  std::size_t draws = 0;
  std::vector<double> placed;
  for (std::size_t j = 0; j < L.counts.size(); ++j) {
    const int nj = L.counts[j];
    if (nj == 0) continue;
    const double tau = L.tau[j];
    const double inner = eta - 2.0 * tau;
    if (inner <= 0.0) {
      std::ostringstream os;
      os << "cube " << j << " shrunk by τ=" << tau << " is empty; lower a";
      throw PlacementFailure(os.str());
    }
    const auto corner = cube_index(j, L.per_side, d);
    placed.clear();
    for (int i = 0; i < nj; ++i) {
      const double avail = std::pow(inner, d) - i * omega * std::pow(tau, d);
      log_ratio += std::log(std::max(avail, 1e-300) / std::pow(eta, d));
      bool ok = false;
      double x[3];
      for (int attempt = 0; attempt < params.max_retries && !ok; ++attempt) {
        ++draws;
        for (int k = 0; k < d; ++k) x[k] = corner[k] * eta + tau + inner * unit(rng);
        ok = true;
        for (std::size_t q = 0; q < placed.size() / d && ok; ++q) {
          double s = 0.0;
          for (int k = 0; k < d; ++k) s += std::pow(x[k] - placed[q * d + k], 2);
          ok = std::sqrt(s) >= tau;
        }
      }
      if (!ok) {
        std::ostringstream os;
        os << "cube " << j << " could not host point " << i + 1 << " of " << nj << " after " << params.max_retries
           << " draws; lower a";
        throw PlacementFailure(os.str());
      }
      placed.insert(placed.end(), x, x + d);
      coords.insert(coords.end(), x, x + d);
      owner.push_back(static_cast<int>(j));
    }
  }
  return {Configuration::wrapped(d, grid.side(), std::move(coords)), std::move(L), std::move(owner), log_ratio, draws};
}

ConstructionReport verify(const Construction& c, const ProbabilityDensity& phi, const std::vector<GridField>& f_list,
                          double alpha, const ConstructionParams& params, const KernelSpec& kernel,
                          const PairInteraction& pair, const ProbabilityDensity& mu) {
  const auto& grid = phi.grid();
  const int d = grid.dim();
  const auto& L = c.layout;
  const std::size_t n = c.config.size();
  ConstructionReport r{};
  r.n_points = n;
  r.min_separation = c.config.min_distance();
  const int max_count = *std::max_element(L.counts.begin(), L.counts.end());
  r.separation_bound = params.a * L.eta_bar * std::pow(static_cast<double>(max_count), -1.0 / d);
  r.r_achieved = r.min_separation * std::pow(static_cast<double>(n), 1.0 / d);
  r.separation_ok = r.min_separation >= r.separation_bound * (1.0 - 1e-12);

  std::vector<int> seen(L.counts.size(), 0);
  for (std::size_t i = 0; i < n; ++i) seen[cube_of(c.config.point(i), L.eta_bar, L.per_side, d)] += 1;
  r.counts_ok = seen == L.counts && std::accumulate(seen.begin(), seen.end(), std::size_t{0}) == n;

  if (!(mu.grid() == grid)) throw InvalidArgument("target and reference densities live on different grids");
  r.f_energy = f_energy(pair, kernel, c.config, mu);
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = phi[i] - mu[i];
  r.target_energy = interaction_energy(kernel, GridField(grid, std::move(diff)));
  r.energy_defect = std::abs(r.f_energy - r.target_energy);

  // Envelope: per cube, Σ_i f(x_i)/N - ∫_{K_j} fφ splits into the spread of f
  // over the shrunk cube around its φ-average and the count rounding.
  constexpr int kProbe = 32;
  const std::size_t probes = ipow(kProbe + 1, d);
  for (const auto& f : f_list) {
    if (!(f.grid() == grid)) throw InvalidArgument("test function grid differs from the target density");
    TestErrorCheck t{};
    auto interp = smooth_interpolator(f);
    t.err = std::abs(empirical_mean(interp, c.config) - inner_product(f, phi.field()));
    t.norm = sobolev_seminorm(f, alpha);
    t.shape = std::pow(static_cast<double>(n), -alpha * params.p) * t.norm;

    // φ-weighted averages of f per cube from a refined grid.
    int nf = grid.n();
    while (nf < 16 * L.per_side) nf *= 2;
    auto fr = spectral_refine(f, nf);
    auto pr = nf == grid.n() ? phi.field() : spectral_refine(phi.field(), nf);
    std::vector<double> fphi(L.counts.size(), 0.0), pm(L.counts.size(), 0.0);
    for (std::size_t i = 0; i < fr.size(); ++i) {
      auto x = fr.grid().node(i);
      auto j = cube_of(x.data(), L.eta_bar, L.per_side, d);
      const double w = std::max(pr[i], 0.0) * fr.grid().cell_volume();
      fphi[j] += fr[i] * w;
      pm[j] += w;
    }
    double env = 0.0;
    for (std::size_t j = 0; j < L.counts.size(); ++j) {
      const auto corner = cube_index(j, L.per_side, d);
      double mean_j = 0.0;
      if (pm[j] > 0.0) mean_j = fphi[j] / pm[j];
      else {
        // Massless cube: any value works for the split, take f at its centre.
        double x[3];
        for (int k = 0; k < d; ++k) x[k] = (corner[k] + 0.5) * L.eta_bar;
        mean_j = interp(x);
      }
      double spread = 0.0;
      if (L.counts[j] > 0) {
        const double tau = L.tau[j], inner = L.eta_bar - 2.0 * tau;
        for (std::size_t q = 0; q < probes; ++q) {
          double x[3];
          std::size_t rest = q;
          for (int k = d - 1; k >= 0; --k) {
            x[k] = corner[k] * L.eta_bar + tau + inner * static_cast<double>(rest % (kProbe + 1)) / kProbe;
            rest /= kProbe + 1;
          }
          spread = std::max(spread, std::abs(interp(x) - mean_j));
        }
      }
      env += L.counts[j] / static_cast<double>(n) * spread + std::abs(L.counts[j] / static_cast<double>(n) - pm[j]) * std::abs(mean_j);
    }
    t.envelope = env;
    r.test_errors.push_back(t);
  }
  return r;
}

}  // namespace torusgas
