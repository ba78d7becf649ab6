#include "torusgas/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "torusgas/errors.hpp"
#include "torusgas/spectral.hpp"

namespace torusgas {

namespace {

double wrap(double x, double side) {
  double r = std::fmod(x, side);
  if (r < 0) r += side;
  return r >= side ? 0.0 : r;
}

}  // namespace

GibbsModel::GibbsModel(KernelSpec kernel, Potential V, GibbsParams params, std::shared_ptr<const PairInteraction> pair)
    : kernel_(std::move(kernel)),
      V_(std::move(V)),
      params_(params),
      pair_(pair ? std::move(pair) : std::make_shared<const PairInteraction>(kernel_)),
      v_interp_(smooth_interpolator(V_.field())) {
  if (params_.n_points < 1) throw InvalidArgument("N must be >= 1");
  if (!(params_.beta > 0.0) || !std::isfinite(params_.beta)) throw InvalidArgument("β must be positive");
  if (V_.grid().dim() != kernel_.dim() || V_.grid().side() != kernel_.side())
    throw InvalidArgument("potential and kernel live on different tori");
  if (pair_->dim() != kernel_.dim() || pair_->side() != kernel_.side())
    throw InvalidArgument("pair table and kernel live on different tori");
}

double GibbsModel::hamiltonian(const Configuration& config) const {
  if (config.size() != params_.n_points) throw InvalidArgument("configuration has the wrong number of points");
  return torusgas::hamiltonian(*pair_, v_interp_, config);
}

double GibbsModel::particle_energy(std::span<const double> coords, std::size_t i, const double* x) const {
  const int d = kernel_.dim();
  const std::size_t n = coords.size() / d;
  long double s = 0.0L;
  double dx[3];
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    for (int k = 0; k < d; ++k) dx[k] = x[k] - coords[j * d + k];
    s += (*pair_)(dx);
  }
  return 2.0 * static_cast<double>(s) + static_cast<double>(n) * v_interp_(x);
}

double GibbsModel::acceptance(const Configuration& config, std::size_t i, const double* y) const {
  const double delta = particle_energy(config.coords(), i, y) - particle_energy(config.coords(), i, config.point(i));
  return std::min(1.0, std::exp(-params_.beta * delta));
}

ChainResult mcmc_sample(const GibbsModel& model, const ChainOptions& options, const Configuration* initial) {
  if (!(options.proposal_scale > 0.0)) throw InvalidArgument("proposal scale must be positive");
  if (options.thin < 1) throw InvalidArgument("thin must be >= 1");
  const int d = model.kernel().dim();
  const double side = model.kernel().side();
  const std::size_t n = model.params().n_points;
  const double beta = model.params().beta;
  const double min_sep = model.pair().min_separation();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::vector<double> x;
  if (initial) {
    if (initial->size() != n || initial->dim() != d) throw InvalidArgument("initial configuration does not match the model");
    x.assign(initial->coords().begin(), initial->coords().end());
  } else {
    // Uniform start, redrawing any point that lands on top of another.
    for (std::size_t i = 0; i < n; ++i) {
      double p[3];
      bool ok = false;
      while (!ok) {
        for (int k = 0; k < d; ++k) p[k] = side * unit(rng);
        ok = true;
        for (std::size_t j = 0; j < i && ok; ++j) ok = torus_distance(p, x.data() + j * d, d, side) >= min_sep;
      }
      x.insert(x.end(), p, p + d);
    }
  }
  auto current = [&] { return Configuration(d, side, x); };
  double energy = model.hamiltonian(current());

  ChainResult res{};
  res.seed = options.seed;
  double scale = std::min(options.proposal_scale, side / 2.0);
  std::size_t accepted = 0, proposals = 0, since_check = 0;
  std::size_t window_acc = 0, window_prop = 0;
  double max_drift = 0.0;

  const std::size_t total = options.burn_in + options.sweeps;
  for (std::size_t sweep = 0; sweep < total; ++sweep) {
    const bool burning = sweep < options.burn_in;
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = pick(rng);
      double y[3];
      for (int k = 0; k < d; ++k) y[k] = wrap(x[i * d + k] + scale * (2.0 * unit(rng) - 1.0), side);
      ++window_prop;
      if (!burning) ++proposals;
      bool close = false;
      for (std::size_t j = 0; j < n && !close; ++j)
        if (j != i) close = torus_distance(y, x.data() + j * d, d, side) < min_sep;
      if (close) {
        ++res.rejected_coincident;
        continue;
      }
      const double delta = model.particle_energy(x, i, y) - model.particle_energy(x, i, x.data() + i * d);
      if (!std::isfinite(delta)) {
        ++res.rejected_coincident;
        continue;
      }
      if (delta <= 0.0 || unit(rng) < std::exp(-beta * delta)) {
        std::copy(y, y + d, x.begin() + i * d);
        energy += delta;
        ++window_acc;
        if (!burning) ++accepted;
        if (++since_check >= options.recompute_every) {
          since_check = 0;
          const double full = model.hamiltonian(current());
          const double drift = std::abs(full - energy) / std::max(1.0, std::abs(full));
          max_drift = std::max(max_drift, drift);
          if (drift > 1e-6) {
            std::ostringstream os;
            os << "incremental energy drifted by " << drift << " relative";
            warn("EnergyDrift", os.str());
          }
          energy = full;
        }
      }
    }
    if (burning && options.tune && (sweep + 1) % 20 == 0) {
      const double rate = static_cast<double>(window_acc) / std::max<std::size_t>(1, window_prop);
      if (rate < 0.3) scale *= 0.7;
      else if (rate > 0.5) scale = std::min(scale * 1.3, side / 2.0);
      window_acc = window_prop = 0;
    }
    if (!burning && (sweep - options.burn_in + 1) % options.thin == 0) {
      res.samples.push_back(current());
      res.energies.push_back(energy);
    }
  }
  res.proposals = proposals;
  res.acceptance_rate = proposals ? static_cast<double>(accepted) / proposals : 0.0;
  res.proposal_scale = scale;
  res.max_drift = max_drift;
  res.tau_energy = res.energies.size() >= 4 ? autocorrelation_time(res.energies) : 1.0;
  return res;
}

std::vector<ChainResult> run_chains(const GibbsModel& model, const ChainOptions& options,
                                    const std::vector<std::uint64_t>& seeds, int threads) {
  std::vector<ChainResult> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < seeds.size(); k = next++) {
      try {
        ChainOptions o = options;
        o.seed = seeds[k];
        out[k] = mcmc_sample(model, o);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(seeds.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

// Z_q / T^{dN}: the mean of exp(-β H) over the q^{dN} tensor nodes, as a log.
// The Boltzmann factor splits into one-body weights A = exp(-βN(V - min V))
// and pair weights G = exp(-2β(g - min g)), both <= 1, and for N = 3 the node
// sum is contracted as Σ_a A_a Σ_c A_c G_{a-c} Σ_b A_b G_{a-b} G_{b-c}.
double log_mean_boltzmann(const GibbsModel& model, int q) {
  const int d = model.kernel().dim();
  const int n = static_cast<int>(model.params().n_points);
  const double side = model.kernel().side();
  const double beta = model.params().beta;
  const TorusGrid grid(d, q, side, std::size_t{1} << 30);
  const std::size_t Q = grid.size();
  std::vector<double> g(Q), v(Q);
  for (std::size_t i = 0; i < Q; ++i) {
    auto x = grid.node(i);
    g[i] = model.pair()(x.data());
    v[i] = model.potential_interpolator()(x.data());
  }
  const double gmin = *std::min_element(g.begin(), g.end());
  const double vmin = *std::min_element(v.begin(), v.end());
  std::vector<double> A(Q), G(Q);
  for (std::size_t i = 0; i < Q; ++i) {
    A[i] = std::exp(-beta * n * (v[i] - vmin));
    G[i] = std::exp(-2.0 * beta * (g[i] - gmin));
  }
  std::vector<std::array<int, 3>> idx(Q);
  for (std::size_t i = 0; i < Q; ++i) idx[i] = grid.unravel(i);
  auto diff = [&](std::size_t a, std::size_t b) {
    if (d == 1) return (a + Q - b) % Q;
    std::array<int, 3> r{0, 0, 0};
    for (int k = 0; k < d; ++k) r[k] = (idx[a][k] - idx[b][k] + q) % q;
    return grid.ravel(r);
  };
  long double total = 0.0L;
  if (n == 1) {
    for (double a : A) total += a;
  } else if (n == 2) {
    for (std::size_t a = 0; a < Q; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < Q; ++b) row += A[b] * G[diff(a, b)];
      total += A[a] * row;
    }
  } else {
    // The b-sum is symmetric in (a, c), so only c <= a is visited. G is
    // even, so G_{b-c} = G_{c-b}; for d = 1 a doubled copy makes the inner
    // loop contiguous. (An FFT convolution would be faster but loses the small
    // terms to roundoff once β(g_max - g_min) is large.)
    std::vector<double> w(Q), G2(2 * Q);
    for (std::size_t i = 0; i < 2 * Q; ++i) G2[i] = G[i % Q];
    for (std::size_t a = 0; a < Q; ++a) {
      for (std::size_t b = 0; b < Q; ++b) w[b] = A[b] * G[diff(a, b)];
      double outer = 0.0;
      for (std::size_t c = 0; c <= a; ++c) {
        double inner = 0.0;
        if (d == 1) {
          const double* gc = G2.data() + Q - c;  // gc[b] = G[(b - c) mod Q]
          // Four partial sums so the reduction vectorizes.
          double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
          std::size_t b = 0;
          for (; b + 4 <= Q; b += 4) {
            s0 += w[b] * gc[b];
            s1 += w[b + 1] * gc[b + 1];
            s2 += w[b + 2] * gc[b + 2];
            s3 += w[b + 3] * gc[b + 3];
          }
          for (; b < Q; ++b) s0 += w[b] * gc[b];
          inner = (s0 + s1) + (s2 + s3);
        } else {
          for (std::size_t b = 0; b < Q; ++b) inner += w[b] * G[diff(b, c)];
        }
        outer += (c == a ? 1.0 : 2.0) * A[c] * G[diff(a, c)] * inner;
      }
      total += A[a] * outer;
    }
  }
  if (!(total > 0.0L)) throw NonFiniteEnergy("Boltzmann sum underflowed; β is too large for direct quadrature");
  const double pairs = 0.5 * n * (n - 1);
  return static_cast<double>(std::log(total)) - n * std::log(static_cast<double>(Q)) -
         beta * (n * n * vmin + 2.0 * pairs * gmin);
}
}  // namespace

QuadratureResult direct_log_partition(const GibbsModel& model, int quadrature_n, double tol, std::size_t budget) {
  const int d = model.kernel().dim();
  const std::size_t n = model.params().n_points;
  if (n > 3) throw InvalidArgument("direct quadrature is limited to N <= 3");
  if (quadrature_n < 4 || (quadrature_n & (quadrature_n - 1))) throw InvalidArgument("quadrature_n must be a power of two >= 4");
  auto cost = [&](int q) {
    double c = 1.0;
    for (std::size_t k = 0; k < n * d; ++k) c *= q;
    return c;
  };
  const double log_vol = n * d * std::log(model.kernel().side());
  // Trapezoid error on the kinked periodic integrand starts at O(h²) (the
  // kinks sit on lattice planes); one Richardson step on Z removes it. Higher
  // Romberg columns do not help: where the kink planes cross, the next terms
  // are not clean powers of h.
  int q = quadrature_n;
  if (cost(2 * q) > static_cast<double>(budget)) throw BudgetExceeded("quadrature needs more than the node budget");
  double lz_prev = log_mean_boltzmann(model, q);
  double rich_prev = std::numeric_limits<double>::quiet_NaN();
  double last_change = std::numeric_limits<double>::infinity();
  while (true) {
    const int q2 = 2 * q;
    if (cost(q2) > static_cast<double>(budget)) {
      std::ostringstream os;
      os << "quadrature did not reach tol " << tol << " by q=" << q << " (last change " << last_change << ")";
      throw BudgetExceeded(os.str());
    }
    const double lz = log_mean_boltzmann(model, q2);
    // log of (4 Z_{2q} - Z_q)/3 without leaving log space.
    const double rich = lz + std::log((4.0 - std::exp(lz_prev - lz)) / 3.0);
    if (!std::isnan(rich_prev)) {
      last_change = std::abs(rich - rich_prev);
      if (last_change < tol) return {rich + log_vol, last_change, q2};
    }
    rich_prev = rich;
    lz_prev = lz;
    q = q2;
  }
}

PartitionEstimates partition_lower_bounds(const GibbsModel& model, const ThermalEquilibrium& thermal,
                                          const EquilibriumApprox& eq, const QuadratureResult& quad) {
  const double theta = model.params().theta();
  if (std::abs(thermal.theta - theta) > 1e-12 * theta)
    throw InvalidArgument("thermal equilibrium was solved at θ != Nβ");
  const double n = static_cast<double>(model.params().n_points);
  const double n2beta = n * n * model.params().beta;
  const auto& k = model.kernel();
  const auto& V = model.potential();
  PartitionEstimates p{};
  p.log_z = quad.log_z;
  p.normalized = quad.log_z / n2beta;
  const double ev_theta = energy_thermal(k, V, theta, thermal.mu);
  const double ev_inf = energy_mean_field(k, V, eq.mu);
  p.lower_bound_thermal = -ev_theta + interaction_energy(k, thermal.mu.field()) / n;
  p.lower_bound_eq = -ev_inf - entropy(eq.mu) / theta + interaction_energy(k, eq.mu.field()) / n;
  p.gap_thermal = p.normalized + ev_theta;
  p.log_k_inf = quad.log_z - n2beta * ev_inf;
  p.log_k_theta = quad.log_z - n2beta * ev_theta;
  p.quadrature_change = quad.change;
  return p;
}

double product_free_energy(const GibbsModel& model, const ProbabilityDensity& mu) {
  const double n = static_cast<double>(model.params().n_points);
  return n * n * energy_mean_field(model.kernel(), model.potential(), mu) -
         n * interaction_energy(model.kernel(), mu.field()) + n / model.params().beta * entropy(mu);
}

FreeEnergyCheck free_energy_check(const GibbsModel& model, const std::vector<ProbabilityDensity>& mus, double log_z) {
  FreeEnergyCheck c{};
  c.reference = -log_z / model.params().beta;
  c.min_defect = std::numeric_limits<double>::infinity();
  for (const auto& mu : mus) {
    c.values.push_back(product_free_energy(model, mu));
    c.min_defect = std::min(c.min_defect, c.values.back() - c.reference);
  }
  return c;
}

double h_half_norm_sq(const KernelSpec& kernel, const GridField& f) {
  const auto spec = forward_transform(f);
  const auto ghat = kernel.coefficients(f.grid());
  long double s = 0.0L;
  for (std::size_t i = 1; i < spec.size(); ++i) s += std::norm(spec[i]) / ghat[i];
  return static_cast<double>(s) * f.grid().volume();
}

double positivity_radius(const ProbabilityDensity& mu, const GridField& direction) {
  if (!(mu.grid() == direction.grid())) throw InvalidArgument("density and direction grids differ");
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < direction.size(); ++i)
    if (direction[i] < 0.0) r = std::min(r, mu[i] / -direction[i]);
  return r;
}

BoundReport concentration_report(const std::vector<double>& fluct, double n2beta, double h_norm_sq,
                                 const std::vector<double>& r_grid) {
  if (!(h_norm_sq > 0.0)) throw InvalidArgument("‖h_{-1/2} f‖ vanishes: f is constant");
  const std::size_t m = fluct.size();
  BoundReport rep{};
  rep.h_norm_sq = h_norm_sq;
  rep.n2beta = n2beta;
  rep.samples = m;
  std::vector<double> absf(m);
  for (std::size_t i = 0; i < m; ++i) absf[i] = std::abs(fluct[i]);
  rep.tau = autocorrelation_time(absf);
  if (rep.tau >= static_cast<double>(m) / 50.0) {
    std::ostringstream os;
    os << "autocorrelation time " << rep.tau << " is not below M/50 = " << m / 50.0;
    throw StationarityGateFailed(os.str());
  }
  rep.n_eff = m / rep.tau;
  rep.r0_eq = rep.r0_thermal = std::numeric_limits<double>::quiet_NaN();
  for (double r : r_grid) {
    ConcentrationPoint pt{};
    pt.r = r;
    std::size_t hits = 0;
    for (double v : absf) hits += v >= r;
    pt.p_hat = static_cast<double>(hits) / m;
    pt.p_ci = wilson_interval(pt.p_hat, rep.n_eff);
    pt.leading = r * r / h_norm_sq;
    pt.censored = pt.p_hat < 10.0 / m;
    pt.rate_term_eq = pt.rate_term_thermal = std::numeric_limits<double>::quiet_NaN();
    if (pt.censored) {
      pt.rate = pt.rate_ci = std::numeric_limits<double>::quiet_NaN();
      pt.pass = true;
    } else {
      pt.rate = -std::log(pt.p_hat) / n2beta;
      pt.rate_ci = std::max(0.0, (std::log(pt.p_ci.hi) - std::log(pt.p_hat)) / n2beta);
      pt.pass = pt.rate >= pt.leading - 3.0 * pt.rate_ci;
    }
    rep.points.push_back(pt);
  }
  return rep;
}

namespace {

// Relative entropy of mu + r·dir with respect to ref; NaN if not a density.
double tilted_entropy(const ProbabilityDensity& mu, const GridField& dir, double r, const ProbabilityDensity& ref) {
  std::vector<double> v(mu.values().begin(), mu.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] += r * dir[i];
    if (v[i] < 0.0) {
      if (v[i] < -1e-12) return std::numeric_limits<double>::quiet_NaN();
      v[i] = 0.0;
    }
  }
  return relative_entropy(ProbabilityDensity::normalized(GridField(mu.grid(), std::move(v))), ref);
}

}  // namespace

void attach_rate_terms(BoundReport& report, const KernelSpec& kernel, const GridField& f, const EquilibriumApprox& eq,
                       const ThermalEquilibrium& thermal) {
  const auto& grid = eq.mu.grid();
  GridField dir = apply_h_alpha(kernel, f, -1.0);
  std::vector<double> d(dir.values().begin(), dir.values().end());
  for (double& x : d) x /= report.h_norm_sq;
  dir = GridField(grid, std::move(d));
  report.r0_eq = positivity_radius(eq.mu, dir);
  report.r0_thermal = positivity_radius(thermal.mu, dir);
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = eq.sigma_mask[i] > 0.0 ? 1.0 : 0.0;
  const auto uniform_sigma = ProbabilityDensity::normalized(GridField(grid, std::move(u)));
  for (auto& pt : report.points) {
    pt.rate_term_eq = tilted_entropy(eq.mu, dir, pt.r, uniform_sigma);
    pt.rate_term_thermal = tilted_entropy(thermal.mu, dir, pt.r, thermal.mu);
  }
}

LaplacePrediction laplace_prediction(const KernelSpec& kernel, const GridField& f, const EquilibriumApprox& eq,
                                     double theta, double r) {
  const auto& grid = eq.mu.grid();
  const double hn = h_half_norm_sq(kernel, f);
  const double lead = r * r / 4.0 * hn;
  const double log_sigma = std::log(eq.sigma_measure);
  LaplacePrediction p{};
  p.upper = lead + (entropy(eq.mu) - log_sigma) / theta;
  const GridField h = apply_h_alpha(kernel, f, -1.0);
  // supp h_{-1}(f) ⊂ Σ.
  bool inside = true;
  const double scale = std::max(h.sup_norm(), 1e-300);
  for (std::size_t i = 0; i < grid.size() && inside; ++i)
    inside = eq.sigma_mask[i] > 0.0 || std::abs(h[i]) <= 1e-10 * scale;
  // μ^{V-rf}_∞ = μ_∞ + (r/2) h_{-1}(f).
  std::vector<double> tilted(grid.size());
  bool positive = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    tilted[i] = eq.mu[i] + 0.5 * r * h[i];
    if (tilted[i] < 0.0) positive = false;
  }
  p.lower_applicable = inside && positive;
  if (p.lower_applicable) {
    const auto mu_r = ProbabilityDensity::normalized(GridField(grid, std::move(tilted)));
    p.lower = lead - (entropy(mu_r) - log_sigma) / theta;
  } else {
    p.lower = std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

LaplaceReport laplace_report(const std::vector<double>& fluct, double n2beta, const std::vector<double>& r_grid,
                             const std::vector<LaplacePrediction>& predictions, const LaplaceOptions& options) {
  if (predictions.size() != r_grid.size()) throw InvalidArgument("one prediction per r is required");
  if (fluct.size() < static_cast<std::size_t>(2 * options.blocks)) throw InvalidArgument("too few samples for the jackknife");
  double top = 0.0;
  for (double v : fluct) top = std::max(top, std::abs(v));
  LaplaceReport rep{};
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    const double r = r_grid[k];
    const double a = n2beta * r;
    if (a * top > 700.0) {
      std::ostringstream os;
      os << "tilt N²β r |Fluct| = " << a * top << " exceeds 700; use a smaller r";
      throw OverflowGuard(os.str());
    }
    LaplacePoint pt{};
    pt.r = r;
    auto jk = block_jackknife(fluct, options.blocks, [&](std::span<const double> s) { return log_mean_exp(s, a) / n2beta; });
    pt.estimate = jk.estimate;
    pt.std_error = jk.std_error;
    pt.ess = tilt_effective_size(fluct, a);
    pt.gated = pt.ess < options.ess_floor;
    pt.upper = predictions[k].upper;
    pt.lower = predictions[k].lower;
    pt.lower_applicable = predictions[k].lower_applicable;
    pt.allowance = options.z * pt.std_error + options.rate_allowance;
    pt.pass = pt.gated || (pt.estimate <= pt.upper + pt.allowance &&
                           (!pt.lower_applicable || pt.estimate >= pt.lower - pt.allowance));
    rep.points.push_back(pt);
  }
  // Slope at 0 from a central difference of the unnormalized log-Laplace,
  // against N²β mean(Fluct); both jackknifed on the same blocks.
  const double h = options.slope_step;
  auto slope_minus_mean = [&](std::span<const double> s) {
    const double up = log_mean_exp(s, n2beta * h), dn = log_mean_exp(s, -n2beta * h);
    return (up - dn) / (2.0 * h) - n2beta * mean(s);
  };
  auto jk = block_jackknife(fluct, options.blocks, slope_minus_mean);
  rep.slope_expected = n2beta * mean(fluct);
  rep.slope_estimate = rep.slope_expected + jk.estimate;
  auto jm = block_jackknife(fluct, options.blocks, [&](std::span<const double> s) { return n2beta * mean(s); });
  rep.slope_std_error = std::max(jk.std_error, jm.std_error);
  rep.slope_pass = std::abs(jk.estimate) <= options.z * rep.slope_std_error + 1e-12 * std::abs(rep.slope_expected);
  // Convexity on the ungated points (second differences on a possibly uneven grid).
  rep.convex = true;
  std::vector<const LaplacePoint*> used;
  for (const auto& p : rep.points)
    if (!p.gated) used.push_back(&p);
  for (std::size_t i = 1; i + 1 < used.size(); ++i) {
    const auto &a = *used[i - 1], &b = *used[i], &c = *used[i + 1];
    const double interp = a.estimate + (c.estimate - a.estimate) * (b.r - a.r) / (c.r - a.r);
    const double tol = options.z * std::max({a.std_error, b.std_error, c.std_error});
    if (b.estimate > interp + tol) rep.convex = false;
  }
  return rep;
}

}  // namespace torusgas
