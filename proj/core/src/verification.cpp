#include "torusgas/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "torusgas/construction.hpp"
#include "torusgas/errors.hpp"
#include "torusgas/particles.hpp"
#include "torusgas/regularization.hpp"
#include "torusgas/sampling.hpp"
#include "torusgas/spectral.hpp"

namespace torusgas {

namespace {

constexpr double kPi = std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

GridField cosine_mode(const TorusGrid& grid, int k) {
  const double side = grid.side();
  return GridField::from_function(grid, [&](auto x) { return std::cos(2.0 * kPi * k * x[0] / side); });
}

// x_i = F^{-1}((i + 1/2)/N) for φ = 1 + A cos(2πx) on the unit circle.
Configuration quantile_configuration(std::size_t n, double amplitude) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double F = mid + amplitude * std::sin(2.0 * kPi * mid) / (2.0 * kPi);
      (F < u ? lo : hi) = mid;
    }
    xs[i] = 0.5 * (lo + hi);
  }
  return Configuration(1, 1.0, xs);
}

}  // namespace

KernelSpec KernelChoice::build(const TorusGrid& grid) const {
  if (name == "riesz") return riesz_kernel(grid, gamma, zero_mode);
  if (name == "coulomb") return coulomb_kernel(grid, zero_mode);
  if (name == "table") return load_tabulated_kernel(grid, table_path, zero_mode);
  throw ConfigError("unknown kernel '" + name + "' (riesz, coulomb, table)");
}

Potential PotentialChoice::build(const TorusGrid& grid) const {
  if (preset == "zero") return Potential::zero(grid);
  if (preset == "cosine") return Potential::cosine(grid, amplitude, mode);
  if (preset == "gaussian_well") return Potential::gaussian_well(grid, amplitude, sigma);
  if (preset == "file") return Potential::from_file(grid, path);
  throw ConfigError("unknown potential '" + preset + "' (zero, cosine, gaussian_well, file)");
}

CriterionResult audit_spectral(const SpectralAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 1;
  r.name = "spectral identities";
  r.columns = {"d", "field", "parseval", "round_trip", "plancherel"};
  std::mt19937_64 rng(a.seed);
  std::normal_distribution<double> n01;
  double worst[3] = {0.0, 0.0, 0.0};
  for (int d = 1; d <= 2; ++d) {
    // A non-unit side in 2D keeps the T^d factors honest.
    const TorusGrid grid(d, d == 1 ? a.n_1d : a.n_2d, d == 1 ? 1.0 : 2.0);
    const KernelSpec kernel = d == 1 ? riesz_kernel(grid, 1.5) : coulomb_kernel(grid);
    for (int k = 0; k < a.fields; ++k) {
      std::vector<double> v(grid.size());
      for (auto& x : v) x = n01(rng);
      const double m = mean(v);
      for (auto& x : v) x -= m;
      const GridField f(grid, v);
      const auto spec = forward_transform(f);
      long double s = 0.0L;
      for (const auto& c : spec.coeffs()) s += std::norm(c);
      const double l2 = inner_product(f, f);
      const double parseval = std::abs(l2 - static_cast<double>(s) * grid.volume()) / l2;
      const auto back = inverse_transform(spec);
      double diff = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) diff = std::max(diff, std::abs(back[i] - f[i]));
      const double round_trip = diff / f.sup_norm();
      const GridField h1 = apply_h_alpha(kernel, f, -1.0);
      const GridField h_half = apply_h_alpha(kernel, f, -0.5);
      const double lhs = interaction_energy(kernel, h1);
      const double rhs = inner_product(h_half, h_half);
      const double plancherel = std::abs(lhs - rhs) / rhs;
      worst[0] = std::max(worst[0], parseval);
      worst[1] = std::max(worst[1], round_trip);
      worst[2] = std::max(worst[2], plancherel);
      r.rows.push_back({double(d), double(k), parseval, round_trip, plancherel});
    }
  }
  r.metrics = {{"max_parseval", worst[0]}, {"max_round_trip", worst[1]}, {"max_plancherel", worst[2]}};
  r.pass = worst[0] < a.tol && worst[1] < a.tol && worst[2] < a.tol;
  r.summary = "max rel err parseval=" + fmt(worst[0]) + " round-trip=" + fmt(worst[1]) + " plancherel=" +
              fmt(worst[2]) + " (tol " + fmt(a.tol) + ")";
  r.seconds = sw.seconds();
  return r;
}

CriterionResult audit_splitting(const SplittingAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 2;
  r.name = "splitting formulas";
  r.columns = {"kernel", "potential", "variant", "config", "hamiltonian", "defect"};
  const TorusGrid grid(1, 256);
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int kk = 0; kk < 2; ++kk) {
    const KernelSpec kernel = kk == 0 ? riesz_kernel(grid, 2.0) : coulomb_kernel(grid);
    const PairInteraction pair(kernel);
    for (int vv = 0; vv < 2; ++vv) {
      const Potential V = vv == 0 ? Potential::zero(grid) : Potential::cosine(grid, a.cos_amplitude);
      const auto eq = solve_equilibrium(kernel, V);
      const auto th = solve_thermal(kernel, V, a.theta);
      const SplittingReference refs[2] = {splitting_reference(kernel, V, eq), splitting_reference(kernel, V, th)};
      for (int c = 0; c < a.configs; ++c) {
        std::vector<double> xs(a.n_points);
        for (auto& x : xs) x = u(rng);
        const Configuration config(1, 1.0, xs);
        for (int variant = 0; variant < 2; ++variant) {
          const auto t = splitting_check(pair, refs[variant], config);
          worst = std::max(worst, t.defect);
          r.rows.push_back({double(kk), double(vv), double(variant), double(c), t.hamiltonian, t.defect});
        }
      }
    }
  }
  r.notes.push_back("kernel 0 = riesz(2), 1 = coulomb; potential 0 = zero, 1 = cosine; variant 0 = mu_inf, 1 = mu_theta");
  r.metrics = {{"max_defect", worst}};
  r.pass = worst < a.tol;
  r.summary = "max relative defect " + fmt(worst) + " over " + std::to_string(8 * a.configs) + " checks (tol " +
              fmt(a.tol) + ")";
  r.seconds = sw.seconds();
  return r;
}

CriterionResult audit_thermal(const ThermalAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 3;
  r.name = "thermal equilibrium solver";
  r.columns = {"theta", "residual", "min_margin", "uniform_err", "c_theta_err"};
  const TorusGrid grid(a.dim, a.n, a.side);
  const KernelSpec kernel = a.kernel.build(grid);
  const Potential V = a.potential.build(grid);
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_res = 0.0, worst_margin = std::numeric_limits<double>::infinity(), worst_uniform = 0.0;
  const double side = grid.side(), vol = grid.volume();
  for (double theta : a.thetas) {
    const auto th = solve_thermal(kernel, V, theta);
    const auto foc = thermal_foc(kernel, V, theta, th.mu, th.log_mu);
    const double res = std::max(th.residual, foc.residual);
    const double e0 = energy_thermal(kernel, V, theta, th.mu);
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < a.perturbations; ++k) {
      // μ·exp(ε ξ) with ξ a few random low modes and ε from 1e-4 to 1e-1.
      const double eps = std::pow(10.0, -4.0 + 3.0 * k / std::max(1, a.perturbations - 1));
      double c[3], s[3];
      for (int j = 0; j < 3; ++j) c[j] = u(rng), s[j] = u(rng);
      auto xi = GridField::from_function(grid, [&](auto x) {
        double v = 0.0;
        for (int j = 0; j < 3; ++j)
          v += c[j] * std::cos(2.0 * kPi * (j + 1) * x[0] / side) + s[j] * std::sin(2.0 * kPi * (j + 1) * x[0] / side);
        return v;
      });
      std::vector<double> p(grid.size());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = th.mu[i] * std::exp(eps * xi[i]);
      const auto mu2 = ProbabilityDensity::normalized(GridField(grid, std::move(p)));
      margin = std::min(margin, energy_thermal(kernel, V, theta, mu2) - e0);
    }
    // V ≡ 0: uniform density and c_θ = 2ĝ(0)/T^d - d log T/θ.
    const auto th0 = solve_thermal(kernel, Potential::zero(grid), theta);
    double uerr = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) uerr = std::max(uerr, std::abs(th0.mu[i] * vol - 1.0));
    const double c_exact = 2.0 * kernel.zero_mode() / vol - std::log(vol) / theta;
    const double cerr = std::abs(th0.c_theta - c_exact);
    worst_res = std::max(worst_res, res);
    worst_margin = std::min(worst_margin, margin);
    worst_uniform = std::max({worst_uniform, uerr, cerr});
    r.rows.push_back({theta, res, margin, uerr, cerr});
  }
  r.metrics = {{"max_residual", worst_res}, {"min_margin", worst_margin}, {"uniform_error", worst_uniform}};
  r.pass = worst_res < a.residual_tol && worst_margin >= a.margin && worst_uniform < 1e-12;
  r.summary = "FOC residual " + fmt(worst_res) + ", min perturbation margin " + fmt(worst_margin) +
              ", V=0 uniform/c_theta err " + fmt(worst_uniform);
  r.seconds = sw.seconds();
  return r;
}

CriterionResult audit_partition(const PartitionAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 4;
  r.name = "partition lower bounds";
  r.columns = {"N",        "theta",    "log_z",     "normalized",  "bound_thermal", "bound_eq",
               "slack_a", "slack_b", "gap_thermal", "log_k_inf", "log_k_theta",   "quadrature_change"};
  const TorusGrid grid(a.dim, a.n, a.side);
  const KernelSpec kernel = a.kernel.build(grid);
  const Potential V = a.potential.build(grid);
  const auto eq = solve_equilibrium(kernel, V);
  auto pair = std::make_shared<const PairInteraction>(kernel);
  double worst = std::numeric_limits<double>::infinity();
  for (int n : a.n_points) {
    for (double theta : a.thetas) {
      const GibbsModel model(kernel, V, {static_cast<std::size_t>(n), theta / n}, pair);
      const auto th = solve_thermal(kernel, V, theta);
      const auto quad = direct_log_partition(model, a.quadrature_n, a.quadrature_tol);
      const auto p = partition_lower_bounds(model, th, eq, quad);
      const double sa = p.normalized - p.lower_bound_thermal, sb = p.normalized - p.lower_bound_eq;
      worst = std::min({worst, sa, sb});
      r.rows.push_back({double(n), theta, p.log_z, p.normalized, p.lower_bound_thermal, p.lower_bound_eq, sa, sb,
                        p.gap_thermal, p.log_k_inf, p.log_k_theta, p.quadrature_change});
    }
  }
  r.metrics = {{"min_slack", worst}};
  r.pass = worst >= -a.tol;
  r.summary = "min (log Z/(N^2 beta) - bound) = " + fmt(worst) + " (tol -" + fmt(a.tol) + ")";
  r.seconds = sw.seconds();
  return r;
}

CriterionResult audit_regularization(const RegularizationAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 5;
  r.name = "regularization bounds";
  r.columns = {"kind", "N", "t", "value", "shape", "ratio"};
  const TorusGrid grid(1, 256);
  const auto ts = logspace(a.t_lo, a.t_hi, a.t_count);
  const KernelSpec kernel = riesz_kernel(grid, a.gamma_ratio);
  const PairInteraction pair(kernel);
  const GridField f = GridField::from_function(
      grid, [](auto x) { return std::cos(2.0 * kPi * x[0]) + 0.5 * std::sin(4.0 * kPi * x[0]); });
  const double alpha = kernel.lambda();
  std::vector<double> gap_max, err_max;
  for (int n : a.n_points) {
    const auto config = quantile_configuration(n, a.phi_amplitude);
    double gm = 0.0, em = 0.0;
    for (const auto& g : energy_gap_sweep(config, pair, kernel, ts)) {
      gm = std::max(gm, g.ratio);
      r.rows.push_back({0.0, double(n), g.t, g.gap, g.bound_shape, g.ratio});
    }
    for (const auto& e : test_error_sweep(config, kernel, f, ts, alpha)) {
      em = std::max(em, e.ratio);
      r.rows.push_back({1.0, double(n), e.t, e.err, e.bound_shape, e.ratio});
    }
    gap_max.push_back(gm);
    err_max.push_back(em);
  }
  bool stable = true;
  double worst_change = 0.0;
  for (std::size_t i = 0; i < gap_max.size(); ++i) {
    if (!std::isfinite(gap_max[i]) || !std::isfinite(err_max[i])) stable = false;
    if (i == 0) continue;
    const double cg = std::abs(gap_max[i] / gap_max[i - 1] - 1.0);
    const double ce = std::abs(err_max[i] / err_max[i - 1] - 1.0);
    worst_change = std::max({worst_change, cg, ce});
  }
  stable = stable && worst_change <= a.ratio_tol;

  // Slope of the gap at t = N^{-γ/d}.
  const KernelSpec ks = riesz_kernel(grid, a.gamma_slope);
  const PairInteraction ps(ks);
  std::vector<double> lx, ly;
  for (int n : a.slope_points) {
    const double t = std::pow(double(n), -a.gamma_slope);
    const auto g = energy_gap(quantile_configuration(n, a.phi_amplitude), ps, ks, t);
    lx.push_back(std::log(double(n)));
    ly.push_back(std::log(std::abs(g.gap)));
    r.rows.push_back({2.0, double(n), t, g.gap, g.bound_shape, g.ratio});
  }
  const double slope = slope_fit(lx, ly), expected = -a.gamma_slope;
  const bool slope_ok = std::abs(slope / expected - 1.0) <= a.slope_tol;
  r.notes.push_back("kind 0 = energy gap ratio, 1 = test error ratio, 2 = gap at t = N^(-gamma/d)");
  r.metrics = {{"max_ratio_change", worst_change}, {"slope", slope}, {"slope_expected", expected}};
  for (std::size_t i = 0; i < gap_max.size(); ++i) {
    r.metrics.push_back({"gap_ratio_max_N" + std::to_string(a.n_points[i]), gap_max[i]});
    r.metrics.push_back({"err_ratio_max_N" + std::to_string(a.n_points[i]), err_max[i]});
  }
  r.pass = stable && slope_ok;
  r.summary = "max ratio change across N " + fmt(worst_change) + " (tol " + fmt(a.ratio_tol) + "), gap slope " +
              fmt(slope) + " vs " + fmt(expected) + " (tol " + fmt(100 * a.slope_tol) + "%)";
  r.seconds = sw.seconds();
  return r;
}

namespace {

ProbabilityDensity construction_target(const TorusGrid& grid, double amplitude) {
  return ProbabilityDensity::normalized(GridField::from_function(
      grid, [&](auto x) { return 1.0 + amplitude * std::cos(2.0 * kPi * x[0] + 0.7); }));
}

}  // namespace

Configuration construction_sample(const ConstructionAudit& a, std::size_t n_points, std::uint64_t seed) {
  ConstructionParams params;
  params.p = a.p;
  params.a = a.a;
  params.seed = seed;
  return generate(construction_target(TorusGrid(1, 1024), a.phi_amplitude), n_points, params).config;
}

CriterionResult audit_construction(const ConstructionAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 6;
  r.name = "cube construction";
  r.columns = {"N", "seed", "separation_ok", "counts_ok", "min_separation", "separation_bound", "energy_defect",
               "err", "envelope", "shape"};
  const TorusGrid grid(1, 1024);
  const KernelSpec kernel = riesz_kernel(grid, 2.0);
  const Potential V = Potential::cosine(grid, a.v_amplitude);
  const auto eq = solve_equilibrium(kernel, V);
  const PairInteraction pair(kernel);
  const auto phi = construction_target(grid, a.phi_amplitude);
  const std::vector<GridField> fs{cosine_mode(grid, 1)};
  bool all_ok = true, within = true;
  std::vector<double> defects, chats;
  for (int n : a.n_points) {
    double defect_sum = 0.0, chat = 0.0;
    for (int s = 0; s < a.seeds; ++s) {
      ConstructionParams params;
      params.p = a.p;
      params.a = a.a;
      params.seed = a.seed + 1000 * s + n;
      const auto c = generate(phi, n, params);
      const auto rep = verify(c, phi, fs, a.alpha, params, kernel, pair, eq.mu);
      const auto& te = rep.test_errors.front();
      all_ok = all_ok && rep.separation_ok && rep.counts_ok;
      within = within && te.err <= te.envelope;
      defect_sum += rep.energy_defect;
      chat = te.envelope / te.shape;
      r.rows.push_back({double(n), double(s), double(rep.separation_ok), double(rep.counts_ok), rep.min_separation,
                        rep.separation_bound, rep.energy_defect, te.err, te.envelope, te.shape});
    }
    defects.push_back(defect_sum / a.seeds);
    chats.push_back(chat);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < defects.size(); ++i) decreasing = decreasing && defects[i] < defects[i - 1];
  const double cm = median(chats);
  double spread = 0.0;
  for (double c : chats) spread = std::max(spread, std::abs(c / cm - 1.0));
  for (std::size_t i = 0; i < defects.size(); ++i) {
    r.metrics.push_back({"mean_defect_N" + std::to_string(a.n_points[i]), defects[i]});
    r.metrics.push_back({"C_hat_N" + std::to_string(a.n_points[i]), chats[i]});
  }
  r.metrics.push_back({"C_hat_spread", spread});
  r.pass = all_ok && within && decreasing && spread <= a.c_tol;
  r.summary = std::string(all_ok ? "all" : "NOT all") + " configurations separated with exact counts; mean defect " +
              (decreasing ? "strictly decreasing" : "NOT decreasing") + "; C_hat spread " + fmt(spread) + " (tol " +
              fmt(a.c_tol) + ")" + (within ? "" : "; err exceeded envelope");
  r.seconds = sw.seconds();
  return r;
}

namespace {

struct GibbsRun {
  KernelSpec kernel;
  Potential V;
  EquilibriumApprox eq;
  ThermalEquilibrium thermal;
  GridField f;
  double beta;
  double theta;
  double n2beta;
  std::vector<double> fluct;
  double acceptance;
  double max_drift;
  double tau_energy;
};

GibbsRun gibbs_run(const GibbsAudit& a) {
  const TorusGrid grid(a.dim, a.n, a.side);
  KernelSpec kernel = a.kernel.build(grid);
  Potential V = a.potential.build(grid);
  const double n = static_cast<double>(a.n_points);
  const double beta = a.beta > 0.0 ? a.beta : 1.0 / std::sqrt(n);
  const double theta = n * beta;
  auto eq = solve_equilibrium(kernel, V);
  auto th = solve_thermal(kernel, V, theta);
  GridField f = cosine_mode(grid, a.test_mode);
  const GibbsModel model(kernel, V, {a.n_points, beta});
  ChainOptions o;
  o.burn_in = a.burn_in;
  o.thin = a.thin;
  const std::size_t per_chain = (a.samples + a.chains - 1) / a.chains;
  o.sweeps = per_chain * a.thin;
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < a.chains; ++k) seeds.push_back(a.seed + k);
  const auto chains = run_chains(model, o, seeds, a.threads);
  const FluctuationObservable obs(f, eq.mu);
  std::vector<double> fluct;
  double acc = 0.0, drift = 0.0, tau = 0.0;
  for (const auto& c : chains) {
    for (const auto& s : c.samples) {
      if (fluct.size() == a.samples) break;
      fluct.push_back(obs(s));
    }
    acc += c.acceptance_rate / chains.size();
    drift = std::max(drift, c.max_drift);
    tau = std::max(tau, c.tau_energy);
  }
  return {std::move(kernel), std::move(V), std::move(eq), std::move(th), std::move(f), beta, theta,
          n * n * beta, std::move(fluct), acc, drift, tau};
}

void chain_metrics(CriterionResult& r, const GibbsRun& g) {
  r.metrics.push_back({"beta", g.beta});
  r.metrics.push_back({"theta", g.theta});
  r.metrics.push_back({"samples", double(g.fluct.size())});
  r.metrics.push_back({"acceptance", g.acceptance});
  r.metrics.push_back({"max_energy_drift", g.max_drift});
  r.metrics.push_back({"tau_energy_per_sample", g.tau_energy});
  r.metrics.push_back({"mean_fluct", mean(g.fluct)});
}

}  // namespace

CriterionResult audit_concentration(const GibbsAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 7;
  r.name = "concentration (one-sided)";
  r.columns = {"r", "p_hat", "p_lo", "p_hi", "rate", "rate_ci", "leading", "censored", "pass", "R_eq", "R_thermal"};
  const auto g = gibbs_run(a);
  const double hn = h_half_norm_sq(g.kernel, g.f);
  auto rep = concentration_report(g.fluct, g.n2beta, hn, a.conc_r);
  attach_rate_terms(rep, g.kernel, g.f, g.eq, g.thermal);
  bool pass = true;
  int tested = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : rep.points) {
    pass = pass && p.pass;
    if (!p.censored) {
      ++tested;
      worst = std::min(worst, (p.rate - p.leading + 3.0 * p.rate_ci));
    }
    r.rows.push_back({p.r, p.p_hat, p.p_ci.lo, p.p_ci.hi, p.rate, p.rate_ci, p.leading, double(p.censored),
                      double(p.pass), p.rate_term_eq, p.rate_term_thermal});
  }
  chain_metrics(r, g);
  r.metrics.push_back({"h_half_norm_sq", hn});
  r.metrics.push_back({"tau_abs_fluct", rep.tau});
  r.metrics.push_back({"n_eff", rep.n_eff});
  r.metrics.push_back({"r0_eq", rep.r0_eq});
  r.metrics.push_back({"r0_thermal", rep.r0_thermal});
  r.metrics.push_back({"min_margin", worst});
  r.pass = pass && tested > 1;
  r.summary = std::to_string(tested) + " uncensored radii, min (rate - leading + 3 CI) = " + fmt(worst) +
              ", tau = " + fmt(rep.tau);
  r.seconds = sw.seconds();
  return r;
}

CriterionResult audit_laplace(const GibbsAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 8;
  r.name = "Laplace sandwich";
  r.columns = {"r", "estimate", "std_error", "ess", "gated", "lower", "upper", "lower_applicable", "allowance", "pass"};
  const auto g = gibbs_run(a);
  const double tau = autocorrelation_time(g.fluct);
  if (tau >= g.fluct.size() / 50.0) throw StationarityGateFailed("autocorrelation time " + fmt(tau) + " too long");
  std::vector<LaplacePrediction> pred;
  for (double rr : a.laplace_r) pred.push_back(laplace_prediction(g.kernel, g.f, g.eq, g.theta, rr));
  const int d = g.kernel.dim();
  const double ps = p_star(a.laplace_alpha, g.kernel.lambda(), g.kernel.gamma(), d);
  const double c_hat = 1.0 + sobolev_seminorm(g.eq.mu.field(), std::max(0.0, a.laplace_alpha - g.kernel.gamma()));
  LaplaceOptions lo;
  lo.rate_allowance = c_hat * std::pow(double(a.n_points), ps);
  const auto rep = laplace_report(g.fluct, g.n2beta, a.laplace_r, pred, lo);
  bool pass = rep.slope_pass && rep.convex;
  int tested = 0;
  for (const auto& p : rep.points) {
    pass = pass && p.pass;
    tested += !p.gated;
    r.rows.push_back({p.r, p.estimate, p.std_error, p.ess, double(p.gated), p.lower, p.upper,
                      double(p.lower_applicable), p.allowance, double(p.pass)});
  }
  // r0: the largest r with μ_∞ + r h_{-1}(f)/2 >= 0.
  const double r0 = 2.0 * positivity_radius(g.eq.mu, apply_h_alpha(g.kernel, g.f, -1.0));
  chain_metrics(r, g);
  r.metrics.push_back({"tau_fluct", tau});
  r.metrics.push_back({"p_star", ps});
  r.metrics.push_back({"rate_allowance", lo.rate_allowance});
  r.metrics.push_back({"r0", r0});
  r.metrics.push_back({"slope_estimate", rep.slope_estimate});
  r.metrics.push_back({"slope_expected", rep.slope_expected});
  r.metrics.push_back({"slope_std_error", rep.slope_std_error});
  r.metrics.push_back({"convex", double(rep.convex)});
  r.pass = pass && tested > 2;
  std::string failing;
  for (const auto& p : rep.points)
    if (!p.pass) failing += (failing.empty() ? "" : ",") + fmt(p.r);
  r.summary = std::to_string(tested) + " radii in the sandwich" + (failing.empty() ? "" : " except r=" + failing) +
              "; slope " + (rep.slope_pass ? "ok" : "off") + ", convexity " + (rep.convex ? "ok" : "violated") +
              ", r0 = " + fmt(r0);
  r.seconds = sw.seconds();
  return r;
}

CriterionResult audit_admissibility(const AdmissibilityAudit& a) {
  Stopwatch sw;
  CriterionResult r;
  r.id = 9;
  r.name = "heat kernel audit";
  r.columns = {"case", "d", "n", "min_p", "argmin_s", "C"};
  const auto s_sweep = logspace(1e-4, 1.0, a.s_count);
  double worst_min = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= 2; ++d) {
    const TorusGrid grid(d, d == 1 ? a.n_1d : a.n_2d, 1.0, std::size_t{1} << 22);
    const auto rep = check_admissibility(coulomb_kernel(grid), grid, s_sweep);
    worst_min = std::min(worst_min, rep.min_p);
    r.rows.push_back({0.0, double(d), double(grid.n()), rep.min_p, rep.argmin_s, rep.admissibility_C});
  }
  bool stable = true;
  double worst_change = 0.0;
  for (double gamma : a.riesz_gammas) {
    double c[2];
    for (int level = 0; level < 2; ++level) {
      const TorusGrid grid(1, a.n_1d << level, 1.0, std::size_t{1} << 22);
      const auto rep = check_admissibility(riesz_kernel(grid, gamma), grid, s_sweep);
      c[level] = rep.admissibility_C;
      r.rows.push_back({gamma, 1.0, double(grid.n()), rep.min_p, rep.argmin_s, rep.admissibility_C});
      r.metrics.push_back({"C_riesz_" + fmt(gamma) + "_n" + std::to_string(grid.n()), rep.admissibility_C});
    }
    const double change = std::abs(c[1] - c[0]) / std::max(std::abs(c[0]), 1e-12);
    if (!std::isfinite(c[0]) || !std::isfinite(c[1]) || (std::max(c[0], c[1]) > 1e-12 && change > a.c_tol))
      stable = false;
    if (std::max(c[0], c[1]) > 1e-12) worst_change = std::max(worst_change, change);
  }
  r.notes.push_back("case 0 = coulomb, otherwise the riesz gamma");
  r.metrics.push_back({"coulomb_min_p", worst_min});
  r.metrics.push_back({"riesz_C_change", worst_change});
  r.pass = worst_min >= a.min_p_tol && stable;
  r.summary = "coulomb min T^d p = " + fmt(worst_min) + "; riesz C finite, change under doubling " + fmt(worst_change);
  r.seconds = sw.seconds();
  return r;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  switch (id) {
    case 1: {
      SpectralAudit a;
      a.seed = options.seed;
      return audit_spectral(a);
    }
    case 2: {
      SplittingAudit a;
      a.seed = options.seed + 1;
      return audit_splitting(a);
    }
    case 3: {
      ThermalAudit a;
      a.seed = options.seed + 2;
      return audit_thermal(a);
    }
    case 4:
      return audit_partition({});
    case 5:
      return audit_regularization({});
    case 6: {
      ConstructionAudit a;
      a.seed = options.seed + 5;
      return audit_construction(a);
    }
    case 7:
    case 8: {
      GibbsAudit a;
      a.seed = options.seed + 6;
      a.threads = options.threads;
      return id == 7 ? audit_concentration(a) : audit_laplace(a);
    }
    case 9:
      return audit_admissibility({});
    default:
      throw InvalidArgument("criteria are numbered 1.." + std::to_string(kCriteria));
  }
}

}  // namespace torusgas
