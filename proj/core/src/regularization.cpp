#include "torusgas/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torusgas/errors.hpp"
#include "torusgas/spectral.hpp"

namespace torusgas {

namespace {

void require_same_torus(const Configuration& config, const KernelSpec& kernel) {
  if (config.dim() != kernel.dim() || config.side() != kernel.side())
    throw InvalidArgument("configuration and kernel live on different tori");
}

double damping(const KernelSpec& kernel, const std::array<int, 3>& m, double t) {
  if (m[0] == 0 && m[1] == 0 && m[2] == 0) return 1.0;
  return std::exp(-t / kernel.coefficient(m));
}

double energy_shape(double t, std::size_t n, double gamma, int d) {
  return std::pow(t, 1.0 - d / gamma) / static_cast<double>(n) + t;
}

// Second p* branch bracket λ/α - λd/(αγ) - 1.
double p_bracket(double alpha, double lambda, double gamma, int d) {
  return lambda / alpha - lambda * d / (alpha * gamma) - 1.0;
}

}  // namespace

ProbabilityDensity RegularizedEmpirical::probability() const {
  std::vector<double> v(density.values().begin(), density.values().end());
  for (double& x : v) x = std::max(x, 0.0);
  return ProbabilityDensity::normalized(GridField(density.grid(), std::move(v)));
}

RegularizedEmpirical regularize(const Configuration& config, const KernelSpec& kernel, double t, const TorusGrid& grid) {
  if (!(t > 0.0)) throw InvalidArgument("regularization time must be positive");
  require_same_torus(config, kernel);
  const int half = grid.n() / 2;
  const auto box = empirical_moments(config, half);
  const double inv_vol = 1.0 / grid.volume();
  std::vector<Complex> c(grid.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    // A Nyquist component stands for both ±n/2; averaging the two keeps the
    // spectrum Hermitian so the synthesized field is real.
    const auto m = grid.lattice(i);
    std::array<int, 3> v = m;
    int nyq[3], count = 0;
    for (int k = 0; k < grid.dim(); ++k)
      if (m[k] == -half) nyq[count++] = k;
    Complex sum = 0.0;
    for (int mask = 0; mask < (1 << count); ++mask) {
      for (int b = 0; b < count; ++b) v[nyq[b]] = (mask >> b & 1) ? half : -half;
      sum += box.at(v);
    }
    c[i] = sum / static_cast<double>(1 << count) * damping(kernel, m, t) * inv_vol;
  }
  GridField density = inverse_transform(SpectralField(grid, std::move(c)));
  const double lo = density.min();
  if (lo < -1e-10) {
    std::ostringstream os;
    os << "regularized density reaches " << lo << " at t=" << t;
    warn("NegativeDensity", os.str());
  }
  return {t, std::move(density), lo, config};
}

int regularization_cutoff(const KernelSpec& kernel, double t, double tol) {
  if (!(t > 0.0)) throw InvalidArgument("regularization time must be positive");
  int m = 1;
  while (damping(kernel, {m, 0, 0}, t) > tol) {
    if (m > (1 << 26)) throw BudgetExceeded("regularization cutoff beyond 2^26 modes");
    m *= 2;
  }
  return m;
}

double regularized_energy(const KernelSpec& kernel, const EmpiricalMoments& moments, double t) {
  const int d = moments.dim();
  const int M = moments.cutoff();
  const int w = 2 * M + 1;
  auto coeffs = moments.coeffs();
  long double s = 0.0L;
  std::array<int, 3> m{0, 0, 0};
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    std::size_t rest = i;
    for (int k = d - 1; k >= 0; --k) {
      m[k] = static_cast<int>(rest % w) - M;
      rest /= w;
    }
    const double dmp = damping(kernel, m, t);
    if (dmp == 0.0) continue;
    s += kernel.coefficient(m) * dmp * dmp * std::norm(coeffs[i]);
  }
  return static_cast<double>(s) / std::pow(kernel.side(), d);
}

std::vector<EnergyGap> energy_gap_sweep(const Configuration& config, const PairInteraction& pair,
                                        const KernelSpec& kernel, const std::vector<double>& ts) {
  require_same_torus(config, kernel);
  if (ts.empty()) return {};
  const double t_min = *std::min_element(ts.begin(), ts.end());
  const int cutoff = regularization_cutoff(kernel, t_min);
  std::size_t box = 1;
  for (int k = 0; k < config.dim(); ++k) box *= static_cast<std::size_t>(2 * cutoff + 1);
  if (box * config.size() > (std::size_t{1} << 34))
    throw BudgetExceeded("moment box of " + std::to_string(box) + " modes is too large for t=" + std::to_string(t_min));
  const auto moments = empirical_moments(config, cutoff);
  const double e_pair = pair_energy(pair, config);
  std::vector<EnergyGap> out;
  out.reserve(ts.size());
  for (double t : ts) {
    if (!(t > 0.0)) throw InvalidArgument("regularization time must be positive");
    EnergyGap g{};
    g.n_points = config.size();
    g.t = t;
    g.regularized = regularized_energy(kernel, moments, t);
    g.pair = e_pair;
    g.gap = g.regularized - e_pair;
    g.bound_shape = energy_shape(t, config.size(), kernel.gamma(), config.dim());
    g.ratio = g.gap / g.bound_shape;
    g.cutoff = cutoff;
    out.push_back(g);
  }
  return out;
}

EnergyGap energy_gap(const Configuration& config, const PairInteraction& pair, const KernelSpec& kernel, double t) {
  return energy_gap_sweep(config, pair, kernel, {t}).front();
}

std::vector<TestError> test_error_sweep(const Configuration& config, const KernelSpec& kernel, const GridField& f,
                                        const std::vector<double>& ts, double alpha) {
  require_same_torus(config, kernel);
  const auto& grid = f.grid();
  const auto fhat = forward_transform(f);
  const auto moments = empirical_moments_on_grid(config, grid);
  const double norm = sobolev_seminorm(fhat, alpha);
  std::vector<TestError> out;
  out.reserve(ts.size());
  for (double t : ts) {
    if (!(t > 0.0)) throw InvalidArgument("regularization time must be positive");
    Complex s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      auto m = grid.lattice(i);
      // ẽ(-m) = conj ẽ(m) for a real configuration.
      s += fhat[i] * std::conj(moments[i]) * (damping(kernel, m, t) - 1.0);
    }
    TestError e{};
    e.t = t;
    e.err = std::abs(s);
    e.bound_shape = std::max(t, std::pow(t, alpha / kernel.lambda())) * norm;
    e.ratio = e.bound_shape > 0.0 ? e.err / e.bound_shape : 0.0;
    out.push_back(e);
  }
  return out;
}

TestError test_error(const Configuration& config, const KernelSpec& kernel, const GridField& f, double t, double alpha) {
  return test_error_sweep(config, kernel, f, {t}, alpha).front();
}

double optimal_t_exponent(double alpha, double lambda, double gamma, int d) {
  if (!(alpha > 0.0) || !(lambda > 0.0) || !(gamma > 0.0) || d < 1)
    throw InvalidArgument("exponent parameters must be positive");
  const double fallback = -gamma / d;
  if (alpha >= lambda) return fallback;
  const double denom = 1.0 - d / gamma - alpha / lambda;
  if (std::abs(denom) < 1e-12) {
    warn("DegenerateExponent", "optimal t exponent (1 - d/γ - α/λ)^{-1} has a zero denominator, using -γ/d");
    return fallback;
  }
  if (denom > 0.0) {
    warn("DegenerateExponent", "optimal t exponent (1 - d/γ - α/λ)^{-1} is positive, using -γ/d");
    return fallback;
  }
  return 1.0 / denom;
}

double optimal_t(double n_points, double alpha, double lambda, double gamma, int d) {
  if (!(n_points >= 1.0)) throw InvalidArgument("N must be >= 1");
  return std::pow(n_points, optimal_t_exponent(alpha, lambda, gamma, d));
}

double p_star(double alpha, double lambda, double gamma, int d) {
  if (!(alpha > 0.0) || !(lambda > 0.0) || !(gamma > 0.0) || d < 1)
    throw InvalidArgument("exponent parameters must be positive");
  const double first = -gamma / d;
  if (std::isinf(alpha)) return std::max(first, -1.0);
  const double bracket = p_bracket(alpha, lambda, gamma, d);
  if (std::abs(bracket) < 1e-12) {
    std::ostringstream os;
    os << "λ/α - λd/(αγ) - 1 = 0 at α=" << alpha << " λ=" << lambda << " γ=" << gamma << " d=" << d;
    throw DegenerateExponent(os.str());
  }
  const double second = 1.0 / bracket;
  if (second >= 0.0) {
    warn("DegenerateExponent", "second p* branch is nonnegative, using -γ/d");
    return first;
  }
  return std::max(first, second);
}

ExponentTable exponents(double alpha, double kappa, double lambda, double gamma, int d, double s) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  ExponentTable e{};
  e.p_star = p_star(alpha, lambda, gamma, d);
  e.q_star = p_star(std::min(alpha, kappa), lambda, gamma, d);
  e.m_star = std::max(e.p_star, (s - d) / d);
  e.optimal_t_exponent = optimal_t_exponent(alpha, lambda, gamma, d);
  e.second_branch_valid = std::isinf(alpha) || 1.0 / p_bracket(alpha, lambda, gamma, d) < 0.0;
  return e;
}

}  // namespace torusgas
