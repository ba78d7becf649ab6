#include "torusgas/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "torusgas/errors.hpp"
#include "torusgas/fft.hpp"
#include "torusgas/spectral.hpp"

namespace torusgas {

namespace {

double lattice_norm(const LatticePoint& m, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += double(m[k]) * m[k];
  return std::sqrt(s);
}

Singularity singularity_for(double gamma, int dim) {
  if (gamma < dim - 1e-12) return PowerLawSingularity{dim - gamma};
  if (std::abs(gamma - dim) <= 1e-12) return LogarithmicSingularity{};
  return BoundedKernel{};
}

struct Fit {
  double slope, intercept, residual;
};

// Least squares y = a + b x.
Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  double b = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  double a = (sy - b * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - a - b * x[i], 2);
  return {b, a, std::sqrt(rss / std::max(1.0, n))};
}

// Regression of log ĝ against log|m| over the resolved nonzero lattice.
Fit fit_decay(const KernelSpec& kernel, const TorusGrid& grid) {
  std::vector<double> x, y;
  x.reserve(grid.size());
  y.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto m = grid.lattice(i);
    double r = lattice_norm(m, grid.dim());
    if (r == 0.0) continue;
    x.push_back(std::log(r));
    y.push_back(std::log(kernel.coefficient(m)));
  }
  return linear_fit(x, y);
}

}  // namespace

std::string describe(const Singularity& s) {
  if (auto* p = std::get_if<PowerLawSingularity>(&s)) {
    std::ostringstream os;
    os << "power-law(s=" << p->s << ")";
    return os.str();
  }
  if (std::holds_alternative<LogarithmicSingularity>(s)) return "logarithmic";
  return "bounded";
}

double singularity_exponent(const Singularity& s) {
  if (auto* p = std::get_if<PowerLawSingularity>(&s)) return p->s;
  return 0.0;
}

KernelSpec::KernelSpec(std::string name, int dim, double side, Rule rule, double zero_mode, double gamma,
                       double lambda, Singularity singularity, std::vector<std::pair<std::string, double>> parameters)
    : name_(std::move(name)),
      dim_(dim),
      side_(side),
      rule_(std::move(rule)),
      zero_mode_(zero_mode),
      gamma_(gamma),
      lambda_(lambda),
      singularity_(singularity),
      parameters_(std::move(parameters)) {
  if (!(zero_mode > 0.0)) throw NonPositiveCoefficient("zero mode must be positive");
  if (!(gamma > 0.0) || !(lambda > 0.0)) throw InvalidArgument("kernel exponents must be positive");
}

double KernelSpec::coefficient(const LatticePoint& m) const {
  bool zero = true;
  for (int k = 0; k < dim_; ++k) zero = zero && m[k] == 0;
  return zero ? zero_mode_ : rule_(m);
}

void KernelSpec::require_compatible(const TorusGrid& grid) const {
  if (grid.dim() != dim_ || std::abs(grid.side() - side_) > 1e-14 * side_)
    throw InvalidArgument("kernel '" + name_ + "' is bound to a different torus than the grid");
}

std::vector<double> KernelSpec::coefficients(const TorusGrid& grid) const {
  require_compatible(grid);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double c = coefficient(grid.lattice(i));
    if (!(c > 0.0) || !std::isfinite(c)) {
      std::ostringstream os;
      os << "kernel '" << name_ << "' has coefficient " << c << " at flat index " << i;
      throw NonPositiveCoefficient(os.str());
    }
    out[i] = c;
  }
  return out;
}

KernelSpec riesz_kernel(const TorusGrid& grid, double gamma, double zero_mode) {
  if (!(gamma > 0.0)) throw InvalidArgument("riesz gamma must be positive");
  const int dim = grid.dim();
  return KernelSpec(
      "riesz", dim, grid.side(), [gamma, dim](const LatticePoint& m) { return std::pow(lattice_norm(m, dim), -gamma); },
      zero_mode, gamma, gamma, singularity_for(gamma, dim), {{"gamma", gamma}, {"zero_mode", zero_mode}});
}

KernelSpec coulomb_kernel(const TorusGrid& grid, double zero_mode) {
  const int dim = grid.dim();
  const double side = grid.side();
  return KernelSpec(
      "coulomb", dim, side,
      [dim, side](const LatticePoint& m) {
        double k = 2.0 * std::numbers::pi * lattice_norm(m, dim) / side;
        return 1.0 / (k * k);
      },
      zero_mode, 2.0, 2.0, singularity_for(2.0, dim), {{"zero_mode", zero_mode}});
}

KernelSpec custom_kernel(const TorusGrid& grid, std::string name, KernelSpec::Rule rule, double gamma, double lambda,
                         double zero_mode) {
  return KernelSpec(std::move(name), grid.dim(), grid.side(), std::move(rule), zero_mode, gamma, lambda,
                    singularity_for(gamma, grid.dim()), {{"gamma", gamma}, {"lambda", lambda}, {"zero_mode", zero_mode}});
}

KernelSpec tabulated_kernel(const TorusGrid& grid, const std::map<LatticePoint, double>& entries, double zero_mode) {
  const int dim = grid.dim();
  auto table = std::make_shared<std::map<LatticePoint, double>>();
  for (const auto& [key, v] : entries) {
    LatticePoint m = key;
    for (int k = dim; k < 3; ++k) m[k] = 0;
    if (!(v > 0.0) || !std::isfinite(v)) throw NonPositiveCoefficient("tabulated kernel has a non-positive entry");
    (*table)[m] = v;
  }
  LatticePoint origin{0, 0, 0};
  if (auto it = table->find(origin); it != table->end()) zero_mode = it->second;
  KernelSpec::Rule rule = [table, dim](const LatticePoint& m) {
    auto it = table->find(m);
    if (it != table->end()) return it->second;
    LatticePoint neg{0, 0, 0};
    for (int k = 0; k < dim; ++k) neg[k] = -m[k];
    it = table->find(neg);
    if (it != table->end()) return it->second;
    std::ostringstream os;
    os << "tabulated kernel has no entry for m = (" << m[0] << "," << m[1] << "," << m[2] << ")";
    throw InvalidArgument(os.str());
  };
  // Exponents come from a provisional kernel; the fit needs the rule only.
  KernelSpec provisional("table", dim, grid.side(), rule, zero_mode, 1.0, 1.0, BoundedKernel{});
  Fit fit = fit_decay(provisional, grid);
  double gamma = std::max(1e-6, -fit.slope);
  return KernelSpec("table", dim, grid.side(), rule, zero_mode, gamma, gamma, singularity_for(gamma, dim),
                    {{"gamma_fit", gamma}, {"zero_mode", zero_mode}});
}

KernelSpec load_tabulated_kernel(const TorusGrid& grid, const std::string& path, double zero_mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open kernel table " + path);
  std::map<LatticePoint, double> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> nums;
    double v;
    while (ls >> v) nums.push_back(v);
    if (nums.empty()) continue;
    if (static_cast<int>(nums.size()) != grid.dim() + 1)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected d lattice indices and a value");
    LatticePoint m{0, 0, 0};
    for (int k = 0; k < grid.dim(); ++k) m[k] = static_cast<int>(std::lround(nums[k]));
    entries[m] = nums.back();
  }
  return tabulated_kernel(grid, entries, zero_mode);
}

SpectralField apply_h_alpha(const KernelSpec& kernel, const SpectralField& f, double alpha) {
  auto ghat = kernel.coefficients(f.grid());
  std::vector<double> mult(ghat.size());
  for (std::size_t i = 0; i < ghat.size(); ++i) mult[i] = std::pow(ghat[i], alpha);
  if (alpha <= 0.0) mult[0] = 0.0;
  return multiply(f, mult);
}

GridField apply_h_alpha(const KernelSpec& kernel, const GridField& f, double alpha) {
  return inverse_transform(apply_h_alpha(kernel, forward_transform(f), alpha));
}

std::vector<double> heat_multiplier(const KernelSpec& kernel, const TorusGrid& grid, double t) {
  if (!(t > 0.0)) throw InvalidArgument("heat kernel time must be positive");
  auto ghat = kernel.coefficients(grid);
  std::vector<double> out(ghat.size());
  for (std::size_t i = 0; i < ghat.size(); ++i) {
    double e = -t / ghat[i];
    out[i] = e < -690.0 ? 0.0 : std::exp(e);
  }
  out[0] = 1.0;
  return out;
}

HeatKernelField heat_kernel(const KernelSpec& kernel, const TorusGrid& grid, double t) {
  auto mult = heat_multiplier(kernel, grid, t);
  std::vector<Complex> coeffs(mult.size());
  const double inv_vol = 1.0 / grid.volume();
  for (std::size_t i = 0; i < mult.size(); ++i) coeffs[i] = mult[i] * inv_vol;
  return {t, inverse_transform(SpectralField(grid, std::move(coeffs)))};
}

namespace {

int default_max_n(int dim) {
  switch (dim) {
    case 1: return 1 << 22;
    case 2: return 1 << 11;
    default: return 1 << 8;
  }
}

// C∞ roll-off from 1 at half the Nyquist frequency to 0 at Nyquist. A hard
// cutoff leaves an oscillating tail of size ~n^{-γ} away from the origin,
// which for γ < 1 never reaches a useful tolerance; the smooth window makes
// that error decay faster than any power of n.
double window(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double s = 2.0 * (r - 0.5);
  const double a = std::exp(-1.0 / (1.0 - s)), b = std::exp(-1.0 / s);
  return a / (a + b);
}

std::vector<double> synthesize_g(const KernelSpec& kernel, const TorusGrid& grid) {
  auto ghat = kernel.coefficients(grid);
  const double inv_vol = 1.0 / grid.volume();
  const double nyquist = grid.n() / 2.0;
  std::vector<Complex> coeffs(ghat.size());
  for (std::size_t i = 0; i < ghat.size(); ++i) {
    auto m = grid.lattice(i);
    double w = 1.0;
    for (int k = 0; k < grid.dim(); ++k) w *= window(std::abs(m[k]) / nyquist);
    coeffs[i] = ghat[i] * w * inv_vol;
  }
  auto out = fft::backward(grid, coeffs);
  std::vector<double> values(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) values[i] = out[i].real();
  return values;
}

// Torus distance of node idx (per-axis indices) from the origin.
double node_distance(const TorusGrid& grid, const std::array<int, 3>& idx) {
  double s = 0.0;
  for (int k = 0; k < grid.dim(); ++k) {
    int j = std::min(idx[k], grid.n() - idx[k]);
    s += std::pow(j * grid.spacing(), 2);
  }
  return std::sqrt(s);
}

// Restriction of a fine-grid field to the nodes of a coarser grid.
std::vector<double> restrict_to(const TorusGrid& fine, const std::vector<double>& values, const TorusGrid& coarse) {
  const int stride = fine.n() / coarse.n();
  std::vector<double> out(coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    auto idx = coarse.unravel(i);
    for (int k = 0; k < coarse.dim(); ++k) idx[k] *= stride;
    out[i] = values[fine.ravel(idx)];
  }
  return out;
}

}  // namespace

RealSpaceKernel evaluate_g_real(const KernelSpec& kernel, int n, const RealSpaceOptions& options) {
  TorusGrid target(kernel.dim(), n, kernel.side());
  const int max_n = options.max_n > 0 ? options.max_n : std::max(default_max_n(kernel.dim()), 2 * n);
  const double exclusion = options.exclusion * kernel.side();
  const bool singular = !std::holds_alternative<BoundedKernel>(kernel.singularity());

  TorusGrid coarse(kernel.dim(), n, kernel.side(), std::size_t{1} << 30);
  auto coarse_values = synthesize_g(kernel, coarse);
  double change = std::numeric_limits<double>::infinity();
  while (true) {
    if (2 * coarse.n() > max_n) {
      std::ostringstream os;
      os << "real-space g of '" << kernel.name() << "' still changes by " << change << " at n=" << coarse.n();
      throw SlowConvergence(os.str());
    }
    TorusGrid fine = coarse.with_n(2 * coarse.n());
    auto fine_values = synthesize_g(kernel, fine);
    auto restricted = restrict_to(fine, fine_values, coarse);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      if (node_distance(coarse, coarse.unravel(i)) < exclusion) continue;
      diff = std::max(diff, std::abs(restricted[i] - coarse_values[i]));
      scale = std::max(scale, std::abs(restricted[i]));
    }
    change = diff / std::max(scale, 1e-300);
    if (change < options.rel_tol) {
      auto sampled = restrict_to(fine, fine_values, target);
      return {GridField(target, std::move(sampled)), fine.n(), change, singular};
    }
    coarse = fine;
    coarse_values = std::move(fine_values);
  }
}

std::vector<double> logspace(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi > 0.0)) throw InvalidArgument("logspace needs positive bounds and count");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  return out;
}

AdmissibilityReport check_admissibility(const KernelSpec& kernel, const TorusGrid& grid,
                                        const std::vector<double>& s_sweep) {
  kernel.coefficients(grid);  // NonPositiveCoefficient on the base lattice
  AdmissibilityReport rep{};
  Fit fit = fit_decay(kernel, grid);
  rep.gamma_fit = -fit.slope;
  rep.lambda_fit = -fit.slope;
  rep.gamma_residual = fit.residual;
  rep.lambda_residual = fit.residual;

  rep.upper_constant = 0.0;
  rep.lower_constant = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    auto m = grid.lattice(i);
    double r = lattice_norm(m, grid.dim());
    double c = kernel.coefficient(m);
    rep.upper_constant = std::max(rep.upper_constant, c * std::pow(r, rep.gamma_fit));
    rep.lower_constant = std::min(rep.lower_constant, c * std::pow(r, rep.lambda_fit));
  }

  rep.min_p = std::numeric_limits<double>::infinity();
  rep.argmin_s = s_sweep.empty() ? 0.0 : s_sweep.front();
  for (double s : s_sweep) {
    if (!(s > 0.0)) throw InvalidArgument("s sweep must be positive");
    // Refine until the highest resolved mode is damped below 1e-16, so the
    // minimum is not a truncation (Gibbs) artifact.
    TorusGrid g = grid;
    while (true) {
      LatticePoint edge{g.n() / 2, 0, 0};
      double damping = std::exp(-s / kernel.coefficient(edge));
      if (damping < 1e-16) break;
      try {
        g = g.refined(2);
      } catch (const BudgetExceeded&) {
        warn("UnresolvedHeatKernel", "edge mode damping " + std::to_string(damping) + " at s=" + std::to_string(s));
        break;
      }
    }
    auto p = heat_kernel(kernel, g, s).field;
    double mn = p.min() * g.volume();
    rep.resolution_per_s.push_back(g.n());
    rep.min_p_per_s.push_back(mn);
    if (mn < rep.min_p) {
      rep.min_p = mn;
      rep.argmin_s = s;
    }
  }
  rep.admissibility_C = std::max(0.0, -rep.min_p);
  return rep;
}

}  // namespace torusgas
