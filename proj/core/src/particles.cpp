#include "torusgas/particles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "torusgas/errors.hpp"
#include "torusgas/spectral.hpp"

namespace torusgas {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw InvalidArgument("dimension must be 1, 2 or 3, got " + std::to_string(dim));
}

double wrap(double x, double side) {
  double r = std::fmod(x, side);
  if (r < 0) r += side;
  // fmod of a tiny negative can round up to exactly side.
  return r >= side ? 0.0 : r;
}

// e^{-2πi m x/T} for m = 0..cutoff. The recurrence is resynchronized every 64
// steps so the phase error stays at a few ulps for large cutoffs.
void phasors(double x, double side, int cutoff, std::vector<Complex>& out) {
  out.resize(cutoff + 1);
  const double w = -2.0 * std::numbers::pi * x / side;
  const Complex step = std::polar(1.0, w);
  out[0] = 1.0;
  for (int m = 1; m <= cutoff; ++m) {
    out[m] = (m % 64 == 0) ? std::polar(1.0, w * m) : out[m - 1] * step;
  }
}

}  // namespace

Configuration::Configuration(int dim, double side, std::vector<double> coords)
    : dim_(dim), side_(side), coords_(std::move(coords)) {
  check_dim(dim);
  if (!(side > 0) || !std::isfinite(side)) throw InvalidArgument("torus side must be positive");
  if (coords_.size() % dim != 0) throw InvalidArgument("coordinate count is not a multiple of d");
  for (double x : coords_) {
    if (!std::isfinite(x) || x < 0 || x >= side) throw InvalidArgument("coordinate outside [0,T)");
  }
}

Configuration Configuration::wrapped(int dim, double side, std::vector<double> coords) {
  for (double& x : coords) {
    if (!std::isfinite(x)) throw InvalidArgument("non-finite coordinate");
    x = wrap(x, side);
  }
  return Configuration(dim, side, std::move(coords));
}

Configuration Configuration::translated(std::span<const double> shift) const {
  if (static_cast<int>(shift.size()) != dim_) throw InvalidArgument("shift has wrong dimension");
  std::vector<double> c(coords_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = wrap(c[i] + shift[i % dim_], side_);
  return Configuration(dim_, side_, std::move(c));
}

Configuration Configuration::permuted(std::span<const std::size_t> order) const {
  if (order.size() != size()) throw InvalidArgument("permutation has wrong length");
  std::vector<bool> seen(size(), false);
  std::vector<double> c;
  c.reserve(coords_.size());
  for (std::size_t k : order) {
    if (k >= size() || seen[k]) throw InvalidArgument("not a permutation");
    seen[k] = true;
    c.insert(c.end(), point(k), point(k) + dim_);
  }
  return Configuration(dim_, side_, std::move(c));
}

double torus_distance(const double* a, const double* b, int dim, double side) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    double d = std::fabs(a[k] - b[k]);
    d = std::fmod(d, side);
    d = std::min(d, side - d);
    s += d * d;
  }
  return std::sqrt(s);
}

double Configuration::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) best = std::min(best, torus_distance(point(i), point(j), dim_, side_));
  return best;
}

void write_configuration_csv(const Configuration& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << std::setprecision(17) << "# d=" << config.dim() << " T=" << config.side() << '\n';
  for (int k = 0; k < config.dim(); ++k) out << (k ? ",x" : "x") << k;
  out << '\n';
  for (std::size_t i = 0; i < config.size(); ++i) {
    for (int k = 0; k < config.dim(); ++k) out << (k ? "," : "") << config.point(i)[k];
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

Configuration read_configuration_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  int d = 0;
  double side = 0.0;
  if (std::sscanf(line.c_str(), "# d=%d T=%lf", &d, &side) != 2) throw IoError(path + ": missing '# d=.. T=..' line");
  std::getline(in, line);  // column header
  std::vector<double> coords;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    int count = 0;
    double v;
    while (row >> v) {
      coords.push_back(v);
      ++count;
    }
    if (count != d) throw IoError(path + ": row with " + std::to_string(count) + " columns, expected " + std::to_string(d));
  }
  return Configuration(d, side, std::move(coords));
}

EmpiricalMoments::EmpiricalMoments(int dim, int cutoff, std::vector<Complex> coeffs)
    : dim_(dim), cutoff_(cutoff), coeffs_(std::move(coeffs)) {
  std::size_t expect = 1;
  for (int k = 0; k < dim; ++k) expect *= static_cast<std::size_t>(2 * cutoff + 1);
  if (coeffs_.size() != expect) throw InvalidArgument("moment table has wrong size");
}

Complex EmpiricalMoments::at(const std::array<int, 3>& m) const {
  const int w = 2 * cutoff_ + 1;
  std::size_t idx = 0;
  for (int k = 0; k < dim_; ++k) {
    if (std::abs(m[k]) > cutoff_) throw InvalidArgument("lattice point outside the moment box");
    idx = idx * w + (m[k] + cutoff_);
  }
  return coeffs_[idx];
}

EmpiricalMoments empirical_moments(const Configuration& config, int cutoff) {
  if (cutoff < 0) throw InvalidArgument("negative moment cutoff");
  const int d = config.dim();
  const int w = 2 * cutoff + 1;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= w;
  std::vector<Complex> acc(total, 0.0);
  std::array<std::vector<Complex>, 3> half;
  std::array<std::vector<Complex>, 3> full;
  for (auto& f : full) f.resize(w);
  for (std::size_t i = 0; i < config.size(); ++i) {
    for (int k = 0; k < d; ++k) {
      phasors(config.point(i)[k], config.side(), cutoff, half[k]);
      for (int m = 0; m <= cutoff; ++m) {
        full[k][cutoff + m] = half[k][m];
        full[k][cutoff - m] = std::conj(half[k][m]);
      }
    }
    if (d == 1) {
      for (int a = 0; a < w; ++a) acc[a] += full[0][a];
    } else if (d == 2) {
      for (int a = 0; a < w; ++a) {
        const Complex pa = full[0][a];
        Complex* row = acc.data() + static_cast<std::size_t>(a) * w;
        for (int b = 0; b < w; ++b) row[b] += pa * full[1][b];
      }
    } else {
      for (int a = 0; a < w; ++a)
        for (int b = 0; b < w; ++b) {
          const Complex pab = full[0][a] * full[1][b];
          Complex* row = acc.data() + (static_cast<std::size_t>(a) * w + b) * w;
          for (int c = 0; c < w; ++c) row[c] += pab * full[2][c];
        }
    }
  }
  const double inv = config.size() ? 1.0 / static_cast<double>(config.size()) : 0.0;
  for (auto& c : acc) c *= inv;
  return EmpiricalMoments(d, cutoff, std::move(acc));
}

std::vector<Complex> empirical_moments_on_grid(const Configuration& config, const TorusGrid& grid) {
  if (grid.dim() != config.dim() || grid.side() != config.side())
    throw InvalidArgument("configuration and grid live on different tori");
  const EmpiricalMoments box = empirical_moments(config, grid.n() / 2);
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = box.at(grid.lattice(i));
  return out;
}

int PairInteraction::default_resolution(int dim) {
  switch (dim) {
    case 1: return 1 << 16;
    case 2: return 1 << 9;
    default: return 1 << 6;
  }
}

PairInteraction::PairInteraction(const KernelSpec& kernel, int n, const RealSpaceOptions& options)
    : dim_(kernel.dim()),
      side_(kernel.side()),
      table_(evaluate_g_real(kernel, n ? n : default_resolution(kernel.dim()), options)),
      interp_(table_.field),
      min_sep_(table_.field.grid().spacing() / 16.0) {}

void require_separated(const PairInteraction& pair, const Configuration& config) {
  if (config.dim() != pair.dim() || config.side() != pair.side())
    throw InvalidArgument("configuration and kernel live on different tori");
  const double sep = config.min_distance();
  if (sep < pair.min_separation()) {
    std::ostringstream os;
    os << "two points at distance " << sep << " below the resolvable " << pair.min_separation();
    throw CoincidentPoints(os.str());
  }
}

double pair_energy(const PairInteraction& pair, const Configuration& config) {
  require_separated(pair, config);
  const int d = config.dim();
  const std::size_t n = config.size();
  if (n < 2) return 0.0;
  long double s = 0.0L;
  double dx[3];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      for (int k = 0; k < d; ++k) dx[k] = config.point(i)[k] - config.point(j)[k];
      s += pair(dx);
    }
  const double e = 2.0 * static_cast<double>(s) / (static_cast<double>(n) * n);
  if (!std::isfinite(e)) throw NonFiniteEnergy("pair energy is not finite");
  return e;
}

double empirical_mean(const PeriodicInterpolator& f, const Configuration& config) {
  if (config.size() == 0) throw InvalidArgument("empty configuration");
  long double s = 0.0L;
  for (std::size_t i = 0; i < config.size(); ++i) s += f(config.point(i));
  return static_cast<double>(s) / static_cast<double>(config.size());
}

double hamiltonian(const PairInteraction& pair, const PeriodicInterpolator& V, const Configuration& config) {
  const double n = static_cast<double>(config.size());
  const double h = n * n * pair_energy(pair, config) + n * n * empirical_mean(V, config);
  if (!std::isfinite(h)) throw NonFiniteEnergy("hamiltonian is not finite");
  return h;
}

double hamiltonian(const PairInteraction& pair, const Potential& V, const Configuration& config) {
  return hamiltonian(pair, smooth_interpolator(V.field()), config);
}

namespace {

double f_energy_with(const PairInteraction& pair, const PeriodicInterpolator& h_mu, double self_energy,
                     const Configuration& config) {
  return pair_energy(pair, config) - 2.0 * empirical_mean(h_mu, config) + self_energy;
}

}  // namespace

double f_energy(const PairInteraction& pair, const KernelSpec& kernel, const Configuration& config,
                const ProbabilityDensity& mu) {
  const GridField h = interaction_potential(kernel, mu.field());
  return f_energy_with(pair, smooth_interpolator(h), interaction_energy(kernel, mu.field()), config);
}

SplittingReference splitting_reference(const KernelSpec& kernel, const Potential& V, const EquilibriumApprox& eq) {
  const auto& grid = eq.mu.grid();
  if (!(V.grid() == grid)) throw InvalidArgument("potential and equilibrium grids differ");
  const GridField h = interaction_potential(kernel, eq.mu.field());
  // c_∞ recomputed here so ζ is exactly V + 2h - c with this h.
  std::vector<double> phi(grid.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = 2.0 * h[i] + V.field()[i];
  const double c = inner_product(GridField(grid, phi), eq.mu.field());
  for (double& v : phi) v -= c;
  const double self = interaction_energy(kernel, eq.mu.field());
  return SplittingReference{"zero-temperature",
                            eq.mu,
                            self + inner_product(V.field(), eq.mu.field()),
                            self,
                            smooth_interpolator(h),
                            smooth_interpolator(GridField(grid, std::move(phi))),
                            smooth_interpolator(V.field())};
}

SplittingReference splitting_reference(const KernelSpec& kernel, const Potential& V, const ThermalEquilibrium& th) {
  const auto& grid = th.mu.grid();
  if (!(V.grid() == grid)) throw InvalidArgument("potential and equilibrium grids differ");
  const GridField h = interaction_potential(kernel, th.mu.field());
  std::vector<double> zeta(grid.size());
  for (std::size_t i = 0; i < zeta.size(); ++i) zeta[i] = -th.log_mu[i] / th.theta;
  const double self = interaction_energy(kernel, th.mu.field());
  return SplittingReference{"thermal",
                            th.mu,
                            energy_thermal(kernel, V, th.theta, th.mu),
                            self,
                            smooth_interpolator(h),
                            smooth_interpolator(GridField(grid, std::move(zeta))),
                            smooth_interpolator(V.field())};
}

SplittingTerms splitting_check(const PairInteraction& pair, const SplittingReference& ref, const Configuration& config) {
  const double n2 = static_cast<double>(config.size()) * static_cast<double>(config.size());
  SplittingTerms t{};
  t.hamiltonian = hamiltonian(pair, ref.V, config);
  t.mean_field = n2 * ref.energy;
  t.f_energy = n2 * f_energy_with(pair, ref.h_mu, ref.self_energy, config);
  t.zeta = n2 * empirical_mean(ref.zeta, config);
  t.defect = std::fabs(t.hamiltonian - (t.mean_field + t.f_energy + t.zeta)) / std::max(1.0, std::fabs(t.hamiltonian));
  return t;
}

FluctuationObservable::FluctuationObservable(const GridField& f, const ProbabilityDensity& reference)
    : f_(f), interp_(smooth_interpolator(f)), mean_(inner_product(f, reference.field())) {}

double fluctuation(const Configuration& config, const GridField& f, const ProbabilityDensity& reference) {
  return FluctuationObservable(f, reference)(config);
}

}  // namespace torusgas
