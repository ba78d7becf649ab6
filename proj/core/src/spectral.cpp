#include "torusgas/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torusgas/errors.hpp"
#include "torusgas/fft.hpp"
#include "torusgas/kernels.hpp"

namespace torusgas {

SpectralField forward_transform(const GridField& field) {
  const auto& grid = field.grid();
  std::vector<Complex> in(field.values().begin(), field.values().end());
  auto out = fft::forward(grid, in);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : out) c *= scale;
  return SpectralField(grid, std::move(out));
}

GridField inverse_transform(const SpectralField& spec) {
  double cmax = 0.0;
  for (const auto& c : spec.coeffs()) cmax = std::max(cmax, std::abs(c));
  double asym = spec.conjugate_asymmetry();
  if (asym > 1e-10 * std::max(1.0, cmax)) {
    std::ostringstream os;
    os << "conjugate symmetry violated by " << asym;
    throw NonRealSpectrum(os.str());
  }
  auto out = fft::backward(spec.grid(), spec.coeffs());
  std::vector<double> values(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) values[i] = out[i].real();
  return GridField(spec.grid(), std::move(values));
}

double sobolev_seminorm(const SpectralField& spec, double alpha) {
  if (alpha < 0.0) throw NegativeOrder("sobolev order must be >= 0");
  const auto& grid = spec.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    double norm = grid.lattice_norm(i);
    double weight = (alpha == 0.0) ? 1.0 : std::pow(norm, alpha);
    s += std::abs(spec[i]) * weight;
  }
  return s;
}

double sobolev_seminorm(const GridField& field, double alpha) {
  if (alpha < 0.0) throw NegativeOrder("sobolev order must be >= 0");
  return sobolev_seminorm(forward_transform(field), alpha);
}

double entropy(const ProbabilityDensity& mu) {
  long double s = 0.0L;
  for (double v : mu.values())
    if (v > 0.0) s += v * std::log(v);
  return static_cast<double>(s) * mu.grid().cell_volume();
}

double relative_entropy(const ProbabilityDensity& mu, const ProbabilityDensity& nu) {
  if (!(mu.grid() == nu.grid())) throw InvalidArgument("relative_entropy: grids differ");
  long double s = 0.0L;
  for (std::size_t i = 0; i < mu.values().size(); ++i) {
    double a = mu[i], b = nu[i];
    if (a <= 0.0) continue;
    if (b <= 0.0) return std::numeric_limits<double>::infinity();
    s += a * std::log(a / b);
  }
  // Quadrature roundoff can produce -1e-17; the true value is >= 0.
  return std::max(0.0, static_cast<double>(s) * mu.grid().cell_volume());
}

double bilinear_energy(const KernelSpec& kernel, const SpectralField& mu, const SpectralField& nu) {
  const auto& grid = mu.grid();
  if (!(grid == nu.grid())) throw InvalidArgument("bilinear_energy: grids differ");
  auto ghat = kernel.coefficients(grid);
  long double s = 0.0L;
  for (std::size_t i = 0; i < mu.size(); ++i) s += ghat[i] * (mu[i] * std::conj(nu[i])).real();
  // moments are T^d f̂, energy carries T^{-d}: net factor T^d.
  return static_cast<double>(s) * grid.volume();
}

double interaction_energy(const KernelSpec& kernel, const SpectralField& density) {
  const auto& grid = density.grid();
  auto ghat = kernel.coefficients(grid);
  long double total = 0.0L, outer = 0.0L;
  const int quarter = grid.n() / 4;
  for (std::size_t i = 0; i < density.size(); ++i) {
    double term = ghat[i] * std::norm(density[i]);
    total += term;
    auto m = grid.lattice(i);
    int linf = 0;
    for (int k = 0; k < grid.dim(); ++k) linf = std::max(linf, std::abs(m[k]));
    if (linf > quarter) outer += term;
  }
  if (total > 0.0L && outer > 1e-8L * total) {
    std::ostringstream os;
    os << "outer band carries " << static_cast<double>(outer / total) << " of the energy on n=" << grid.n();
    warn("LatticeTruncation", os.str());
  }
  return static_cast<double>(total) * grid.volume();
}

double interaction_energy(const KernelSpec& kernel, const GridField& density) {
  return interaction_energy(kernel, forward_transform(density));
}

SpectralField multiply(const SpectralField& spec, std::span<const double> multiplier) {
  if (multiplier.size() != spec.size()) throw InvalidArgument("multiplier size mismatch");
  std::vector<Complex> out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) out[i] = spec[i] * multiplier[i];
  return SpectralField(spec.grid(), std::move(out));
}

GridField spectral_refine(const GridField& field, int n_fine) {
  const auto& coarse = field.grid();
  if (n_fine == coarse.n()) return field;
  if (n_fine < coarse.n()) throw InvalidArgument("spectral_refine only refines");
  TorusGrid fine = coarse.with_n(n_fine);
  auto spec = forward_transform(field);
  std::vector<Complex> padded(fine.size(), Complex(0.0, 0.0));
  const int half = coarse.n() / 2;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    auto m = coarse.lattice(i);
    // Each Nyquist component (m_k = -n/2) is split between ±n/2 on the fine lattice.
    int nyquist_axes = 0;
    for (int k = 0; k < coarse.dim(); ++k)
      if (m[k] == -half) ++nyquist_axes;
    Complex c = spec[i] / static_cast<double>(1 << nyquist_axes);
    for (int mask = 0; mask < (1 << coarse.dim()); ++mask) {
      auto mm = m;
      bool valid = true;
      for (int k = 0; k < coarse.dim(); ++k) {
        if (mask & (1 << k)) {
          if (m[k] != -half) { valid = false; break; }
          mm[k] = half;
        }
      }
      if (valid) padded[fine.lattice_index(mm)] += c;
    }
  }
  auto out = fft::backward(fine, padded);
  std::vector<double> values(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) values[i] = out[i].real();
  return GridField(fine, std::move(values));
}

double inner_product(const GridField& f, const GridField& g) {
  if (!(f.grid() == g.grid())) throw InvalidArgument("inner_product: grids differ");
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return static_cast<double>(s) * f.grid().cell_volume();
}

}  // namespace torusgas
