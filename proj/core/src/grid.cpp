#include "torusgas/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "torusgas/errors.hpp"

namespace torusgas {

TorusGrid::TorusGrid(int dim, int n, double side, std::size_t budget)
    : dim_(dim), n_(n), side_(side), size_(1), budget_(budget) {
  if (dim < 1 || dim > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (n < 8 || (n & (n - 1)) != 0) throw InvalidArgument("grid n must be a power of two >= 8, got " + std::to_string(n));
  if (!(side > 0.0) || !std::isfinite(side)) throw InvalidArgument("torus side must be positive");
  for (int k = 0; k < dim; ++k) {
    size_ *= static_cast<std::size_t>(n);
    if (size_ > budget) throw BudgetExceeded("grid n^d = " + std::to_string(n) + "^" + std::to_string(dim) + " exceeds budget");
  }
}

double TorusGrid::cell_volume() const { return std::pow(spacing(), dim_); }
double TorusGrid::volume() const { return std::pow(side_, dim_); }

std::array<int, 3> TorusGrid::unravel(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = dim_ - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t TorusGrid::ravel(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int k = 0; k < dim_; ++k) flat = flat * n_ + static_cast<std::size_t>(idx[k]);
  return flat;
}

std::array<int, 3> TorusGrid::lattice(std::size_t flat) const {
  auto idx = unravel(flat);
  for (int k = 0; k < dim_; ++k) idx[k] = frequency(idx[k]);
  return idx;
}

std::size_t TorusGrid::lattice_index(const std::array<int, 3>& m) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) idx[k] = ((m[k] % n_) + n_) % n_;
  return ravel(idx);
}

double TorusGrid::lattice_norm(std::size_t flat) const {
  auto m = lattice(flat);
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) s += double(m[k]) * m[k];
  return std::sqrt(s);
}

std::array<double, 3> TorusGrid::node(std::size_t flat) const {
  auto idx = unravel(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k) x[k] = idx[k] * spacing();
  return x;
}

GridField::GridField(TorusGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " values, grid needs " + std::to_string(grid_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("grid field contains non-finite values");
}

GridField::GridField(TorusGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {
  if (!std::isfinite(fill)) throw InvalidArgument("grid field contains non-finite values");
}

double GridField::integral() const {
  // Pairwise-ish accumulation via long double keeps 1e-12 normalization honest for 2^24 nodes.
  long double s = 0.0L;
  for (double v : values_) s += v;
  return static_cast<double>(s) * grid_.cell_volume();
}

double GridField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SpectralField::SpectralField(TorusGrid grid, std::vector<Complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) throw InvalidArgument("spectral field size does not match grid");
}

SpectralField::SpectralField(TorusGrid grid) : grid_(grid), coeffs_(grid.size(), Complex(0.0, 0.0)) {}

double SpectralField::conjugate_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    auto m = grid_.lattice(i);
    for (int k = 0; k < grid_.dim(); ++k) m[k] = -m[k];
    worst = std::max(worst, std::abs(coeffs_[grid_.lattice_index(m)] - std::conj(coeffs_[i])));
  }
  return worst;
}

namespace {
void require_density(const GridField& f) {
  if (f.min() < 0.0) throw InvalidArgument("probability density has negative values");
}
}  // namespace

ProbabilityDensity::ProbabilityDensity(GridField field) : field_(std::move(field)) {
  require_density(field_);
  double mass = field_.integral();
  if (std::abs(mass - 1.0) > 1e-12) throw InvalidArgument("probability density mass " + std::to_string(mass) + " != 1");
}

ProbabilityDensity ProbabilityDensity::normalized(const GridField& field) {
  require_density(field);
  double mass = field.integral();
  if (!(mass > 0.0)) throw InvalidArgument("cannot normalize a field with zero mass");
  std::vector<double> v(field.values().begin(), field.values().end());
  for (double& x : v) x /= mass;
  return ProbabilityDensity(GridField(field.grid(), std::move(v)));
}

ProbabilityDensity ProbabilityDensity::uniform(const TorusGrid& grid) {
  return ProbabilityDensity(GridField(grid, 1.0 / grid.volume()));
}

}  // namespace torusgas
