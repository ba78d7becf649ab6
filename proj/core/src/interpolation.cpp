#include "torusgas/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "torusgas/errors.hpp"
#include "torusgas/spectral.hpp"

namespace torusgas {

PeriodicInterpolator::PeriodicInterpolator(GridField field)
    : field_(std::move(field)), dim_(field_.grid().dim()), n_(field_.grid().n()), inv_h_(1.0 / field_.grid().spacing()) {}

double PeriodicInterpolator::operator()(const double* x) const {
  int base[3] = {0, 0, 0};
  double w[3] = {0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k) {
    double u = x[k] * inv_h_;
    double fl = std::floor(u);
    w[k] = u - fl;
    long long i = static_cast<long long>(fl) % n_;
    if (i < 0) i += n_;
    base[k] = static_cast<int>(i);
  }
  const auto v = field_.values();
  if (dim_ == 1) {
    int i1 = base[0] + 1 == n_ ? 0 : base[0] + 1;
    return (1.0 - w[0]) * v[base[0]] + w[0] * v[i1];
  }
  double acc = 0.0;
  const std::size_t n = static_cast<std::size_t>(n_);
  for (int corner = 0; corner < (1 << dim_); ++corner) {
    std::size_t flat = 0;
    double weight = 1.0;
    for (int k = 0; k < dim_; ++k) {
      int bit = (corner >> k) & 1;
      int idx = base[k] + bit;
      if (idx == n_) idx = 0;
      flat = flat * n + static_cast<std::size_t>(idx);
      weight *= bit ? w[k] : 1.0 - w[k];
    }
    acc += weight * v[flat];
  }
  return acc;
}

int default_interpolation_n(const TorusGrid& grid) {
  switch (grid.dim()) {
    case 1: return std::max(grid.n(), 1 << 16);
    case 2: return std::max(grid.n(), 1 << 11);
    default: return std::max(grid.n(), 1 << 7);
  }
}

PeriodicInterpolator smooth_interpolator(const GridField& field, int n_fine) {
  if (n_fine == 0) n_fine = default_interpolation_n(field.grid());
  return PeriodicInterpolator(spectral_refine(field, n_fine));
}

}  // namespace torusgas
