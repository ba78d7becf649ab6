#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace torusgas {

using Complex = std::complex<double>;

// Hard cap on n^d. Can be lowered by callers that want a tighter budget.
inline constexpr std::size_t kDefaultGridBudget = std::size_t{1} << 24;

// Uniform discretization of the torus [0,T)^d with n nodes per dimension.
// Node k sits at x = k*T/n; storage is row-major with the last axis fastest.
class TorusGrid {
 public:
  TorusGrid(int dim, int n, double side = 1.0, std::size_t budget = kDefaultGridBudget);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double side() const { return side_; }
  std::size_t size() const { return size_; }
  double spacing() const { return side_ / n_; }
  double cell_volume() const;
  double volume() const;

  // Lattice frequency of FFT index k (k < n/2 -> k, else k - n).
  int frequency(int k) const { return k < n_ / 2 ? k : k - n_; }
  std::array<int, 3> unravel(std::size_t flat) const;
  std::size_t ravel(const std::array<int, 3>& idx) const;
  // Integer lattice vector of flat spectral index.
  std::array<int, 3> lattice(std::size_t flat) const;
  // Flat spectral index of lattice vector m (periodic wrap).
  std::size_t lattice_index(const std::array<int, 3>& m) const;
  // Euclidean norm of the lattice vector stored at flat index.
  double lattice_norm(std::size_t flat) const;
  // Physical coordinates of node flat.
  std::array<double, 3> node(std::size_t flat) const;

  TorusGrid refined(int factor) const { return TorusGrid(dim_, n_ * factor, side_, budget_); }
  TorusGrid with_n(int n) const { return TorusGrid(dim_, n, side_, budget_); }

  bool operator==(const TorusGrid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && side_ == o.side_;
  }

 private:
  int dim_;
  int n_;
  double side_;
  std::size_t size_;
  std::size_t budget_;
};

class GridField {
 public:
  GridField(TorusGrid grid, std::vector<double> values);
  explicit GridField(TorusGrid grid, double fill = 0.0);

  template <class F>
  static GridField from_function(const TorusGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
    return GridField(grid, std::move(v));
  }

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Rectangle-rule integral, ∫ f dx.
  double integral() const;
  double max() const;
  double min() const;
  double sup_norm() const;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

// Series coefficients f̂(m), stored in FFT order on the grid lattice.
class SpectralField {
 public:
  SpectralField(TorusGrid grid, std::vector<Complex> coeffs);
  explicit SpectralField(TorusGrid grid);

  const TorusGrid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
  Complex at(const std::array<int, 3>& m) const { return coeffs_[grid_.lattice_index(m)]; }
  std::size_t size() const { return coeffs_.size(); }

  // Max |c(-m) - conj c(m)|, the real-field defect.
  double conjugate_asymmetry() const;

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

// Nonnegative grid density with ∫μ dx = 1.
class ProbabilityDensity {
 public:
  // Validates nonnegativity and normalization (1e-12 relative).
  explicit ProbabilityDensity(GridField field);
  // Clips nothing: rejects negative values, then rescales to unit mass.
  static ProbabilityDensity normalized(const GridField& field);
  static ProbabilityDensity uniform(const TorusGrid& grid);

  const GridField& field() const { return field_; }
  const TorusGrid& grid() const { return field_.grid(); }
  std::span<const double> values() const { return field_.values(); }
  double operator[](std::size_t i) const { return field_[i]; }

 private:
  GridField field_;
};

}  // namespace torusgas
