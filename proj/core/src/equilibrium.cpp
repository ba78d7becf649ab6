#include "torusgas/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <spdlog/spdlog.h>

#include "torusgas/errors.hpp"
#include "torusgas/fft.hpp"
#include "torusgas/field_io.hpp"
#include "torusgas/spectral.hpp"

namespace torusgas {

Potential::Potential(GridField field, std::string description)
    : field_(std::move(field)), description_(std::move(description)) {}

Potential Potential::zero(const TorusGrid& grid) { return Potential(GridField(grid, 0.0), "zero"); }

Potential Potential::cosine(const TorusGrid& grid, double a, int k) {
  const double w = 2.0 * std::numbers::pi * k / grid.side();
  auto f = GridField::from_function(grid, [&](const std::array<double, 3>& x) {
    double s = 0.0;
    for (int i = 0; i < grid.dim(); ++i) s += std::cos(w * x[i]);
    return a * s;
  });
  std::ostringstream os;
  os << "cosine(a=" << a << ",k=" << k << ")";
  return Potential(std::move(f), os.str());
}

Potential Potential::gaussian_well(const TorusGrid& grid, double a, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian well width must be positive");
  const double T = grid.side();
  auto f = GridField::from_function(grid, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int i = 0; i < grid.dim(); ++i) {
      double dx = std::abs(x[i] - 0.5 * T);
      dx = std::min(dx, T - dx);
      r2 += dx * dx;
    }
    return -a * std::exp(-r2 / (2.0 * sigma * sigma));
  });
  std::ostringstream os;
  os << "gaussian-well(a=" << a << ",sigma=" << sigma << ")";
  return Potential(std::move(f), os.str());
}

Potential Potential::from_file(const TorusGrid& grid, const std::string& path) {
  GridField f = read_field(path);
  if (!(f.grid() == grid)) throw InvalidArgument("potential file " + path + " does not match the configured grid");
  return Potential(std::move(f), "table(" + path + ")");
}

Potential Potential::shifted(double c) const {
  std::vector<double> v(field_.values().begin(), field_.values().end());
  for (double& x : v) x += c;
  return Potential(GridField(field_.grid(), std::move(v)), description_ + "+const");
}

GridField interaction_potential(const KernelSpec& kernel, const GridField& density) {
  return apply_h_alpha(kernel, density, 1.0);
}

double energy_mean_field(const KernelSpec& kernel, const Potential& V, const ProbabilityDensity& mu) {
  return interaction_energy(kernel, mu.field()) + inner_product(V.field(), mu.field());
}

double energy_thermal(const KernelSpec& kernel, const Potential& V, double theta, const ProbabilityDensity& mu) {
  return energy_mean_field(kernel, V, mu) + entropy(mu) / theta;
}

namespace {

// Applies a real Fourier multiplier to a real grid vector.
class Convolver {
 public:
  Convolver(const TorusGrid& grid, std::vector<double> multiplier)
      : grid_(grid), mult_(std::move(multiplier)), a_(grid.size()), b_(grid.size()) {}

  void apply(std::span<const double> v, std::span<double> out) {
    for (std::size_t i = 0; i < v.size(); ++i) a_[i] = v[i];
    fft::transform(grid_, a_, b_, -1);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t i = 0; i < b_.size(); ++i) b_[i] *= mult_[i] * scale;
    fft::transform(grid_, b_, a_, +1);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = a_[i].real();
  }

  const std::vector<double>& multiplier() const { return mult_; }

 private:
  TorusGrid grid_;
  std::vector<double> mult_;
  std::vector<Complex> a_, b_;
};

struct ThermalState {
  std::vector<double> w, log_mu, mu, u, R;
  double residual = 0.0;
  double c = 0.0;
  double energy = 0.0;
};

class ThermalProblem {
 public:
  ThermalProblem(const KernelSpec& kernel, const Potential& V, double theta)
      : grid_(V.grid()), V_(V.field().values().begin(), V.field().values().end()), theta_(theta),
        hv_(grid_.cell_volume()), conv_(grid_, kernel.coefficients(grid_)) {}

  void evaluate(ThermalState& s) {
    const std::size_t M = grid_.size();
    s.log_mu.resize(M);
    s.mu.resize(M);
    s.u.resize(M);
    s.R.resize(M);
    double wmax = -std::numeric_limits<double>::infinity();
    for (double x : s.w) {
      if (!std::isfinite(x)) throw DivergedField("log-density became non-finite");
      wmax = std::max(wmax, x);
    }
    long double Z = 0.0L;
    for (std::size_t i = 0; i < M; ++i) {
      s.mu[i] = std::exp(s.w[i] - wmax);
      Z += s.mu[i];
    }
    const double logZ = std::log(static_cast<double>(Z) * hv_);
    const double invZ = 1.0 / (static_cast<double>(Z) * hv_);
    for (std::size_t i = 0; i < M; ++i) {
      s.mu[i] *= invZ;
      s.log_mu[i] = s.w[i] - wmax - logZ;
    }
    conv_.apply(s.mu, s.u);
    long double c = 0.0L, eint = 0.0L, epot = 0.0L, ent = 0.0L;
    for (std::size_t i = 0; i < M; ++i) {
      s.R[i] = s.w[i] + theta_ * (V_[i] + 2.0 * s.u[i]);
      double phi = 2.0 * s.u[i] + V_[i] + s.log_mu[i] / theta_;
      c += phi * s.mu[i];
      eint += s.u[i] * s.mu[i];
      epot += V_[i] * s.mu[i];
      if (s.mu[i] > 0.0) ent += s.mu[i] * s.log_mu[i];
    }
    s.c = static_cast<double>(c) * hv_;
    s.energy = static_cast<double>(eint + epot + ent / theta_) * hv_;
    double res = 0.0;
    for (std::size_t i = 0; i < M; ++i)
      res = std::max(res, std::abs(2.0 * s.u[i] + V_[i] + s.log_mu[i] / theta_ - s.c));
    s.residual = res;
  }

  // Fixed-point map F(w) = -θ(V + 2h(μ(w))) = w - R.
  std::vector<double> fixed_point(const ThermalState& s) const {
    std::vector<double> out(s.w.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.w[i] - s.R[i];
    return out;
  }

  // Solves (I + 2θ H M) x = r with M = diag(μ) - μμᵀ h^d factored as A Aᵀ,
  // A = diag(√μ)(I - qqᵀ), q = √(μ h^d). CG runs on the SPD system
  // (I + 2θ AᵀHA) y = Aᵀr and x = r - 2θ H A y.
  std::vector<double> newton_direction(const ThermalState& s, std::span<const double> r, const ThermalOptions& opt,
                                       int& cg_iterations) {
    const std::size_t M = grid_.size();
    std::vector<double> q(M), sd(M);
    double mubar = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      q[i] = std::sqrt(s.mu[i] * hv_);
      sd[i] = std::sqrt(s.mu[i]);
      mubar += s.mu[i] * s.mu[i] * hv_;
    }
    auto project = [&](std::vector<double>& v) {
      double dot = 0.0;
      for (std::size_t i = 0; i < M; ++i) dot += q[i] * v[i];
      for (std::size_t i = 0; i < M; ++i) v[i] -= dot * q[i];
    };
    std::vector<double> tmp(M), hv(M);
    auto apply_A = [&](const std::vector<double>& y, std::vector<double>& out) {
      out = y;
      project(out);
      for (std::size_t i = 0; i < M; ++i) out[i] *= sd[i];
    };
    auto apply_At = [&](const std::vector<double>& v, std::vector<double>& out) {
      out.resize(M);
      for (std::size_t i = 0; i < M; ++i) out[i] = sd[i] * v[i];
      project(out);
    };
    auto op = [&](const std::vector<double>& y, std::vector<double>& out) {
      apply_A(y, tmp);
      conv_.apply(tmp, hv);
      apply_At(hv, out);
      for (std::size_t i = 0; i < M; ++i) out[i] = y[i] + 2.0 * theta_ * out[i];
    };
    std::vector<double> pmult(M);
    for (std::size_t i = 0; i < M; ++i) pmult[i] = 1.0 / (1.0 + 2.0 * theta_ * mubar * conv_.multiplier()[i]);
    Convolver precond(grid_, std::move(pmult));

    std::vector<double> rr(r.begin(), r.end()), b;
    apply_At(rr, b);
    std::vector<double> y(M, 0.0), res = b, z(M), p(M), Ap(M);
    precond.apply(res, z);
    p = z;
    double rz = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      rz += res[i] * z[i];
      bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    cg_iterations = 0;
    if (bnorm > 0.0) {
      for (int it = 0; it < opt.cg_max_iter; ++it) {
        op(p, Ap);
        double pAp = 0.0;
        for (std::size_t i = 0; i < M; ++i) pAp += p[i] * Ap[i];
        if (!(pAp > 0.0)) break;
        double alpha = rz / pAp;
        double rn = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
          y[i] += alpha * p[i];
          res[i] -= alpha * Ap[i];
          rn += res[i] * res[i];
        }
        cg_iterations = it + 1;
        if (std::sqrt(rn) <= opt.cg_rel_tol * bnorm) break;
        precond.apply(res, z);
        double rz_new = 0.0;
        for (std::size_t i = 0; i < M; ++i) rz_new += res[i] * z[i];
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < M; ++i) p[i] = z[i] + beta * p[i];
      }
    }
    std::vector<double> x(M);
    apply_A(y, tmp);
    conv_.apply(tmp, hv);
    for (std::size_t i = 0; i < M; ++i) x[i] = rr[i] - 2.0 * theta_ * hv[i];
    return x;
  }

  const TorusGrid& grid() const { return grid_; }

 private:
  TorusGrid grid_;
  std::vector<double> V_;
  double theta_;
  double hv_;
  Convolver conv_;
};

}  // namespace

FocCheck thermal_foc(const KernelSpec& kernel, const Potential& V, double theta, const ProbabilityDensity& mu,
                     const GridField& log_mu) {
  GridField u = interaction_potential(kernel, mu.field());
  const auto& grid = mu.grid();
  std::vector<double> phi(grid.size());
  long double c = 0.0L;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = 2.0 * u[i] + V.field()[i] + log_mu[i] / theta;
    c += phi[i] * mu[i];
  }
  double cc = static_cast<double>(c) * grid.cell_volume();
  double res = 0.0;
  for (double p : phi) res = std::max(res, std::abs(p - cc));
  return {cc, res};
}

ThermalEquilibrium solve_thermal(const KernelSpec& kernel, const Potential& V, double theta,
                                 const ThermalOptions& opt, const GridField* initial_log_density) {
  if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
  const TorusGrid& grid = V.grid();
  ThermalProblem prob(kernel, V, theta);
  ThermalState s;
  if (initial_log_density) {
    if (!(initial_log_density->grid() == grid)) throw InvalidArgument("warm start grid mismatch");
    s.w.assign(initial_log_density->values().begin(), initial_log_density->values().end());
  } else {
    s.w.assign(grid.size(), 0.0);
  }
  prob.evaluate(s);

  int iterations = 0, newton = 0;
  double damping = opt.damping;
  int increases = 0;
  bool energy_warned = false;
  // A warm start is already close to the fixed point; damped sweeps would
  // only move it away, so they are reserved for cold starts.
  const int warmup = initial_log_density ? 0 : std::min(opt.warmup_iter, opt.max_iter);
  for (; iterations < warmup && s.residual > opt.tol; ++iterations) {
    auto F = prob.fixed_point(s);
    ThermalState next;
    next.w.resize(s.w.size());
    for (std::size_t i = 0; i < s.w.size(); ++i) next.w[i] = (1.0 - damping) * s.w[i] + damping * F[i];
    prob.evaluate(next);
    // w - F(w) = R and the free energy's gradient in w is Cov_μ(R)/θ, so the
    // damped step is a descent direction; backtrack until it descends.
    while (next.energy > s.energy + 1e-12 * std::max(1.0, std::abs(s.energy)) && damping > 1e-6) {
      damping *= 0.5;
      for (std::size_t i = 0; i < s.w.size(); ++i) next.w[i] = (1.0 - damping) * s.w[i] + damping * F[i];
      prob.evaluate(next);
    }
    if (next.residual > s.residual) {
      if (++increases >= 2) {
        damping *= 0.5;
        increases = 0;
      }
    } else {
      increases = 0;
    }
    if (next.energy > s.energy + 1e-12 * std::max(1.0, std::abs(s.energy)) && !energy_warned) {
      std::ostringstream os;
      os << "thermal energy rose from " << s.energy << " to " << next.energy << " at theta=" << theta;
      warn("EnergyIncrease", os.str());
      energy_warned = true;
    }
    s = std::move(next);
  }

  while (s.residual > opt.tol && iterations < opt.max_iter) {
    ++iterations;
    ++newton;
    // Constants are in the kernel of μ(w); dropping the μ-mean of R keeps the
    // right-hand side free of the O(θ c_θ) offset that would otherwise swamp
    // the meaningful part in floating point.
    std::vector<double> rhs(s.R.size());
    double rbar = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) rbar += s.R[i] * s.mu[i];
    rbar *= grid.cell_volume();
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = rbar - s.R[i];
    int cg_it = 0;
    auto dir = prob.newton_direction(s, rhs, opt, cg_it);
    spdlog::debug("thermal newton theta={} it={} residual={:.3e} cg={}", theta, newton, s.residual, cg_it);
    bool accepted = false;
    double step = 1.0;
    for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
      ThermalState trial;
      trial.w.resize(s.w.size());
      for (std::size_t i = 0; i < s.w.size(); ++i) trial.w[i] = s.w[i] + step * dir[i];
      try {
        prob.evaluate(trial);
      } catch (const DivergedField&) {
        continue;
      }
      if (trial.residual < s.residual * (1.0 - 1e-4 * step)) {
        s = std::move(trial);
        // Re-anchor w at log μ so its magnitude stays O(θ·osc) instead of drifting.
        s.w = s.log_mu;
        prob.evaluate(s);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  if (s.residual > opt.tol) {
    std::ostringstream os;
    os << "thermal solve at theta=" << theta << " stalled with residual " << s.residual << " after " << iterations
       << " iterations";
    throw NoConvergence(os.str(), iterations, s.residual);
  }

  ProbabilityDensity mu(GridField(grid, s.mu));
  GridField log_mu(grid, s.log_mu);
  FocCheck check = thermal_foc(kernel, V, theta, mu, log_mu);
  return ThermalEquilibrium{std::move(mu), std::move(log_mu), check.c, theta, check.residual, iterations, newton,
                            damping};
}

ThermalEquilibrium solve_thermal(const KernelSpec& kernel, const Potential& V, double theta, double tol, int max_iter,
                                 double damping) {
  ThermalOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  opt.damping = damping;
  return solve_thermal(kernel, V, theta, opt);
}

double EquilibriumApprox::zeta_min() const { return zeta.min(); }

double EquilibriumApprox::zeta_max_on_support() const {
  double m = 0.0;
  for (std::size_t i = 0; i < zeta.size(); ++i)
    if (sigma_mask[i] > 0.5) m = std::max(m, std::abs(zeta[i]));
  return m;
}

EquilibriumApprox solve_equilibrium(const KernelSpec& kernel, const Potential& V, const EquilibriumOptions& options) {
  const auto& ladder = options.theta_ladder;
  if (ladder.empty()) throw InvalidArgument("theta ladder is empty");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] > ladder[i - 1])) throw InvalidArgument("theta ladder must be strictly increasing");
  if (!(options.support_threshold > 0.0 && options.support_threshold < 1.0))
    throw InvalidArgument("support threshold must lie in (0,1)");

  std::vector<double> residuals;
  std::optional<ThermalEquilibrium> rung;
  for (double theta : ladder) {
    try {
      rung = solve_thermal(kernel, V, theta, options.thermal, rung ? &rung->log_mu : nullptr);
    } catch (const NoConvergence& e) {
      std::ostringstream os;
      os << "equilibrium ladder rung theta=" << theta << ": " << e.what();
      throw NoConvergence(os.str(), e.iterations(), e.residual());
    }
    residuals.push_back(rung->residual);
  }

  const ProbabilityDensity& mu = rung->mu;
  const TorusGrid& grid = mu.grid();
  const double hv = grid.cell_volume();
  GridField u = interaction_potential(kernel, mu.field());
  long double c = 0.0L;
  for (std::size_t i = 0; i < grid.size(); ++i) c += (2.0 * u[i] + V.field()[i]) * mu[i];
  const double c_inf = static_cast<double>(c) * hv;
  std::vector<double> zeta(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) zeta[i] = V.field()[i] + 2.0 * u[i] - c_inf;

  const double mumax = mu.field().max();
  auto mask_for = [&](double thr) {
    std::vector<double> m(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) m[i] = mu[i] > thr * mumax ? 1.0 : 0.0;
    return m;
  };
  std::vector<SupportSensitivity> sens;
  for (double thr : {1e-2, 1e-3, 1e-4}) {
    auto m = mask_for(thr);
    std::size_t count = 0;
    for (double x : m) count += x > 0.5;
    sens.push_back({thr, count * hv, count});
  }
  auto mask = mask_for(options.support_threshold);
  std::size_t count = 0;
  for (double x : mask) count += x > 0.5;

  return EquilibriumApprox{mu,
                           c_inf,
                           GridField(grid, std::move(mask)),
                           count * hv,
                           ladder,
                           GridField(grid, std::move(zeta)),
                           std::move(residuals),
                           std::move(sens),
                           *rung};
}

ZetaWeights zeta_weights(const EquilibriumApprox& eq, double theta) {
  if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
  const auto& grid = eq.zeta.grid();
  std::vector<double> rho(grid.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double e = -theta * eq.zeta[i];
    if (e > 700.0) throw OverflowGuard("exp(-theta*zeta) overflows; zeta is too negative for this theta");
    rho[i] = std::exp(e);
  }
  GridField rho_field(grid, std::move(rho));
  double z = rho_field.integral();
  return ZetaWeights{rho_field, z, ProbabilityDensity::normalized(rho_field)};
}

}  // namespace torusgas
