#include "torusgas/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torusgas/errors.hpp"

namespace torusgas {

Interval wilson_interval(double p_hat, double n_eff, double z) {
  if (!(n_eff > 0.0)) throw InvalidArgument("effective sample size must be positive");
  if (p_hat < 0.0 || p_hat > 1.0) throw InvalidArgument("proportion outside [0,1]");
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n_eff;
  const double centre = (p_hat + z2 / (2.0 * n_eff)) / denom;
  const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / n_eff + z2 / (4.0 * n_eff * n_eff)) / denom;
  return {p_hat, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("mean of an empty series");
  long double s = 0.0L;
  for (double v : x) s += v;
  return static_cast<double>(s / x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw InvalidArgument("variance needs two samples");
  const double m = mean(x);
  long double s = 0.0L;
  for (double v : x) s += (v - m) * (v - m);
  return static_cast<double>(s / (x.size() - 1));
}

double autocorrelation_time(std::span<const double> x, double c) {
  const std::size_t n = x.size();
  if (n < 4) throw InvalidArgument("autocorrelation needs at least 4 samples");
  const double m = mean(x);
  long double c0 = 0.0L;
  for (double v : x) c0 += (v - m) * (v - m);
  if (c0 == 0.0L) return 1.0;
  double tau = 1.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    long double ck = 0.0L;
    for (std::size_t i = 0; i + k < n; ++i) ck += (x[i] - m) * (x[i + k] - m);
    tau += 2.0 * static_cast<double>(ck / c0);
    if (static_cast<double>(k) >= c * tau) break;
  }
  return std::max(tau, 1.0);
}

JackknifeResult block_jackknife(std::span<const double> x, int blocks,
                                const std::function<double(std::span<const double>)>& estimator) {
  if (blocks < 2 || x.size() < static_cast<std::size_t>(blocks)) throw InvalidArgument("jackknife needs >= 2 nonempty blocks");
  JackknifeResult r{};
  r.estimate = estimator(x);
  const std::size_t len = x.size() / blocks;
  std::vector<double> rest;
  rest.reserve(x.size());
  for (int b = 0; b < blocks; ++b) {
    rest.clear();
    const std::size_t lo = b * len, hi = (b == blocks - 1) ? x.size() : lo + len;
    rest.insert(rest.end(), x.begin(), x.begin() + lo);
    rest.insert(rest.end(), x.begin() + hi, x.end());
    r.leave_one_out.push_back(estimator(rest));
  }
  const double m = mean(r.leave_one_out);
  double s = 0.0;
  for (double v : r.leave_one_out) s += (v - m) * (v - m);
  r.std_error = std::sqrt(s * (blocks - 1) / blocks);
  return r;
}

double log_mean_exp(std::span<const double> x, double a) {
  if (x.empty()) throw InvalidArgument("log_mean_exp of an empty series");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : x) top = std::max(top, a * v);
  long double s = 0.0L;
  for (double v : x) s += std::exp(static_cast<long double>(a * v - top));
  return top + static_cast<double>(std::log(s / x.size()));
}

double tilt_effective_size(std::span<const double> x, double a) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : x) top = std::max(top, a * v);
  long double s1 = 0.0L, s2 = 0.0L;
  for (double v : x) {
    const long double w = std::exp(static_cast<long double>(a * v - top));
    s1 += w;
    s2 += w * w;
  }
  return static_cast<double>(s1 * s1 / s2);
}

KsResult ks_uniform(std::vector<double> x, double side) {
  if (x.empty()) throw InvalidArgument("KS test of an empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = x[i] / side;
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  // Asymptotic Kolmogorov distribution with Stephens' small-sample correction.
  const double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  // The alternating series is useless near 0, where the tail is 1 anyway.
  if (lam < 0.2) return {d, 1.0};
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace torusgas
