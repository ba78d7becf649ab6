#pragma once

#include <functional>
#include <span>
#include <vector>

namespace torusgas {

struct Interval {
  double estimate;
  double lo;
  double hi;
};

// Wilson score interval for a proportion with (possibly fractional) effective
// sample size n_eff.
Interval wilson_interval(double p_hat, double n_eff, double z = 1.96);

double mean(std::span<const double> x);
double variance(std::span<const double> x);

// Integrated autocorrelation time τ = 1 + 2 Σ ρ(k), summed up to the first
// window W >= c·τ(W) (Sokal). Returns 1 for constant series.
double autocorrelation_time(std::span<const double> x, double c = 5.0);

struct JackknifeResult {
  double estimate;
  double std_error;
  std::vector<double> leave_one_out;
};

// Delete-one-block jackknife. The estimator sees the series with one block
// removed; the full-series value is the reported estimate.
JackknifeResult block_jackknife(std::span<const double> x, int blocks,
                                const std::function<double(std::span<const double>)>& estimator);

// log mean exp(a·x), computed with a shift so large tilts do not overflow.
double log_mean_exp(std::span<const double> x, double a);

// Kish effective sample size of weights exp(a·x).
double tilt_effective_size(std::span<const double> x, double a);

struct KsResult {
  double statistic;
  double p_value;
};

// One-sample Kolmogorov-Smirnov test against U[0, side).
KsResult ks_uniform(std::vector<double> x, double side = 1.0);

}  // namespace torusgas
