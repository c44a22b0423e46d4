#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fpv {

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);
double quantile(std::vector<double> v, double q);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit least_squares_line(std::span<const double> x, std::span<const double> y);

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

// sup |ecdf - F| where cdf_at_sorted[i] = F(sorted[i]).
double ks_statistic_sorted(std::span<const double> sorted, std::span<const double> cdf_at_sorted);

struct TwoSampleKs {
  double d = 0.0;
  double p_value = 1.0;
};
TwoSampleKs ks_two_sample(std::vector<double> a, std::vector<double> b);

// Linear interpolation through (xs, ys); xs ascending; constant beyond the ends.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);
  double operator()(double x) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

struct BootstrapInterval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile interval of KS(sample, F_a) - KS(sample, F_b) under resampling of
// the sample. F values are given at the sorted sample points.
BootstrapInterval bootstrap_ks_difference(std::span<const double> sorted, std::span<const double> fa,
                                          std::span<const double> fb, std::size_t resamples, std::uint64_t seed,
                                          double level = 0.95);

}  // namespace fpv
