#pragma once

#include <cstdint>
#include <vector>

namespace fpv {

// Hurst index restricted to the open interval (1/2, 1).
class HurstParam {
 public:
  explicit HurstParam(double value);

  double value() const noexcept { return value_; }
  double two_h() const noexcept { return 2.0 * value_; }

 private:
  double value_;
};

// Piecewise constant function on [0, 1]. Interval i is
// [breakpoints[i], breakpoints[i+1]) with value weights[i].
//
// When every breakpoint is an integer multiple of 1/denominator the exact
// integer representation is kept and inner products avoid rounding of the
// time differences.
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> weights);

  // Breakpoints numerators[i] / denominator.
  static StepFunction on_grid(std::vector<std::int64_t> numerators, std::int64_t denominator,
                              std::vector<double> weights);

  // 1^n_j: indicator of [(j-1)/n, j/n], j in 1..n.
  static StepFunction indicator(std::int64_t j, std::int64_t n);
  // d^n_j = 1^n_{j+1} - 1^n_j, j in 1..n-1.
  static StepFunction second_difference(std::int64_t j, std::int64_t n);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  bool has_grid() const noexcept { return denominator_ > 0; }
  std::int64_t denominator() const noexcept { return denominator_; }
  const std::vector<std::int64_t>& numerators() const noexcept { return numerators_; }

 private:
  StepFunction() = default;
  void validate() const;

  std::vector<double> breakpoints_;
  std::vector<double> weights_;
  std::vector<std::int64_t> numerators_;
  std::int64_t denominator_ = 0;
};

// E[B_s B_t] for fBm.
double fbm_covariance(double s, double t, HurstParam h);

// <a, b> in the fBm Hilbert space, i.e. E[B(a) B(b)].
double inner_product_steps(const StepFunction& a, const StepFunction& b, HurstParam h);

// 4 - 2^{2H}
double c0(HurstParam h);

// Correlation stencil of second differences; rho_hat(0) = c0.
double rho_hat(std::int64_t j, HurstParam h);

// rho_hat(0..radius).
std::vector<double> rho_hat_table(std::int64_t radius, HurstParam h);

}  // namespace fpv
