#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fpv/kernel.hpp"
#include "fpv/sde.hpp"

namespace fpv {

struct VariationResult {
  std::size_t n = 0;
  int k = 0;
  double s_n = 0.0;
  double s_inf = 0.0;
  double z_n = 0.0;
  std::vector<double> contributions;  // filled on request: summands of S_n
};

// X_{(j+1)/n} - 2 X_{j/n} + X_{(j-1)/n} for j = 1..n-1, from X_0..X_n.
std::vector<double> second_difference(std::span<const double> coarse);

// n^{2kH-1} sum_{j=1}^{n-1} f(X_{j/n}) (second difference)^{2k}
double weighted_power_variation(std::span<const double> coarse, const SdeModel& model, int k, HurstParam h);

// Composite trapezoid and left Riemann sum of equally spaced samples on [0, 1].
double trapezoid(std::span<const double> values);
double left_riemann(std::span<const double> values);

// mu_{2k,0} times the trapezoid of f (V1)^{2k} over the fine grid.
double limit_variation(const GridPath& path, int k, HurstParam h);

double error_statistic(double s_n, double s_inf, std::size_t n);

VariationResult evaluate_variation(const GridPath& path, int k, HurstParam h, bool diagnostics = false);

struct ExactMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Closed-form mean and variance of S_n for the additive model with f = 1.
ExactMoments additive_variation_moments(std::size_t n, int k, HurstParam h, double sigma);

}  // namespace fpv
