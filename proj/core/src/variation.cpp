#include "fpv/variation.hpp"

#include <cmath>
#include <stdexcept>

#include "fpv/combinatorics.hpp"

namespace fpv {

std::vector<double> second_difference(std::span<const double> coarse) {
  if (coarse.size() < 3) throw std::invalid_argument("second_difference needs n >= 2");
  std::vector<double> d(coarse.size() - 2);
  for (std::size_t j = 1; j + 1 < coarse.size(); ++j) d[j - 1] = coarse[j + 1] - 2.0 * coarse[j] + coarse[j - 1];
  return d;
}

double weighted_power_variation(std::span<const double> coarse, const SdeModel& model, int k, HurstParam h) {
  if (k < 1) throw std::invalid_argument("power index k must be >= 1");
  const auto d = second_difference(coarse);
  const double n = static_cast<double>(coarse.size() - 1);
  double s = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) s += model.f(coarse[j + 1]) * std::pow(d[j] * d[j], k);
  return std::pow(n, 2.0 * k * h.value() - 1.0) * s;
}

double trapezoid(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("trapezoid needs at least two samples");
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s / static_cast<double>(values.size() - 1);
}

double left_riemann(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("riemann sum needs at least two samples");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) s += values[i];
  return s / static_cast<double>(values.size() - 1);
}

double limit_variation(const GridPath& path, int k, HurstParam h) {
  if (path.kappa < 2) throw std::invalid_argument("limit_variation needs a fine grid with kappa >= 2");
  std::vector<double> a(path.X.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = path.model->a(path.X[i], k);
  return mu(k, 0, h) * trapezoid(a);
}

double error_statistic(double s_n, double s_inf, std::size_t n) {
  return std::sqrt(static_cast<double>(n)) * (s_n - s_inf);
}

VariationResult evaluate_variation(const GridPath& path, int k, HurstParam h, bool diagnostics) {
  VariationResult r;
  r.n = path.coarse_n();
  r.k = k;
  const auto coarse = path.coarse_x();
  r.s_n = weighted_power_variation(coarse, *path.model, k, h);
  r.s_inf = limit_variation(path, k, h);
  r.z_n = error_statistic(r.s_n, r.s_inf, r.n);
  if (diagnostics) {
    const auto d = second_difference(coarse);
    const double scale = std::pow(static_cast<double>(r.n), 2.0 * k * h.value() - 1.0);
    r.contributions.resize(d.size());
    for (std::size_t j = 0; j < d.size(); ++j)
      r.contributions[j] = scale * path.model->f(coarse[j + 1]) * std::pow(d[j] * d[j], k);
  }
  return r;
}

ExactMoments additive_variation_moments(std::size_t n, int k, HurstParam h, double sigma) {
  if (n < 2) throw std::invalid_argument("additive_variation_moments needs n >= 2");
  ExactMoments m;
  const double nn = static_cast<double>(n);
  m.mean = (1.0 - 1.0 / nn) * mu(k, 0, h) * std::pow(sigma, 2 * k);
  // sum over j1, j2 in [n-1] of g(j2 - j1) = sum_d (n-1-|d|) g(d)
  double s = 0.0;
  for (std::int64_t d = -static_cast<std::int64_t>(n) + 2; d <= static_cast<std::int64_t>(n) - 2; ++d) {
    const double rho = rho_hat(d, h);
    double g = 0.0;
    for (int l = 1; l <= k; ++l) {
      const double u = mu(k, l, h);
      g += u * u * static_cast<double>(factorial(2 * l)) * std::pow(rho, 2 * l);
    }
    s += static_cast<double>(static_cast<std::int64_t>(n) - 1 - std::abs(d)) * g;
  }
  m.variance = s * std::pow(sigma, 4 * k) / (nn * nn);
  return m;
}

}  // namespace fpv
