#include "fpv/kernel.hpp"

#include <quadmath.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fpv {

namespace {

constexpr double kTimeSlack = 1e-9;
constexpr std::int64_t kSeriesThreshold = 1000;

using quad = __float128;

quad qpow_abs(quad x, quad e) {
  if (x < 0) x = -x;
  if (x == 0) return 0;
  return powq(x, e);
}

// u^{2H} for integer u in [0, limit], reused across calls on the same thread.
class PowerTable {
 public:
  const quad& at(std::int64_t u, double two_h) {
    if (two_h != two_h_) {
      table_.clear();
      two_h_ = two_h;
    }
    if (u < 0) u = -u;
    if (static_cast<std::size_t>(u) >= table_.size()) {
      const quad e = two_h;
      std::size_t old = table_.size();
      table_.resize(static_cast<std::size_t>(u) + 1);
      for (std::size_t i = old; i < table_.size(); ++i) table_[i] = qpow_abs(static_cast<quad>(i), e);
    }
    return table_[static_cast<std::size_t>(u)];
  }

  // den^{-2H}, remembered for the last denominator
  quad scale(std::int64_t den, double two_h) {
    if (den != scale_den_ || two_h != scale_h_) {
      scale_den_ = den;
      scale_h_ = two_h;
      scale_ = powq(static_cast<quad>(den), -static_cast<quad>(two_h));
    }
    return scale_;
  }

 private:
  double two_h_ = -1.0;
  std::vector<quad> table_;
  std::int64_t scale_den_ = 0;
  double scale_h_ = -1.0;
  quad scale_ = 0;
};

thread_local PowerTable power_table;

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw std::domain_error("negative or non-finite time: " + std::to_string(t));
  if (t > 1.0 + kTimeSlack) throw std::domain_error("time outside [0, 1]: " + std::to_string(t));
}

// falling factorial (2H)(2H-1)...(2H-k+1)
double falling(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a - i;
  return r;
}

double rho_hat_series(double x, double two_h) {
  // central fourth difference of x^{2H} expanded in derivatives
  static constexpr double coef[] = {1.0, 1.0 / 6.0, 1.0 / 80.0, 17.0 / 30240.0, 31.0 / 1814400.0};
  const double inv2 = 1.0 / (x * x);
  double scale = 1.0;
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    sum += coef[i] * falling(two_h, 4 + 2 * i) * scale;
    scale *= inv2;
  }
  return -0.5 * sum * std::pow(x, two_h - 4.0);
}

quad rho_hat_quad(std::int64_t j, double two_h) {
  const quad e = two_h;
  const quad q = static_cast<quad>(j);
  quad s = -qpow_abs(q + 2, e) + 4 * qpow_abs(q + 1, e) - 6 * qpow_abs(q, e) + 4 * qpow_abs(q - 1, e) -
           qpow_abs(q - 2, e);
  return s / 2;
}

}  // namespace

HurstParam::HurstParam(double value) : value_(value) {
  if (!(value > 0.5 && value < 1.0)) {
    throw std::invalid_argument("Hurst index must lie in (1/2, 1), got " + std::to_string(value));
  }
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> weights)
    : breakpoints_(std::move(breakpoints)), weights_(std::move(weights)) {
  validate();
}

StepFunction StepFunction::on_grid(std::vector<std::int64_t> numerators, std::int64_t denominator,
                                   std::vector<double> weights) {
  if (denominator <= 0) throw std::invalid_argument("step function denominator must be positive");
  StepFunction f;
  f.breakpoints_.reserve(numerators.size());
  for (auto v : numerators) {
    if (v < 0 || v > denominator) throw std::domain_error("grid breakpoint outside [0, 1]");
    f.breakpoints_.push_back(static_cast<double>(v) / static_cast<double>(denominator));
  }
  f.numerators_ = std::move(numerators);
  f.denominator_ = denominator;
  f.weights_ = std::move(weights);
  f.validate();
  for (std::size_t i = 1; i < f.numerators_.size(); ++i) {
    if (f.numerators_[i] <= f.numerators_[i - 1]) throw std::invalid_argument("breakpoints must be strictly increasing");
  }
  return f;
}

StepFunction StepFunction::indicator(std::int64_t j, std::int64_t n) {
  if (n < 1 || j < 1 || j > n) throw std::out_of_range("indicator index out of range");
  return on_grid({j - 1, j}, n, {1.0});
}

StepFunction StepFunction::second_difference(std::int64_t j, std::int64_t n) {
  if (n < 2 || j < 1 || j > n - 1) throw std::out_of_range("second difference index out of range");
  return on_grid({j - 1, j, j + 1}, n, {-1.0, 1.0});
}

void StepFunction::validate() const {
  if (breakpoints_.size() < 2) throw std::invalid_argument("step function needs at least two breakpoints");
  if (weights_.size() + 1 != breakpoints_.size()) {
    throw std::invalid_argument("step function needs one weight per interval");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    check_time(breakpoints_[i]);
    if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1])) {
      throw std::invalid_argument("breakpoints must be strictly increasing");
    }
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("step function weight is not finite");
  }
}

double fbm_covariance(double s, double t, HurstParam h) {
  if (!(s >= 0.0) || !(t >= 0.0)) throw std::domain_error("fbm_covariance: negative time");
  const double e = h.two_h();
  return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

double inner_product_steps(const StepFunction& a, const StepFunction& b, HurstParam h) {
  // The s^{2H} and t^{2H} parts cancel in the rectangle increment of R, so
  // only |v - u|^{2H} terms survive.
  const double two_h = h.two_h();
  const auto& wa = a.weights();
  const auto& wb = b.weights();
  quad total = 0;
  if (a.has_grid() && b.has_grid()) {
    const std::int64_t den = std::lcm(a.denominator(), b.denominator());
    const std::int64_t sa = den / a.denominator();
    const std::int64_t sb = den / b.denominator();
    const auto& na = a.numerators();
    const auto& nb = b.numerators();
    for (std::size_t p = 0; p < wa.size(); ++p) {
      const std::int64_t u1 = na[p] * sa, u2 = na[p + 1] * sa;
      for (std::size_t q = 0; q < wb.size(); ++q) {
        const std::int64_t v1 = nb[q] * sb, v2 = nb[q + 1] * sb;
        quad rect = -power_table.at(v2 - u2, two_h) + power_table.at(v1 - u2, two_h) +
                    power_table.at(v2 - u1, two_h) - power_table.at(v1 - u1, two_h);
        total += static_cast<quad>(wa[p]) * static_cast<quad>(wb[q]) * rect;
      }
    }
    total *= power_table.scale(den, two_h);
  } else {
    const quad e = two_h;
    const auto& ba = a.breakpoints();
    const auto& bb = b.breakpoints();
    for (std::size_t p = 0; p < wa.size(); ++p) {
      const quad u1 = ba[p], u2 = ba[p + 1];
      for (std::size_t q = 0; q < wb.size(); ++q) {
        const quad v1 = bb[q], v2 = bb[q + 1];
        quad rect = -qpow_abs(v2 - u2, e) + qpow_abs(v1 - u2, e) + qpow_abs(v2 - u1, e) - qpow_abs(v1 - u1, e);
        total += static_cast<quad>(wa[p]) * static_cast<quad>(wb[q]) * rect;
      }
    }
  }
  return static_cast<double>(total / 2);
}

double c0(HurstParam h) { return 4.0 - std::pow(2.0, h.two_h()); }

double rho_hat(std::int64_t j, HurstParam h) {
  if (j < 0) j = -j;
  if (j == 0) return c0(h);
  if (j > kSeriesThreshold) return rho_hat_series(static_cast<double>(j), h.two_h());
  return static_cast<double>(rho_hat_quad(j, h.two_h()));
}

std::vector<double> rho_hat_table(std::int64_t radius, HurstParam h) {
  if (radius < 0) throw std::invalid_argument("rho_hat_table: negative radius");
  std::vector<double> out(static_cast<std::size_t>(radius) + 1);
  for (std::int64_t j = 0; j <= radius; ++j) out[static_cast<std::size_t>(j)] = rho_hat(j, h);
  return out;
}

}  // namespace fpv
