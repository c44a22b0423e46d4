#include <gtest/gtest.h>

#include <cmath>

#include "fpv/combinatorics.hpp"
#include "fpv/sde.hpp"
#include "fpv/variation.hpp"
#include "fpv/wick.hpp"

using namespace fpv;

TEST(SecondDifference, AffineAndQuadratic) {
  std::vector<double> lin, quad;
  const int n = 10;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    lin.push_back(2.0 - 3.0 * t);
    quad.push_back(t * t);
  }
  for (double d : second_difference(lin)) EXPECT_NEAR(d, 0.0, 1e-15);
  auto q = second_difference(quad);
  ASSERT_EQ(q.size(), static_cast<std::size_t>(n - 1));
  for (double d : q) EXPECT_NEAR(d, 2.0 / (n * n), 1e-15);
  EXPECT_THROW(second_difference(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST(Variation, ZeroWeightGivesZero) {
  auto m = model_registry().make("additive", {{"weight", 0.0}});
  auto p = simulate_path(m, 16, 4, 0.7, 1);
  EXPECT_EQ(weighted_power_variation(p.coarse_x(), *m, 1, HurstParam(0.7)), 0.0);
  EXPECT_EQ(limit_variation(p, 1, HurstParam(0.7)), 0.0);
}

TEST(Variation, LimitInAdditiveModel) {
  auto m = model_registry().make("additive", {{"sigma", 1.5}});
  HurstParam h(0.65);
  auto p = simulate_path(m, 16, 4, h.value(), 2);
  EXPECT_NEAR(limit_variation(p, 1, h), mu(1, 0, h) * 1.5 * 1.5, 1e-14);
  EXPECT_NEAR(limit_variation(p, 2, h), mu(2, 0, h) * std::pow(1.5, 4), 1e-13);
  auto q = simulate_path(m, 16, 1, h.value(), 2);
  EXPECT_THROW(limit_variation(q, 1, h), std::invalid_argument);
}

TEST(Variation, ErrorStatistic) {
  EXPECT_EQ(error_statistic(1.0, 1.0, 9), 0.0);
  EXPECT_DOUBLE_EQ(error_statistic(2.0, 1.0, 4), 2.0);
}

TEST(Variation, EvaluateIsConsistent) {
  auto m = model_registry().make("bounded-tanh");
  HurstParam h(0.7);
  auto p = simulate_path(m, 64, 8, h.value(), 11);
  auto r = evaluate_variation(p, 1, h, true);
  EXPECT_EQ(r.n, 64u);
  EXPECT_DOUBLE_EQ(r.z_n, std::sqrt(64.0) * (r.s_n - r.s_inf));
  ASSERT_EQ(r.contributions.size(), 63u);
  double s = 0;
  for (double c : r.contributions) s += c;
  EXPECT_NEAR(s, r.s_n, 1e-12 * std::abs(r.s_n));
}

TEST(Quadrature, TrapezoidVsRiemann) {
  for (int m : {64, 256, 1024}) {
    std::vector<double> v;
    for (int i = 0; i <= m; ++i) v.push_back(std::exp(static_cast<double>(i) / m));
    EXPECT_NEAR(trapezoid(v), std::exp(1.0) - 1, 1.0 / (m * m));
    EXPECT_NEAR(left_riemann(v) - trapezoid(v), -(std::exp(1.0) - 1) / (2.0 * m), 1.0 / (m * m));
  }
}

// E[S_n] and Var(S_n) for the additive model from exact Gaussian moments of the
// second differences.
TEST(Variation, ExactMomentsMatchWickOracle) {
  for (double hv : {0.6, 0.8}) {
    HurstParam h(hv);
    const double sigma = 1.3;
    for (std::size_t n : {8u, 12u}) {
      std::vector<StepFunction> d;
      std::vector<std::string> names;
      for (std::size_t j = 1; j < n; ++j) {
        d.push_back(StepFunction::second_difference(static_cast<std::int64_t>(j), static_cast<std::int64_t>(n)));
        names.push_back("d" + std::to_string(j));
      }
      auto ctx = GramContext::from_step_functions(names, d, h);
      for (int k : {1, 2}) {
        const double scale = std::pow(static_cast<double>(n), 2 * k * hv - 1) * std::pow(sigma, 2 * k);
        double mean = 0, second = 0;
        for (std::size_t a = 0; a < n - 1; ++a) {
          std::vector<int> pw(n - 1, 0);
          pw[a] = 2 * k;
          mean += isserlis_moment(ctx, pw);
          if (4 * k > kWickOrderCap) continue;
          for (std::size_t b = 0; b < n - 1; ++b) {
            std::vector<int> pw2(n - 1, 0);
            pw2[a] += 2 * k;
            pw2[b] += 2 * k;
            second += isserlis_moment(ctx, pw2);
          }
        }
        mean *= scale;
        auto exact = additive_variation_moments(n, k, h, sigma);
        EXPECT_NEAR(exact.mean, mean, 1e-10 * mean);
        EXPECT_NEAR(exact.mean, (1.0 - 1.0 / n) * mu(k, 0, h) * std::pow(sigma, 2 * k), 1e-12);
        if (4 * k <= kWickOrderCap) {
          const double var = second * scale * scale - mean * mean;
          EXPECT_NEAR(exact.variance, var, 1e-10 * var);
        }
      }
    }
  }
}

TEST(Variation, AdditiveZnVarianceFromDoubleSum) {
  HurstParam h(0.7);
  const std::size_t n = 64;
  double s2 = 0;
  for (std::size_t a = 1; a < n; ++a)
    for (std::size_t b = 1; b < n; ++b) {
      const double r = rho_hat(static_cast<std::int64_t>(b) - static_cast<std::int64_t>(a), h);
      s2 += r * r;
    }
  auto ex = additive_variation_moments(n, 1, h, 1.0);
  EXPECT_NEAR(n * ex.variance, 2.0 * s2 / n, 1e-12);
}
