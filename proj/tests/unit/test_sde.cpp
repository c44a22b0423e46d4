#include <gtest/gtest.h>

#include <cmath>

#include "fpv/sde.hpp"
#include "fpv/stats.hpp"

using namespace fpv;

TEST(Registry, ContainsModelsAndIsExact) {
  const auto& r = model_registry();
  auto names = r.names();
  for (const char* n : {"additive", "bounded-tanh", "bounded-tanh-lorentz", "linear"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  EXPECT_THROW(r.make("Additive"), std::invalid_argument);
  try {
    r.make("nope");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("bounded-tanh"), std::string::npos);
  }
  EXPECT_THROW(r.make("additive", {{"sigmaa", 2.0}}), std::invalid_argument);
}

TEST(Registry, ModelShapes) {
  const auto& r = model_registry();
  auto add = r.make("additive", {{"sigma", 1.0}});
  for (double x : {-10.0, 0.0, 3.3}) {
    EXPECT_EQ(add->v1(x), 1.0);
    EXPECT_EQ(add->v2(x), 0.0);
    EXPECT_EQ(add->f(x), 1.0);
  }
  auto bt = r.make("bounded-tanh", {{"sigma", 2.0}});
  for (double x = -30; x <= 30; x += 0.25) {
    EXPECT_GE(bt->v1(x), 1.0);
    EXPECT_LE(bt->v1(x), 3.0);
    EXPECT_NEAR(bt->v2(x), -std::tanh(x), 1e-15);
  }
  auto lz = r.make("bounded-tanh-lorentz", {{"weight", 3.0}});
  EXPECT_NEAR(lz->f(2.0), 3.0 / 5.0, 1e-15);
  EXPECT_TRUE(bt->bounded);
  EXPECT_FALSE(r.make("linear")->bounded);
}

TEST(Registry, DerivativesMatchFiniteDifferences) {
  auto m = model_registry().make("bounded-tanh-lorentz", {{"sigma", 1.3}, {"weight", 0.7}});
  const double eps = 1e-5;
  for (double x : {-1.7, -0.2, 0.0, 0.9, 2.4}) {
    for (int o = 0; o < 4; ++o) {
      const double fd = (m->v1.derivative(x + eps, o) - m->v1.derivative(x - eps, o)) / (2 * eps);
      EXPECT_NEAR(m->v1.derivative(x, o + 1), fd, 1e-6);
      const double fd2 = (m->v2.derivative(x + eps, o) - m->v2.derivative(x - eps, o)) / (2 * eps);
      EXPECT_NEAR(m->v2.derivative(x, o + 1), fd2, 1e-6);
    }
    for (int o = 0; o < 2; ++o) {
      const double fd = (m->f.derivative(x + eps, o) - m->f.derivative(x - eps, o)) / (2 * eps);
      EXPECT_NEAR(m->f.derivative(x, o + 1), fd, 1e-6);
    }
  }
  EXPECT_THROW(m->f.derivative(0.0, 3), std::out_of_range);
}

TEST(Registry, SpotCheck) {
  auto rep = spot_check_bounds(*model_registry().make("bounded-tanh"));
  EXPECT_TRUE(rep.finite);
  EXPECT_TRUE(rep.within_bound);
  auto lin = spot_check_bounds(*model_registry().make("linear"));
  EXPECT_TRUE(lin.finite);
}

TEST(Euler, AdditiveTelescopes) {
  auto m = model_registry().make("additive", {{"sigma", 1.7}});
  for (std::size_t kappa : {1u, 4u}) {
    auto p = simulate_path(m, 32, kappa, 0.7, 5, 0.3);
    ASSERT_EQ(p.X.size(), 32 * kappa + 1);
    ASSERT_EQ(p.B.size(), p.X.size());
    for (std::size_t i = 0; i < p.X.size(); ++i) EXPECT_NEAR(p.X[i], 0.3 + 1.7 * p.B[i], 1e-12);
    auto cx = p.coarse_x();
    ASSERT_EQ(cx.size(), 33u);
    for (std::size_t j = 0; j <= 32; ++j) EXPECT_EQ(cx[j], p.X[kappa * j]);
  }
}

TEST(Euler, PureDrift) {
  auto m = std::make_shared<SdeModel>(SdeModel{"drift", SmoothFunction::constant(0.0), SmoothFunction::constant(2.5),
                                               SmoothFunction::constant(1.0, 2), true, {}});
  std::vector<double> b(41);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(static_cast<double>(i));
  auto p = euler_solve(m, b, -1.0, 4);
  for (std::size_t i = 0; i < p.X.size(); ++i) EXPECT_NEAR(p.X[i], -1.0 + 2.5 * i / 40.0, 1e-13);
  EXPECT_EQ(p.coarse_n(), 10u);
}

TEST(Euler, Errors) {
  auto m = model_registry().make("additive");
  std::vector<double> b(10, 0.0);
  EXPECT_THROW(euler_solve(m, b, 0.0, 4), std::invalid_argument);  // 9 steps not divisible by 4
  auto blow = std::make_shared<SdeModel>(SdeModel{
      "blow", SmoothFunction::constant(0.0), SmoothFunction([](double x, int) { return x * x * 1e200; }, 4),
      SmoothFunction::constant(1.0, 2), false, {}});
  std::vector<double> z(9, 0.0);
  try {
    euler_solve(blow, z, 1.0, 1);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(Euler, StrongSelfConvergence) {
  // error against a kappa = 64 reference on the same fBm path shrinks with kappa
  auto m = model_registry().make("bounded-tanh");
  const std::size_t n = 16, paths = 60;
  std::vector<double> err(3, 0.0);
  const std::size_t ks[] = {2, 8, 32};
  for (std::size_t s = 0; s < paths; ++s) {
    auto ref = simulate_path(m, n, 64, 0.7, 100 + s);
    for (int t = 0; t < 3; ++t) {
      std::vector<double> b;
      for (std::size_t i = 0; i < ref.B.size(); i += 64 / ks[t]) b.push_back(ref.B[i]);
      auto p = euler_solve(m, b, 0.0, ks[t]);
      auto a = p.coarse_x(), r = ref.coarse_x();
      double e = 0;
      for (std::size_t j = 0; j <= n; ++j) e = std::max(e, std::abs(a[j] - r[j]));
      err[t] += e / paths;
    }
  }
  EXPECT_GT(err[0], err[1]);
  EXPECT_GT(err[1], err[2]);
}

TEST(Euler, HolderIncrements) {
  // L2 norm of f(X_r1) - f(X_r0) against the gap on a log-log scale
  const double h = 0.75;
  auto m = model_registry().make("bounded-tanh-lorentz");
  const std::size_t n = 256, paths = 300;
  const std::size_t gaps[] = {1, 4, 16, 64};
  std::vector<double> norms(4, 0.0);
  for (std::size_t s = 0; s < paths; ++s) {
    auto p = simulate_path(m, n, 1, h, 900 + s);
    for (int g = 0; g < 4; ++g) {
      const double d = m->f(p.X[100 + gaps[g]]) - m->f(p.X[100]);
      norms[g] += d * d / paths;
    }
  }
  std::vector<double> lx, ly;
  for (int g = 0; g < 4; ++g) {
    lx.push_back(std::log(static_cast<double>(gaps[g]) / n));
    ly.push_back(0.5 * std::log(norms[g]));
  }
  EXPECT_GE(least_squares_line(lx, ly).slope, h - 0.1);
}
