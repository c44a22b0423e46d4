#include <gtest/gtest.h>

#include <cmath>

#include "fpv/parallel.hpp"
#include "fpv/random.hpp"
#include "fpv/stats.hpp"

using namespace fpv;

TEST(Random, SubstreamsAreDistinctAndPure) {
  EXPECT_EQ(substream_seed(1, 2), substream_seed(1, 2));
  EXPECT_NE(substream_seed(1, 2), substream_seed(1, 3));
  EXPECT_NE(substream_seed(1, 2, StreamTag::fgn), substream_seed(1, 2, StreamTag::expansion));
  EXPECT_NE(substream_seed(1, 2), substream_seed(2, 2));
}

TEST(Parallel, OrderedAndRethrows) {
  auto v = parallel_map(100, [](std::size_t i) { return i * i; }, 4);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(v[i], i * i);
  EXPECT_THROW(parallel_map(
                   10,
                   [](std::size_t i) {
                     if (i == 7) throw std::runtime_error("x");
                     return i;
                   },
                   3),
               std::runtime_error);
}

TEST(Stats, Basics) {
  std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean(v), 2.5);
  EXPECT_NEAR(sample_variance(v), 5.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
  std::vector<double> x{0, 1, 2}, y{1, 3, 5};
  auto f = least_squares_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
}

TEST(Stats, Kolmogorov) {
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_survival(0.0), 1.0, 1e-12);
  std::vector<double> s{0.1, 0.4, 0.7};
  std::vector<double> f{0.1, 0.4, 0.7};  // uniform CDF
  EXPECT_NEAR(ks_statistic_sorted(s, f), 0.3, 1e-12);
  std::vector<double> u;
  for (int i = 1; i <= 1000; ++i) u.push_back((i - 0.5) / 1000.0);
  EXPECT_NEAR(ks_statistic_sorted(u, u), 0.0005, 1e-12);
}

TEST(Stats, TwoSampleKs) {
  NormalStream r(5);
  std::vector<double> a(4000), b(4000), c(4000);
  r.fill(a);
  r.fill(b);
  for (auto& x : c) x = r.next() + 0.3;
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.001);
  EXPECT_LT(ks_two_sample(a, c).p_value, 1e-6);
}

TEST(Stats, DkwScaleUnderNull) {
  NormalStream r(8);
  const std::size_t m = 20000;
  std::vector<double> a(m);
  r.fill(a);
  std::sort(a.begin(), a.end());
  std::vector<double> f(m), shifted(m);
  for (std::size_t i = 0; i < m; ++i) {
    f[i] = 0.5 * std::erfc(-a[i] / std::sqrt(2.0));
    shifted[i] = 0.5 * std::erfc(-(a[i] - 0.2) / std::sqrt(2.0));
  }
  const double d = ks_statistic_sorted(a, f);
  EXPECT_LT(d, 4 * std::sqrt(std::log(2.0) / (2.0 * m)));
  EXPECT_GT(ks_statistic_sorted(a, shifted), 0.2 * 0.39 * 0.9);
  auto ci = bootstrap_ks_difference(a, f, shifted, 300, 1);
  EXPECT_LT(ci.hi, 0.0);
  EXPECT_LE(ci.lo, ci.hi);
}

TEST(Stats, PiecewiseLinear) {
  PiecewiseLinear p({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
  EXPECT_DOUBLE_EQ(p(0.5), 1.0);
  EXPECT_DOUBLE_EQ(p(2.0), 1.0);
  EXPECT_DOUBLE_EQ(p(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(p(5.0), 0.0);
  EXPECT_THROW(PiecewiseLinear({1.0, 0.0}, {0.0, 0.0}), std::invalid_argument);
}
