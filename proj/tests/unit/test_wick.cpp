#include <gtest/gtest.h>

#include <cmath>

#include "fpv/combinatorics.hpp"
#include "fpv/wick.hpp"

using namespace fpv;

namespace {
GramContext two() { return GramContext({"f", "g"}, {1.3, 0.4, 0.4, 0.8}); }
}  // namespace

TEST(Gram, Validation) {
  EXPECT_THROW(GramContext({"a", "b"}, {1.0, 0.5, 0.4, 1.0}), std::invalid_argument);
  EXPECT_THROW(GramContext({"a", "b"}, {1.0, 2.0, 2.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(GramContext({"a"}, {1.0, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(GramContext({"a", "b"}, {1.0, 1.0, 1.0, 1.0}));
  auto c = two();
  EXPECT_EQ(c.index_of("g"), 1u);
  EXPECT_THROW(c.index_of("h"), std::out_of_range);
}

TEST(Isserlis, Examples) {
  auto c = two();
  EXPECT_DOUBLE_EQ(isserlis_moment(c, std::vector<int>{0, 2}), 0.8);
  EXPECT_EQ(isserlis_moment(c, std::vector<int>{1, 2}), 0.0);
  EXPECT_NEAR(isserlis_moment(c, std::vector<int>{4, 0}), 3 * 1.3 * 1.3, 1e-14);
  EXPECT_NEAR(isserlis_moment(c, std::vector<int>{2, 2}), 1.3 * 0.8 + 2 * 0.4 * 0.4, 1e-14);
  EXPECT_NO_THROW(isserlis_moment(c, std::vector<int>{6, 6}));
  EXPECT_THROW(isserlis_moment(c, std::vector<int>{8, 6}), std::length_error);
}

TEST(Chaos, LowOrders) {
  auto c = two();
  const std::vector<double> x{0.7, -1.1};
  EXPECT_DOUBLE_EQ(chaos_evaluate(ChaosTerm::single(2, 0, 1), c, x), 0.7);
  EXPECT_NEAR(chaos_evaluate(ChaosTerm::single(2, 0, 2), c, x), 0.49 - 1.3, 1e-15);
  EXPECT_NEAR(chaos_evaluate(ChaosTerm::from(2, {{0, 1}, {1, 1}}), c, x), 0.7 * -1.1 - 0.4, 1e-15);
  EXPECT_NEAR(wick_power(2.0, 1.0, 3), 8.0 - 6.0, 1e-15);
  EXPECT_THROW(chaos_evaluate(ChaosTerm::single(2, 0, 1), c, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Chaos, SingleGeneratorIsScaledHermite) {
  auto c = two();
  const double s = std::sqrt(1.3);
  for (double x : {-2.0, 0.3, 1.9}) {
    const double u = x / s;
    const double he4 = u * u * u * u - 6 * u * u + 3;
    EXPECT_NEAR(chaos_evaluate(ChaosTerm::single(2, 0, 4), c, std::vector<double>{x, 0.0}), std::pow(s, 4) * he4, 1e-12);
  }
}

TEST(Chaos, CenteredUnderSampling) {
  auto c = two();
  NormalStream rng(17);
  const int m = 100000;
  for (int p = 1; p <= 4; ++p) {
    auto t = ChaosTerm::from(2, {{0, p}, {1, 1}});
    double s = 0, s2 = 0;
    for (int i = 0; i < m; ++i) {
      const double v = chaos_evaluate(t, c, c.sample(rng));
      s += v;
      s2 += v * v;
    }
    const double mean = s / m, se = std::sqrt((s2 / m - mean * mean) / m);
    EXPECT_LT(std::abs(mean), 4 * se) << p;
  }
}

TEST(Expectation, Examples) {
  auto c = two();
  const ChaosTerm a[] = {ChaosTerm::single(2, 0, 1), ChaosTerm::single(2, 0, 1)};
  EXPECT_NEAR(chaos_expectation_product(a, c), 1.3, 1e-14);
  const ChaosTerm b[] = {ChaosTerm::single(2, 0, 2), ChaosTerm::single(2, 0, 2)};
  EXPECT_NEAR(chaos_expectation_product(b, c), 2 * 1.3 * 1.3, 1e-13);
  const ChaosTerm d[] = {ChaosTerm::single(2, 0, 1), ChaosTerm::single(2, 1, 1), ChaosTerm::from(2, {{0, 1}, {1, 1}})};
  EXPECT_NEAR(chaos_expectation_product(d, c), 1.3 * 0.8 + 0.4 * 0.4, 1e-14);
  // isometry for mixed terms: E[I_p(f^p) I_p(g^p)] = p! <f,g>^p
  for (int p = 1; p <= 6; ++p) {
    const ChaosTerm e[] = {ChaosTerm::single(2, 0, p), ChaosTerm::single(2, 1, p)};
    EXPECT_NEAR(chaos_expectation_product(e, c), factorial(p) * std::pow(0.4, p), 1e-11 * factorial(p) * std::pow(0.4, p));
  }
  const ChaosTerm big[] = {ChaosTerm::single(2, 0, 7), ChaosTerm::single(2, 1, 7)};
  EXPECT_THROW(chaos_expectation_product(big, c), std::length_error);
}

TEST(Expectation, PolynomialExpansionAgreesWithEvaluation) {
  auto c = reference_context_3();
  auto t = ChaosTerm::from(3, {{0, 2}, {1, 1}, {2, 2}});
  auto poly = wick_polynomial(t, c);
  const std::vector<double> x{0.3, -0.8, 1.4};
  double v = 0;
  for (const auto& [mono, coef] : poly) {
    double m = coef;
    for (std::size_t i = 0; i < mono.size(); ++i) m *= std::pow(x[i], mono[i]);
    v += m;
  }
  EXPECT_NEAR(v, chaos_evaluate(t, c, x), 1e-12);
}

TEST(Oracle, SamplingAndProjectionAgree) {
  auto c = two();
  const ChaosTerm prod[] = {ChaosTerm::single(2, 0, 3), ChaosTerm::single(2, 1, 2)};
  std::vector<BasisTerm> basis;
  for (int r = 0; r <= 2; ++r) basis.push_back({ChaosTerm::from(2, {{0, 3 - r}, {1, 2 - r}}), std::pow(c(0, 1), r)});
  auto fit = fit_coefficients_by_sampling(c, prod, basis, 4);
  auto exact = project_coefficients(c, prod, basis);
  for (int r = 0; r <= 2; ++r) {
    EXPECT_NEAR(fit.coefficients[r], product_formula_coeff(3, 2, r), 1e-6);
    EXPECT_NEAR(exact[r], product_formula_coeff(3, 2, r), 1e-8);
  }
  EXPECT_LT(fit.max_residual, 1e-8);
}

TEST(Suite, PassesAndDetectsFault) {
  WickCheckOptions o;
  o.max_product_order = 3;
  o.max_mixed_total = 4;
  EXPECT_TRUE(run_wick_suite(o).pass());
  o.max_product_order = 3;
  o.perturbation = 1;
  auto bad = run_wick_suite(o);
  EXPECT_FALSE(bad.pass());
  int failed = 0;
  for (const auto& i : bad.items) failed += !i.pass;
  EXPECT_EQ(failed, 1);
}
