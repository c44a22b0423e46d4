#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpv/kernel.hpp"
#include "fpv/random.hpp"

namespace fpv {

// Named Gaussian generators with their covariance (Gram) matrix.
class GramContext {
 public:
  GramContext(std::vector<std::string> names, std::vector<double> gram_row_major);
  static GramContext from_step_functions(std::vector<std::string> names, const std::vector<StepFunction>& fns,
                                         HurstParam h);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::size_t index_of(const std::string& name) const;
  double operator()(std::size_t i, std::size_t j) const { return gram_[i * size() + j]; }

  // One joint draw of the generators.
  std::vector<double> sample(NormalStream& rng) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> gram_;
  std::vector<double> root_;  // row-major, root * root^T = gram
};

// Elementary multiple integral I_p of the symmetrized tensor product of the
// generators, each repeated by its multiplicity.
struct ChaosTerm {
  std::vector<int> multiplicity;

  int order() const noexcept;
  static ChaosTerm single(std::size_t generators, std::size_t g, int p);
  static ChaosTerm from(std::size_t generators, std::initializer_list<std::pair<std::size_t, int>> parts);
};

constexpr int kWickOrderCap = 12;

// E[prod x_i^{powers_i}] by enumerating perfect matchings.
double isserlis_moment(const GramContext& ctx, std::span<const int> powers);

// :x^p: for a centred Gaussian with the given variance (Hermite recursion).
double wick_power(double x, double variance, int p);

double chaos_evaluate(const ChaosTerm& term, const GramContext& ctx, std::span<const double> sample);

// Monomial exponents -> coefficient.
using Polynomial = std::map<std::vector<int>, double>;
Polynomial wick_polynomial(const ChaosTerm& term, const GramContext& ctx);

double chaos_expectation_product(std::span<const ChaosTerm> terms, const GramContext& ctx);

// Candidate expansion term weight * I(term).
struct BasisTerm {
  ChaosTerm term;
  double weight = 1.0;
};

struct CoefficientFit {
  std::vector<double> coefficients;
  double max_residual = 0.0;  // relative to the largest |lhs|
};

// Least squares fit of prod(product) against the basis on random samples.
CoefficientFit fit_coefficients_by_sampling(const GramContext& ctx, std::span<const ChaosTerm> product,
                                            std::span<const BasisTerm> basis, std::uint64_t seed,
                                            std::size_t samples = 0);

// Same coefficients from exact expectations (L2 projection); subject to the
// order cap.
std::vector<double> project_coefficients(const GramContext& ctx, std::span<const ChaosTerm> product,
                                         std::span<const BasisTerm> basis);

// Coefficients of I_p(f^p) I_q(g^q) against <f,g>^r I(f^{p-r} g^{q-r}), r = 0..min(p,q).
std::vector<double> extract_product_coefficients(int p, int q, std::uint64_t seed = 1);

// Coefficients of I(f1^{a1} f2^{a2}) I(g^c) against
// <f1,g>^{pi1} <f2,g>^{pi2} I(f1^{a1-pi1} f2^{a2-pi2} g^{c-pi1-pi2}).
std::map<std::pair<int, int>, double> extract_mixed_coefficients(int a1, int a2, int c, std::uint64_t seed = 1);

// Reference 3-generator context used by the coefficient oracles.
GramContext reference_context_3();

struct WickCheckItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct WickCheckOptions {
  int max_product_order = 5;     // p, q <= this
  int max_mixed_total = 8;       // a1 + a2 + c <= this
  std::int64_t perturbation = 0;  // added to one symbolic coefficient (fault injection)
  std::uint64_t seed = 1;
};

struct WickCheckReport {
  std::vector<WickCheckItem> items;
  bool pass() const;
};

// Full oracle validation: symbolic coefficients vs sampling and exact routes,
// plus moment identities.
WickCheckReport run_wick_suite(const WickCheckOptions& options = {});

}  // namespace fpv
