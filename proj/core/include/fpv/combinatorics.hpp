#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fpv/kernel.hpp"

namespace fpv {

// Exact integer helpers; all throw std::overflow_error past int64.
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t factorial(int n);
std::int64_t binomial(int n, int r);
std::int64_t double_factorial(int m);  // (-1)!! = 0!! = 1

// integer * c0^power
struct ScaledInteger {
  std::int64_t integer = 0;
  int c0_power = 0;
  double value(HurstParam h) const;
};

// mu_{2k,2l} = C(2k,2l) (2k-2l-1)!! c0^{k-l}
ScaledInteger mu_parts(int k, int l);
double mu(int k, int l, HurstParam h);

// Coefficient of the r-fold contraction in I_p(f^p) I_q(g^q): r! C(p,r) C(q,r).
std::int64_t product_formula_coeff(int p, int q, int r);

// Multiset of generators: multiplicity per generator index.
using WickMonomial = std::vector<int>;

// One term of the Wick product :A: :B: = sum over cross contraction matrices
// r (r[i][j] pairs between generator i of A and j of B) of
// count * prod <e_i, e_j>^{r_ij} * :A - rows(r) + B - cols(r):
struct ContractionTerm {
  std::vector<std::vector<int>> pairs;
  std::int64_t count = 0;
};
std::vector<ContractionTerm> wick_product_terms(const WickMonomial& a, const WickMonomial& b);

struct ContractionPattern {
  int pi1 = 0;
  int pi2 = 0;
  auto operator<=>(const ContractionPattern&) const = default;
};

// I_a(f1^{a1} f2^{a2}) x I_c(g^c): coefficient of the pattern contracting pi1
// copies of f1 and pi2 copies of f2 with g.
std::map<ContractionPattern, std::int64_t> mixed_contraction_coeffs(int a1, int a2, int c);

struct LambdaIndex {
  int l1 = 0;
  int l2 = 0;
  int m = 0;
  int q1() const noexcept { return 2 * l1 - 1 - m; }
  int q2() const noexcept { return 2 * l2 - 1 - m; }
  bool in_zero() const noexcept { return l1 + l2 - 1 - m == 0; }
  auto operator<=>(const LambdaIndex&) const = default;
};

enum class SharpClass { both, first_only, second_only };  // q1,q2 > 0 | q2 = 0 | q1 = 0
const char* to_string(SharpClass c);

struct SharpIndex {
  LambdaIndex base;
  int l3 = 0;
  SharpClass cls = SharpClass::both;
  auto operator<=>(const SharpIndex&) const = default;
};

struct LambdaSets {
  std::vector<LambdaIndex> all;
  std::vector<LambdaIndex> zero;
  std::vector<LambdaIndex> plus;
  std::vector<SharpIndex> sharp;
};
LambdaSets lambda_sets(int k);

struct TruncatedSum {
  double value = 0.0;
  double tail_bound = 0.0;
  std::int64_t radius = 0;
  std::string label;
};

// Envelope constant for |rho_hat(j)| <= C |j|^{2H-4}, |j| >= 1.
double rho_envelope_constant(HurstParam h);

// sum over i in Z of rho_hat(i)^e
TruncatedSum rho_power_sum(int exponent, HurstParam h, double tol = 1e-7);

// sum over i1, i2 in Z of rho_hat(i1)^{m+1} rho_hat(i2)^{q1} rho_hat(i2-i1)^{q2}
TruncatedSum rho_double_sum(int m, int q1, int q2, HurstParam h, double tol = 1e-6);

struct LimitConstant {
  double value = 0.0;
  double tail_bound = 0.0;  // summed over all truncated sums, weighted by coefficients
  std::vector<TruncatedSum> sums;
};

// sum_l 2l mu_{2k,2l}^2 pf(2l-1,2l-1,2l-1) sum_i rho_hat(i)^{2l}
LimitConstant c_g_infinity(int k, HurstParam h, double tol = 1e-7);

// c_{l1,l2,m} = 2 l1 mu_{2k,2l1} mu_{2k,2l2} pf(2l1-1, 2l2-1, m)
ScaledInteger lambda_coefficient(const LambdaIndex& idx, int k);

// Coefficient multiplying the double rho sum of a sharp index.
ScaledInteger sharp_coefficient(const SharpIndex& idx, int k);

LimitConstant c_tau(int k, HurstParam h, double tol = 1e-6);

// Runs the sample-based extraction of every mixed contraction coefficient
// c_tau(k) relies on and throws on the first mismatch. Cached per k.
void validate_contraction_tables(int k);

}  // namespace fpv
