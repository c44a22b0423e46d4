#include "fpv/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <tuple>

#include "fft.hpp"
#include "fpv/wick.hpp"

namespace fpv {

namespace {

constexpr std::int64_t kStartRadius = 1024;
constexpr std::int64_t kMaxSingleRadius = std::int64_t{1} << 22;
constexpr std::int64_t kMaxDoubleRadius = std::int64_t{1} << 18;

// Process-wide rho_hat tables per H; grown by replacement so handed-out
// tables stay immutable.
std::shared_ptr<const std::vector<double>> rho_table(HurstParam h, std::int64_t radius) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[h.value()];
  if (!slot || static_cast<std::int64_t>(slot->size()) <= radius) {
    std::int64_t target = std::max<std::int64_t>(radius, slot ? 2 * static_cast<std::int64_t>(slot->size()) : radius);
    auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(target) + 1);
    std::size_t start = 0;
    if (slot) {
      std::copy(slot->begin(), slot->end(), table->begin());
      start = slot->size();
    }
    for (std::size_t j = start; j < table->size(); ++j) (*table)[j] = rho_hat(static_cast<std::int64_t>(j), h);
    slot = std::move(table);
  }
  return slot;
}

double alpha(HurstParam h) { return 4.0 - h.two_h(); }

// bound on sum_{|i| > r} |rho_hat(i)|^e
double tail_bound(int e, std::int64_t r, HurstParam h) {
  const double c = rho_envelope_constant(h);
  const double ae = alpha(h) * e;
  return 2.0 * std::pow(c, e) * std::pow(static_cast<double>(r), 1.0 - ae) / (ae - 1.0);
}

std::int64_t radius_for(int e, HurstParam h, double tol, std::int64_t cap) {
  std::int64_t r = kStartRadius;
  while (tail_bound(e, r, h) >= tol && r < cap) r *= 2;
  return r;
}

struct PlainSum {
  double value;
  double tail;
};

PlainSum power_sum_abs(int e, HurstParam h, double tol, bool absolute) {
  const std::int64_t r = radius_for(e, h, tol, kMaxSingleRadius);
  auto table = rho_table(h, r);
  double s = 0.0;
  for (std::int64_t i = r; i >= 1; --i) {
    double v = std::pow((*table)[static_cast<std::size_t>(i)], e);
    s += absolute ? std::abs(v) : v;
  }
  double v0 = std::pow((*table)[0], e);
  return {v0 + 2.0 * s, tail_bound(e, r, h)};
}

}  // namespace

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in coefficient arithmetic");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in coefficient arithmetic");
  return r;
}

std::int64_t factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial of negative number");
  std::int64_t r = 1;
  for (int i = 2; i <= n; ++i) r = checked_mul(r, i);
  return r;
}

std::int64_t binomial(int n, int r) {
  if (n < 0 || r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  __int128 acc = 1;
  for (int i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > INT64_MAX) throw std::overflow_error("binomial overflow");
  }
  return static_cast<std::int64_t>(acc);
}

std::int64_t double_factorial(int m) {
  if (m < -1) throw std::invalid_argument("double factorial needs m >= -1");
  std::int64_t r = 1;
  for (int i = m; i > 1; i -= 2) r = checked_mul(r, i);
  return r;
}

double ScaledInteger::value(HurstParam h) const {
  return static_cast<double>(integer) * std::pow(c0(h), c0_power);
}

ScaledInteger mu_parts(int k, int l) {
  if (k < 0 || l < 0 || l > k) throw std::out_of_range("mu needs 0 <= l <= k");
  return {checked_mul(binomial(2 * k, 2 * l), double_factorial(2 * k - 2 * l - 1)), k - l};
}

double mu(int k, int l, HurstParam h) { return mu_parts(k, l).value(h); }

std::int64_t product_formula_coeff(int p, int q, int r) {
  if (p < 0 || q < 0) throw std::invalid_argument("chaos orders must be nonnegative");
  if (r < 0 || r > std::min(p, q)) throw std::out_of_range("contraction order out of range");
  return checked_mul(checked_mul(factorial(r), binomial(p, r)), binomial(q, r));
}

std::vector<ContractionTerm> wick_product_terms(const WickMonomial& a, const WickMonomial& b) {
  const std::size_t na = a.size(), nb = b.size();
  std::vector<ContractionTerm> out;
  std::vector<std::vector<int>> r(na, std::vector<int>(nb, 0));
  std::vector<int> row_left(a.begin(), a.end()), col_left(b.begin(), b.end());
  // enumerate contraction matrices cell by cell
  auto rec = [&](auto&& self, std::size_t cell) -> void {
    if (cell == na * nb) {
      std::int64_t count = 1;
      for (std::size_t i = 0; i < na; ++i) {
        int used = 0;
        for (std::size_t j = 0; j < nb; ++j) used += r[i][j];
        // ways to assign copies of generator i to columns: multinomial
        std::int64_t ways = factorial(a[i]) / factorial(a[i] - used);
        for (std::size_t j = 0; j < nb; ++j) ways /= factorial(r[i][j]);
        count = checked_mul(count, ways);
      }
      for (std::size_t j = 0; j < nb; ++j) {
        int used = 0;
        for (std::size_t i = 0; i < na; ++i) used += r[i][j];
        std::int64_t ways = factorial(b[j]) / factorial(b[j] - used);
        for (std::size_t i = 0; i < na; ++i) ways /= factorial(r[i][j]);
        count = checked_mul(count, ways);
      }
      for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) count = checked_mul(count, factorial(r[i][j]));
      out.push_back({r, count});
      return;
    }
    const std::size_t i = cell / nb, j = cell % nb;
    const int lim = std::min(row_left[i], col_left[j]);
    for (int v = 0; v <= lim; ++v) {
      r[i][j] = v;
      row_left[i] -= v;
      col_left[j] -= v;
      self(self, cell + 1);
      row_left[i] += v;
      col_left[j] += v;
    }
    r[i][j] = 0;
  };
  rec(rec, 0);
  return out;
}

std::map<ContractionPattern, std::int64_t> mixed_contraction_coeffs(int a1, int a2, int c) {
  if (a1 < 0 || a2 < 0 || c < 0) throw std::invalid_argument("mixed contraction orders must be nonnegative");
  std::map<ContractionPattern, std::int64_t> out;
  for (const auto& t : wick_product_terms({a1, a2}, {c})) {
    out[{t.pairs[0][0], t.pairs[1][0]}] = t.count;
  }
  return out;
}

const char* to_string(SharpClass c) {
  switch (c) {
    case SharpClass::both: return "sharp0";
    case SharpClass::first_only: return "sharp1";
    case SharpClass::second_only: return "sharp2";
  }
  return "?";
}

LambdaSets lambda_sets(int k) {
  if (k < 1) throw std::invalid_argument("lambda_sets needs k >= 1");
  LambdaSets s;
  for (int l1 = 1; l1 <= k; ++l1) {
    for (int l2 = 1; l2 <= k; ++l2) {
      for (int m = 0; m <= std::min(2 * l1 - 1, 2 * l2 - 1); ++m) {
        LambdaIndex idx{l1, l2, m};
        s.all.push_back(idx);
        if (idx.in_zero()) {
          s.zero.push_back(idx);
          continue;
        }
        s.plus.push_back(idx);
        const int sum = idx.q1() + idx.q2();
        if (sum % 2 != 0) continue;
        const int l3 = sum / 2;
        if (l3 < 1 || l3 > k) continue;
        SharpClass cls = idx.q2() == 0 ? SharpClass::first_only
                         : idx.q1() == 0 ? SharpClass::second_only
                                         : SharpClass::both;
        s.sharp.push_back({idx, l3, cls});
      }
    }
  }
  return s;
}

double rho_envelope_constant(HurstParam h) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(h.value());
  if (it != cache.end()) return it->second;
  double best = 0.0;
  for (std::int64_t j = 10; j <= 1000; ++j) {
    best = std::max(best, std::abs(rho_hat(j, h)) * std::pow(static_cast<double>(j), alpha(h)));
  }
  cache[h.value()] = 2.0 * best;
  return 2.0 * best;
}

TruncatedSum rho_power_sum(int exponent, HurstParam h, double tol) {
  if (exponent < 1) throw std::invalid_argument("rho_power_sum needs exponent >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("rho_power_sum needs tol > 0");
  const std::int64_t r = radius_for(exponent, h, tol, kMaxSingleRadius);
  PlainSum s = power_sum_abs(exponent, h, tol, false);
  return {s.value, s.tail, r, "sum rho^" + std::to_string(exponent)};
}

TruncatedSum rho_double_sum(int m, int q1, int q2, HurstParam h, double tol) {
  if (m < 0 || q1 < 0 || q2 < 0) throw std::invalid_argument("rho_double_sum exponents must be nonnegative");
  if (q1 + q2 == 0) throw std::invalid_argument("rho_double_sum diverges when q1 = q2 = 0");
  if (!(tol > 0.0)) throw std::invalid_argument("rho_double_sum needs tol > 0");
  const std::string label =
      "sum rho(i1)^" + std::to_string(m + 1) + " rho(i2)^" + std::to_string(q1) + " rho(i2-i1)^" + std::to_string(q2);
  if (q1 == 0 || q2 == 0) {
    const int e = q1 == 0 ? q2 : q1;
    TruncatedSum a = rho_power_sum(m + 1, h, tol / 4);
    TruncatedSum b = rho_power_sum(e, h, tol / 4);
    double tail = a.tail_bound * std::abs(b.value) + std::abs(a.value) * b.tail_bound + a.tail_bound * b.tail_bound;
    return {a.value * b.value, tail, std::max(a.radius, b.radius), label};
  }
  const int e1 = m + 1, e2 = q1, e3 = q2;
  const double c0v = c0(h);
  PlainSum abs3 = power_sum_abs(e3, h, tol / 8, true);
  const double s3 = abs3.value + abs3.tail;
  auto tail_at = [&](std::int64_t r) {
    return tail_bound(e1, r, h) * std::pow(c0v, e2) * s3 + tail_bound(e2, r, h) * std::pow(c0v, e1) * s3;
  };
  std::int64_t r = kStartRadius;
  while (tail_at(r) >= tol && r < kMaxDoubleRadius) r *= 2;
  auto table = rho_table(h, 2 * r);
  auto rho = [&](std::int64_t i) { return (*table)[static_cast<std::size_t>(i < 0 ? -i : i)]; };
  // g(i1) = sum_{|i2|<=r} rho(i2)^{q1} rho(i2-i1)^{q2}: cross-correlation of
  // b on [-r, r] with c on [-2r, 2r], padded to a common odd length.
  const std::int64_t len = 4 * r + 1;
  std::vector<double> b(static_cast<std::size_t>(len), 0.0), c(static_cast<std::size_t>(len), 0.0);
  for (std::int64_t i = -2 * r; i <= 2 * r; ++i) {
    const auto idx = static_cast<std::size_t>(i + 2 * r);
    c[idx] = std::pow(rho(i), e3);
    if (i >= -r && i <= r) b[idx] = std::pow(rho(i), e2);
  }
  // corr(d) = sum_t c(t) b(t + d) = sum_{i2} b(i2) c(i2 - d)
  std::vector<double> corr = detail::correlate_centered(c, b);
  const std::int64_t zero = len - 1;
  double total = 0.0;
  for (std::int64_t i1 = -r; i1 <= r; ++i1) {
    total += std::pow(rho(i1), e1) * corr[static_cast<std::size_t>(zero + i1)];
  }
  return {total, tail_at(r), r, label};
}

LimitConstant c_g_infinity(int k, HurstParam h, double tol) {
  if (k < 1) throw std::invalid_argument("c_g_infinity needs k >= 1");
  LimitConstant out;
  for (int l = 1; l <= k; ++l) {
    ScaledInteger mu_l = mu_parts(k, l);
    std::int64_t coef = checked_mul(checked_mul(2 * l, checked_mul(mu_l.integer, mu_l.integer)),
                                    product_formula_coeff(2 * l - 1, 2 * l - 1, 2 * l - 1));
    double weight = static_cast<double>(coef) * std::pow(c0(h), 2 * mu_l.c0_power);
    TruncatedSum s = rho_power_sum(2 * l, h, tol / k);
    out.value += weight * s.value;
    out.tail_bound += std::abs(weight) * s.tail_bound;
    out.sums.push_back(s);
  }
  return out;
}

ScaledInteger lambda_coefficient(const LambdaIndex& idx, int k) {
  ScaledInteger u1 = mu_parts(k, idx.l1), u2 = mu_parts(k, idx.l2);
  std::int64_t v = checked_mul(2 * idx.l1, checked_mul(u1.integer, u2.integer));
  v = checked_mul(v, product_formula_coeff(2 * idx.l1 - 1, 2 * idx.l2 - 1, idx.m));
  return {v, u1.c0_power + u2.c0_power};
}

ScaledInteger sharp_coefficient(const SharpIndex& idx, int k) {
  const int q1 = idx.base.q1(), q2 = idx.base.q2();
  if (2 * idx.l3 != q1 + q2) throw std::invalid_argument("sharp index violates 2 l3 = q1 + q2");
  const int c = 2 * idx.l3 - 1;
  std::int64_t mixed = 0;
  if (q1 > 0) {
    auto table = mixed_contraction_coeffs(q1 - 1, q2, c);
    mixed = checked_add(mixed, checked_mul(q1, table.at({q1 - 1, q2})));
  }
  if (q2 > 0) {
    auto table = mixed_contraction_coeffs(q1, q2 - 1, c);
    mixed = checked_add(mixed, checked_mul(q2, table.at({q1, q2 - 1})));
  }
  ScaledInteger lc = lambda_coefficient(idx.base, k);
  ScaledInteger u3 = mu_parts(k, idx.l3);
  return {checked_mul(checked_mul(lc.integer, u3.integer), mixed), lc.c0_power + u3.c0_power};
}

LimitConstant c_tau(int k, HurstParam h, double tol) {
  if (k < 1) throw std::invalid_argument("c_tau needs k >= 1");
  validate_contraction_tables(k);
  LimitConstant out;
  const auto sets = lambda_sets(k);
  const double per = tol / static_cast<double>(std::max<std::size_t>(1, sets.sharp.size()));
  for (const auto& s : sets.sharp) {
    const double w = sharp_coefficient(s, k).value(h);
    TruncatedSum t = rho_double_sum(s.base.m, s.base.q1(), s.base.q2(), h, per / std::max(1.0, std::abs(w)));
    out.value += w * t.value;
    out.tail_bound += std::abs(w) * t.tail_bound;
    out.sums.push_back(t);
  }
  return out;
}

void validate_contraction_tables(int k) {
  static std::mutex mutex;
  static std::set<int> done;
  std::lock_guard lock(mutex);
  if (done.count(k)) return;
  std::set<std::tuple<int, int, int>> needed;
  for (const auto& s : lambda_sets(k).sharp) {
    const int q1 = s.base.q1(), q2 = s.base.q2(), c = 2 * s.l3 - 1;
    if (q1 > 0) needed.insert({q1 - 1, q2, c});
    if (q2 > 0) needed.insert({q1, q2 - 1, c});
  }
  for (auto [a1, a2, c] : needed) {
    auto symbolic = mixed_contraction_coeffs(a1, a2, c);
    auto oracle = extract_mixed_coefficients(a1, a2, c);
    for (const auto& [pattern, value] : symbolic) {
      auto it = oracle.find({pattern.pi1, pattern.pi2});
      if (it == oracle.end() || std::llround(it->second) != value || std::abs(it->second - value) > 1e-3) {
        throw std::logic_error("mixed contraction coefficient (" + std::to_string(a1) + "," + std::to_string(a2) + "," +
                               std::to_string(c) + ") pattern (" + std::to_string(pattern.pi1) + "," +
                               std::to_string(pattern.pi2) + ") disagrees with the Wick oracle");
      }
    }
    if (oracle.size() != symbolic.size()) throw std::logic_error("mixed contraction pattern sets differ");
  }
  done.insert(k);
}

}  // namespace fpv
