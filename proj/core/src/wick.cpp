#include "fpv/wick.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fpv {

namespace {

void check_order(int order, const char* what) {
  if (order > kWickOrderCap) {
    throw std::length_error(std::string(what) + ": total order " + std::to_string(order) + " exceeds the cap of " +
                            std::to_string(kWickOrderCap) + "; use the symbolic product formula instead");
  }
}

// Mixed radix index over all sub-multi-indices of a multiplicity vector.
struct MultiIndex {
  std::vector<int> dims;
  std::vector<std::size_t> strides;
  std::size_t total = 1;

  explicit MultiIndex(const std::vector<int>& alpha) : dims(alpha.size()), strides(alpha.size()) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      dims[i] = alpha[i] + 1;
      strides[i] = total;
      total *= static_cast<std::size_t>(dims[i]);
    }
  }
  std::size_t encode(const std::vector<int>& beta) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < beta.size(); ++i) k += static_cast<std::size_t>(beta[i]) * strides[i];
    return k;
  }
};

// W(b) = x_i W(b - e_i) - sum_j (b - e_i)_j G_ij W(b - e_i - e_j), i the first
// nonzero slot. `mul` multiplies a value by generator i, `axpy` accumulates.
template <class V, class Mul>
V wick_recursion(const std::vector<int>& alpha, const GramContext& ctx, V one, Mul mul) {
  MultiIndex mi(alpha);
  std::vector<V> memo(mi.total);
  std::vector<char> have(mi.total, 0);
  auto rec = [&](auto&& self, std::vector<int>& beta) -> const V& {
    const std::size_t key = mi.encode(beta);
    if (have[key]) return memo[key];
    auto first = std::find_if(beta.begin(), beta.end(), [](int v) { return v > 0; });
    if (first == beta.end()) {
      memo[key] = one;
      have[key] = 1;
      return memo[key];
    }
    const std::size_t i = static_cast<std::size_t>(first - beta.begin());
    --beta[i];
    V value = mul(self(self, beta), i);
    for (std::size_t j = 0; j < beta.size(); ++j) {
      if (beta[j] == 0) continue;
      const double w = beta[j] * ctx(i, j);
      if (w == 0.0) continue;
      --beta[j];
      V sub = self(self, beta);
      ++beta[j];
      value = V::axpy(std::move(value), -w, sub);
    }
    ++beta[i];
    memo[key] = std::move(value);
    have[key] = 1;
    return memo[key];
  };
  std::vector<int> beta = alpha;
  return rec(rec, beta);
}

struct Scalar {
  double v = 0.0;
  static Scalar axpy(Scalar acc, double w, const Scalar& x) { return {acc.v + w * x.v}; }
};

struct Poly {
  Polynomial p;
  static Poly axpy(Poly acc, double w, const Poly& x) {
    for (const auto& [mono, c] : x.p) {
      double& slot = acc.p[mono];
      slot += w * c;
    }
    return acc;
  }
};

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      std::vector<int> m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out[m] += ca * cb;
    }
  }
  return out;
}

double matching_sum(const GramContext& ctx, std::vector<std::size_t>& items, std::size_t count) {
  if (count == 0) return 1.0;
  // pair the last open factor with each remaining one
  const std::size_t a = items[count - 1];
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double g = ctx(a, items[k]);
    if (g == 0.0) continue;
    std::swap(items[k], items[count - 2]);
    total += g * matching_sum(ctx, items, count - 2);
    std::swap(items[k], items[count - 2]);
  }
  return total;
}

double product_value(const GramContext& ctx, std::span<const ChaosTerm> product, std::span<const double> x) {
  double v = 1.0;
  for (const auto& t : product) v *= chaos_evaluate(t, ctx, x);
  return v;
}

void check_term(const ChaosTerm& t, const GramContext& ctx) {
  if (t.multiplicity.size() != ctx.size()) throw std::invalid_argument("chaos term does not match the Gram context");
  for (int m : t.multiplicity)
    if (m < 0) throw std::invalid_argument("negative multiplicity in chaos term");
}

}  // namespace

GramContext::GramContext(std::vector<std::string> names, std::vector<double> gram)
    : names_(std::move(names)), gram_(std::move(gram)) {
  const std::size_t n = names_.size();
  if (n == 0 || gram_.size() != n * n) throw std::invalid_argument("Gram matrix size does not match generator count");
  Eigen::MatrixXd g(n, n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      g(i, j) = gram_[i * n + j];
      if (!std::isfinite(g(i, j))) throw std::invalid_argument("Gram matrix entry is not finite");
      scale = std::max(scale, std::abs(g(i, j)));
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(g(i, j) - g(j, i)) > 1e-12 * std::max(1.0, scale)) throw std::invalid_argument("Gram matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, scale)) {
    throw std::invalid_argument("Gram matrix is not positive semidefinite");
  }
  Eigen::MatrixXd root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  root_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) root_[i * n + j] = root(i, j);
}

GramContext GramContext::from_step_functions(std::vector<std::string> names, const std::vector<StepFunction>& fns,
                                             HurstParam h) {
  const std::size_t n = fns.size();
  std::vector<double> g(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) g[i * n + j] = g[j * n + i] = inner_product_steps(fns[i], fns[j], h);
  return GramContext(std::move(names), std::move(g));
}

std::size_t GramContext::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("unknown generator '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> GramContext::sample(NormalStream& rng) const {
  const std::size_t n = size();
  std::vector<double> z(n), x(n, 0.0);
  rng.fill(z);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) x[i] += root_[i * n + j] * z[j];
  return x;
}

int ChaosTerm::order() const noexcept { return std::accumulate(multiplicity.begin(), multiplicity.end(), 0); }

ChaosTerm ChaosTerm::single(std::size_t generators, std::size_t g, int p) {
  ChaosTerm t{std::vector<int>(generators, 0)};
  t.multiplicity.at(g) = p;
  return t;
}

ChaosTerm ChaosTerm::from(std::size_t generators, std::initializer_list<std::pair<std::size_t, int>> parts) {
  ChaosTerm t{std::vector<int>(generators, 0)};
  for (auto [g, p] : parts) t.multiplicity.at(g) += p;
  return t;
}

double isserlis_moment(const GramContext& ctx, std::span<const int> powers) {
  if (powers.size() != ctx.size()) throw std::invalid_argument("isserlis_moment: powers do not match the context");
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] < 0) throw std::invalid_argument("isserlis_moment: negative power");
    for (int k = 0; k < powers[i]; ++k) items.push_back(i);
  }
  check_order(static_cast<int>(items.size()), "isserlis_moment");
  if (items.size() % 2 != 0) return 0.0;
  return matching_sum(ctx, items, items.size());
}

double wick_power(double x, double variance, int p) {
  if (p < 0) throw std::invalid_argument("wick_power: negative order");
  if (p == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < p; ++k) {
    double next = x * cur - k * variance * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double chaos_evaluate(const ChaosTerm& term, const GramContext& ctx, std::span<const double> sample) {
  check_term(term, ctx);
  if (sample.size() != ctx.size()) throw std::invalid_argument("chaos_evaluate: sample dimension mismatch");
  return wick_recursion<Scalar>(term.multiplicity, ctx, Scalar{1.0},
                                [&](const Scalar& s, std::size_t i) { return Scalar{s.v * sample[i]}; })
      .v;
}

Polynomial wick_polynomial(const ChaosTerm& term, const GramContext& ctx) {
  check_term(term, ctx);
  Poly one{{{std::vector<int>(ctx.size(), 0), 1.0}}};
  return wick_recursion<Poly>(term.multiplicity, ctx, one,
                              [](const Poly& q, std::size_t i) {
                                Poly out;
                                for (const auto& [mono, c] : q.p) {
                                  auto m = mono;
                                  ++m[i];
                                  out.p[m] += c;
                                }
                                return out;
                              })
      .p;
}

double chaos_expectation_product(std::span<const ChaosTerm> terms, const GramContext& ctx) {
  int total = 0;
  for (const auto& t : terms) {
    check_term(t, ctx);
    total += t.order();
  }
  check_order(total, "chaos_expectation_product");
  Polynomial acc{{std::vector<int>(ctx.size(), 0), 1.0}};
  for (const auto& t : terms) acc = multiply(acc, wick_polynomial(t, ctx));
  double e = 0.0;
  for (const auto& [mono, c] : acc) {
    if (c == 0.0) continue;
    e += c * isserlis_moment(ctx, mono);
  }
  return e;
}

CoefficientFit fit_coefficients_by_sampling(const GramContext& ctx, std::span<const ChaosTerm> product,
                                            std::span<const BasisTerm> basis, std::uint64_t seed, std::size_t samples) {
  const std::size_t p = basis.size();
  if (p == 0) throw std::invalid_argument("empty basis");
  if (samples == 0) samples = 4 * p + 40;
  Eigen::MatrixXd a(samples, p);
  Eigen::VectorXd y(samples);
  NormalStream rng(substream_seed(seed, 0, StreamTag::oracle));
  for (std::size_t s = 0; s < samples; ++s) {
    auto x = ctx.sample(rng);
    y[s] = product_value(ctx, product, x);
    for (std::size_t k = 0; k < p; ++k) a(s, k) = basis[k].weight * chaos_evaluate(basis[k].term, ctx, x);
  }
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (std::size_t k = 0; k < p; ++k) {
    if (scale[k] == 0.0) throw std::invalid_argument("basis term vanishes on every sample");
    a.col(k) /= scale[k];
  }
  Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  CoefficientFit fit;
  fit.coefficients.resize(p);
  for (std::size_t k = 0; k < p; ++k) fit.coefficients[k] = c[k] / scale[k];
  const double ymax = std::max(1e-300, y.cwiseAbs().maxCoeff());
  fit.max_residual = (a * c - y).cwiseAbs().maxCoeff() / ymax;
  return fit;
}

std::vector<double> project_coefficients(const GramContext& ctx, std::span<const ChaosTerm> product,
                                         std::span<const BasisTerm> basis) {
  const std::size_t p = basis.size();
  Eigen::MatrixXd m(p, p);
  Eigen::VectorXd b(p);
  for (std::size_t r = 0; r < p; ++r) {
    std::vector<ChaosTerm> terms(product.begin(), product.end());
    terms.push_back(basis[r].term);
    b[r] = basis[r].weight * chaos_expectation_product(terms, ctx);
    for (std::size_t s = 0; s <= r; ++s) {
      const ChaosTerm pair[] = {basis[r].term, basis[s].term};
      m(r, s) = m(s, r) = basis[r].weight * basis[s].weight * chaos_expectation_product(pair, ctx);
    }
  }
  Eigen::VectorXd c = m.colPivHouseholderQr().solve(b);
  return {c.data(), c.data() + p};
}

std::vector<double> extract_product_coefficients(int p, int q, std::uint64_t seed) {
  GramContext ctx({"f", "g"}, {1.0, 0.35, 0.35, 0.7});
  const ChaosTerm product[] = {ChaosTerm::single(2, 0, p), ChaosTerm::single(2, 1, q)};
  std::vector<BasisTerm> basis;
  for (int r = 0; r <= std::min(p, q); ++r) {
    basis.push_back({ChaosTerm::from(2, {{0, p - r}, {1, q - r}}), std::pow(ctx(0, 1), r)});
  }
  return fit_coefficients_by_sampling(ctx, product, basis, seed).coefficients;
}

GramContext reference_context_3() {
  return GramContext({"f1", "f2", "g"}, {1.0, 0.3, 0.45, 0.3, 0.8, -0.25, 0.45, -0.25, 1.2});
}

std::map<std::pair<int, int>, double> extract_mixed_coefficients(int a1, int a2, int c, std::uint64_t seed) {
  GramContext ctx = reference_context_3();
  const ChaosTerm product[] = {ChaosTerm::from(3, {{0, a1}, {1, a2}}), ChaosTerm::single(3, 2, c)};
  std::vector<BasisTerm> basis;
  std::vector<std::pair<int, int>> keys;
  for (int p1 = 0; p1 <= a1; ++p1)
    for (int p2 = 0; p2 <= a2 && p1 + p2 <= c; ++p2) {
      basis.push_back({ChaosTerm::from(3, {{0, a1 - p1}, {1, a2 - p2}, {2, c - p1 - p2}}),
                       std::pow(ctx(0, 2), p1) * std::pow(ctx(1, 2), p2)});
      keys.emplace_back(p1, p2);
    }
  auto fit = fit_coefficients_by_sampling(ctx, product, basis, seed);
  std::map<std::pair<int, int>, double> out;
  for (std::size_t i = 0; i < keys.size(); ++i) out[keys[i]] = fit.coefficients[i];
  return out;
}

bool WickCheckReport::pass() const {
  return !items.empty() && std::all_of(items.begin(), items.end(), [](const auto& i) { return i.pass; });
}

}  // namespace fpv
