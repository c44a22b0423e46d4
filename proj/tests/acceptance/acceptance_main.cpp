// Acceptance suite: one [PASS]/[FAIL] line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fpv/combinatorics.hpp"
#include "fpv/expansion.hpp"
#include "fpv/exponent.hpp"
#include "fpv/fbm.hpp"
#include "fpv/kernel.hpp"
#include "fpv/parallel.hpp"
#include "fpv/random.hpp"
#include "fpv/sde.hpp"
#include "fpv/stats.hpp"
#include "fpv/variation.hpp"
#include "fpv/wick.hpp"

using namespace fpv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double slope_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return least_squares_line(lx, ly).slope;
}

// sum_{j1,j2 in [n-1]} g(rho(j2 - j1))
double toeplitz_sum(std::int64_t n, HurstParam h, const std::function<double(double)>& g) {
  double s = 0.0;
  for (std::int64_t d = -(n - 2); d <= n - 2; ++d) s += static_cast<double>(n - 1 - std::abs(d)) * g(rho_hat(d, h));
  return s;
}

Outcome kernel_identities() {
  const std::int64_t ns[] = {4, 16, 64, 256, 1024};
  const double hs[] = {0.55, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95};
  double worst = 0.0, worst0 = 0.0;
  for (double hv : hs) {
    HurstParam h(hv);
    worst0 = std::max(worst0, std::abs(rho_hat(0, h) - (4.0 - std::pow(2.0, 2 * hv))));
    for (std::int64_t n : ns) {
      const double scale = std::pow(static_cast<double>(n), -2 * hv);
      std::vector<StepFunction> d;
      for (std::int64_t j = 1; j < n; ++j) d.push_back(StepFunction::second_difference(j, n));
      const auto rho = rho_hat_table(n, h);
      for (std::int64_t a = 1; a < n; ++a)
        for (std::int64_t b = a; b < n; ++b) {
          const double ip = inner_product_steps(d[a - 1], d[b - 1], h);
          const double ref = scale * rho[b - a];
          worst = std::max(worst, std::abs(ip - ref) / std::abs(ref));
        }
    }
  }
  return {worst < 1e-12 && worst0 < 1e-14, fmt("max rel dev %.2e, |rho(0)-c0| %.2e", worst, worst0)};
}

Outcome rho_decay() {
  bool ok = true;
  std::string d;
  for (double hv : {0.55, 0.7, 0.9, 0.95}) {
    HurstParam h(hv);
    std::vector<double> v;
    for (std::int64_t j : {1000, 10000, 100000}) v.push_back(std::abs(rho_hat(j, h)) * std::pow(double(j), 4 - 2 * hv));
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double spread = (*hi - *lo) / *lo;
    ok = ok && spread < 0.10;
    d += fmt("H=%.2f spread %.2e; ", hv, spread);
  }
  return {ok, d};
}

Outcome fbm_sampler() {
  const std::size_t n = 256, m = 20000;
  const double hv = 0.7;
  HurstParam h(hv);
  std::vector<double> acc(n * n, 0.0);
  std::vector<double> b1_chol(m), b1_circ(m);
  for (std::size_t s = 0; s < m; ++s) {
    auto p = path_from_increments(sample_fgn(n, hv, substream_seed(31, s), FgnMethod::cholesky));
    b1_chol[s] = p[n];
    for (std::size_t i = 0; i < n; ++i) {
      const double x = p[i + 1];
      double* row = &acc[i * n];
      for (std::size_t j = i; j < n; ++j) row[j] += x * p[j + 1];
    }
    b1_circ[s] = path_from_increments(sample_fgn(n, hv, substream_seed(32, s), FgnMethod::circulant))[n];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double ti = double(i + 1) / n, tj = double(j + 1) / n;
      const double sij = fbm_covariance(ti, tj, h);
      const double se = std::sqrt((fbm_covariance(ti, ti, h) * fbm_covariance(tj, tj, h) + sij * sij) / m);
      worst = std::max(worst, std::abs(acc[i * n + j] / m - sij) / se);
    }
  const auto ks = ks_two_sample(b1_chol, b1_circ);
  return {worst < 5.0 && ks.p_value > 0.01, fmt("max |cov err|/SE %.2f, KS p %.3f", worst, ks.p_value)};
}

Outcome wick_agreement() {
  auto rep = run_wick_suite({});
  std::size_t failed = 0;
  std::string first;
  for (const auto& i : rep.items)
    if (!i.pass) {
      if (!failed) first = i.name;
      ++failed;
    }
  return {rep.pass() && failed == 0,
          fmt("%zu checks, %zu failed%s%s", rep.items.size(), failed, failed ? ", first: " : "", first.c_str())};
}

Outcome exact_mean() {
  bool ok = true;
  std::string d;
  const double sigma = 1.0;
  double worst = 0.0;
  for (double hv : {0.6, 0.8}) {
    HurstParam h(hv);
    for (std::int64_t n : {8, 32}) {
      std::vector<StepFunction> fns;
      std::vector<std::string> names;
      for (std::int64_t j = 1; j < n; ++j) {
        fns.push_back(StepFunction::second_difference(j, n));
        names.push_back("d" + std::to_string(j));
      }
      auto ctx = GramContext::from_step_functions(names, fns, h);
      for (int k : {1, 2}) {
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(n); ++j) {
          std::vector<int> pw(n - 1, 0);
          pw[j] = 2 * k;
          s += isserlis_moment(ctx, pw);
        }
        const double oracle = std::pow(double(n), 2 * k * hv - 1) * std::pow(sigma, 2 * k) * s;
        const double closed = (1.0 - 1.0 / n) * mu(k, 0, h) * std::pow(sigma, 2 * k);
        worst = std::max(worst, std::abs(oracle - closed) / closed);
      }
    }
  }
  ok = worst < 1e-10;
  d += fmt("wick rel dev %.2e; ", worst);
  // Monte Carlo at n = 1024
  const std::size_t n = 1024, m = 100000;
  const double hv = 0.7;
  HurstParam h(hv);
  auto model = model_registry().make("additive", {{"sigma", sigma}});
  auto samples = parallel_map(m, [&](std::size_t i) {
    auto p = simulate_path(model, n, 1, hv, substream_seed(51, i));
    return std::pair{weighted_power_variation(p.X, *model, 1, h), weighted_power_variation(p.X, *model, 2, h)};
  });
  for (int k : {1, 2}) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = k == 1 ? samples[i].first : samples[i].second;
    const double mc = mean(v), se = std::sqrt(sample_variance(v) / m);
    const double closed = (1.0 - 1.0 / n) * mu(k, 0, h) * std::pow(sigma, 2 * k);
    const double z = (mc - closed) / se;
    ok = ok && std::abs(z) < 3.0;
    d += fmt("k=%d MC z-score %.2f; ", k, z);
  }
  return {ok, d};
}

Outcome cg_oracle() {
  bool ok = true;
  std::string d;
  const std::int64_t n = 4096;
  for (double hv : {0.6, 0.75, 0.9}) {
    HurstParam h(hv);
    const double finite = 2.0 / n * toeplitz_sum(n, h, [](double r) { return r * r; });
    const double c = c_g_infinity(1, h).value;
    const double rel = std::abs(c - finite) / c;
    ok = ok && rel < (hv == 0.9 ? 0.05 : 0.02);
    d += fmt("H=%.2f rel %.2e; ", hv, rel);
  }
  return {ok, d};
}

Outcome ctau_oracle() {
  bool ok = true;
  std::string d;
  const std::int64_t n = 4096;
  for (double hv : {0.6, 0.75}) {
    HurstParam h(hv);
    // sum over j1, j2, j3 in [n-1], grouped by the offsets d = j2 - j1, e = j3 - j1
    const std::int64_t lim = n - 2;
    std::vector<double> r(2 * lim + 1);
    for (std::int64_t i = 0; i <= 2 * lim; ++i) r[i] = rho_hat(i, h);
    auto rho = [&](std::int64_t i) { return r[static_cast<std::size_t>(std::abs(i))]; };
    double total = 0.0;
    for (std::int64_t a = -lim; a <= lim; ++a) {
      double inner = 0.0;
      for (std::int64_t b = -lim; b <= lim; ++b) {
        const std::int64_t span = std::max({std::int64_t{0}, a, b}) - std::min({std::int64_t{0}, a, b});
        if (span > lim) continue;
        inner += rho(b) * rho(b - a) * static_cast<double>(lim + 1 - span);
      }
      total += rho(a) * inner;
    }
    const double finite = 4.0 * total / n;
    const double c = c_tau(1, h).value;
    const double rel = std::abs(c - finite) / std::abs(c);
    ok = ok && rel < 0.02;
    d += fmt("H=%.2f rel %.2e; ", hv, rel);
  }
  return {ok, d};
}

Outcome order_verification() {
  std::vector<std::size_t> grid;
  for (std::size_t n = 64; n <= 4096; n *= 2) grid.push_back(n);
  bool ok = true;
  std::string d;
  for (double hv : {0.6, 0.75}) {
    auto reps = verify_orders(default_catalog(), HurstParam(hv), grid, 2000, 81);
    double worst = -1e9;
    std::string worst_id;
    for (const auto& r : reps) {
      const double margin = r.slope - r.predicted;
      if (margin > worst) {
        worst = margin;
        worst_id = r.functional;
      }
      ok = ok && r.pass;
      if (r.functional == "G_1_1_0") {
        const bool in = r.slope >= -0.62 && r.slope <= -0.40;
        ok = ok && in;
        d += fmt("H=%.2f G_1_1_0 slope %.3f [%.3f,%.3f]; ", hv, r.slope, r.ci_lo, r.ci_hi);
      }
    }
    d += fmt("max slope-predicted %.3f (%s); ", worst, worst_id.c_str());
  }
  return {ok, d};
}

Outcome residual_scaling() {
  const double hv = 0.7;
  HurstParam h(hv);
  auto model = model_registry().make("bounded-tanh");
  std::vector<double> ns, norms;
  for (std::size_t n = 64; n <= 2048; n *= 2) {
    const std::size_t paths = 200;
    auto sq = parallel_map(paths, [&](std::size_t i) {
      auto p = simulate_path(model, n, 8, hv, substream_seed(91, i + 1000 * n));
      auto x = p.coarse_x(), b = p.coarse_b();
      auto dx = second_difference(x), db = second_difference(b);
      double s = 0.0;
      for (std::size_t j = 0; j < dx.size(); ++j) {
        const double r = dx[j] - model->v1(x[j + 1]) * db[j];
        s += r * r;
      }
      return s / static_cast<double>(dx.size());
    });
    double tot = 0.0;
    for (double v : sq) tot += v;
    ns.push_back(double(n));
    norms.push_back(std::sqrt(tot / paths));
  }
  const double s = slope_loglog(ns, norms);
  return {std::abs(s + 2 * hv) <= 0.1, fmt("slope %.3f, target %.2f", s, -2 * hv)};
}

Outcome riemann_rate() {
  const double hv = 0.7;
  auto model = model_registry().make("bounded-tanh-lorentz");
  const std::size_t fine = std::size_t{1} << 16, paths = 300;
  const std::vector<std::size_t> ms{64, 128, 256, 512, 1024, 2048, 4096};
  auto errs = parallel_map(paths, [&](std::size_t i) {
    auto p = simulate_path(model, fine, 1, hv, substream_seed(101, i));
    std::vector<double> g(p.X.size());
    for (std::size_t t = 0; t < g.size(); ++t) g[t] = model->f(p.X[t]);
    const double ref = trapezoid(g);
    std::vector<double> e;
    for (std::size_t m : ms) {
      std::vector<double> sub;
      for (std::size_t t = 0; t <= fine; t += fine / m) sub.push_back(g[t]);
      e.push_back(std::abs(left_riemann(sub) - ref));
    }
    return e;
  });
  std::vector<double> xs, l1;
  for (std::size_t k = 0; k < ms.size(); ++k) {
    double s = 0.0;
    for (const auto& e : errs) s += e[k];
    xs.push_back(double(ms[k]));
    l1.push_back(s / paths);
  }
  const double s = slope_loglog(xs, l1);
  return {s <= -0.9, fmt("slope %.3f", s)};
}

struct ExpansionSetup {
  std::size_t n = 128;
  ExpansionEnsemble ensemble;
  std::vector<DensityRow> rows;
};

const ExpansionSetup& expansion_setup() {
  static std::optional<ExpansionSetup> s;
  if (!s) {
    s.emplace();
    auto model = model_registry().make("bounded-tanh");
    s->ensemble = build_expansion_ensemble(model, 1, HurstParam(0.7), s->n, 64, 10000, 2024);
    s->rows = evaluate_density_grid(s->ensemble, s->n, z_grid(s->ensemble));
  }
  return *s;
}

Outcome density_well_formed() {
  const auto& s = expansion_setup();
  const auto& rows = s.rows;
  double integral = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    integral += 0.5 * (rows[i].p_corrected + rows[i - 1].p_corrected) * (rows[i].z - rows[i - 1].z);
  const double step = 1e-3 * s.ensemble.effective_std();
  auto diffs = parallel_map(rows.size(), [&](std::size_t i) {
    const double z = rows[i].z;
    const double deriv = (expansion_cdf(z + step, s.ensemble, s.n) - expansion_cdf(z - step, s.ensemble, s.n)) / (2 * step);
    return std::abs(deriv - rows[i].p_corrected);
  });
  const double sup = *std::max_element(diffs.begin(), diffs.end());
  const std::size_t dips = count_decreasing_steps(rows);
  return {std::abs(integral - 1.0) < 1e-3 && sup < 1e-4,
          fmt("|int p_n - 1| %.2e, sup|F'-p| %.2e, decreasing F steps %zu", std::abs(integral - 1.0), sup, dips)};
}

Outcome expansion_improvement() {
  const auto& s = expansion_setup();
  const double hv = 0.7;
  HurstParam h(hv);
  auto model = model_registry().make("bounded-tanh");
  const std::size_t m = 100000;
  auto z = parallel_map(m, [&](std::size_t i) {
    auto p = simulate_path(model, s.n, 64, hv, substream_seed(7, i, StreamTag::fgn));
    return evaluate_variation(p, 1, h).z_n;
  });
  std::sort(z.begin(), z.end());
  std::vector<double> zs, fb, fc;
  for (const auto& r : s.rows) {
    zs.push_back(r.z);
    fb.push_back(r.f_baseline);
    fc.push_back(r.f_corrected);
  }
  PiecewiseLinear base(zs, fb), corr(zs, fc);
  std::vector<double> at_b(m), at_c(m);
  for (std::size_t i = 0; i < m; ++i) {
    at_b[i] = base(z[i]);
    at_c[i] = corr(z[i]);
  }
  const double ks_b = ks_statistic_sorted(z, at_b), ks_c = ks_statistic_sorted(z, at_c);
  auto ci = bootstrap_ks_difference(z, at_c, at_b, 1000, 77);
  return {ks_c < ks_b && ci.hi < 0.0,
          fmt("KS baseline %.5f, corrected %.5f, diff %.5f CI [%.5f, %.5f]", ks_b, ks_c, ci.estimate, ci.lo, ci.hi)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"kernel identities", kernel_identities},
      {"rho decay", rho_decay},
      {"fbm sampler covariance and KS", fbm_sampler},
      {"wick oracle agreement", wick_agreement},
      {"exact mean identity", exact_mean},
      {"C_G_infinity finite-n oracle", cg_oracle},
      {"C_tau finite-n oracle", ctau_oracle},
      {"order verification", order_verification},
      {"residual scaling", residual_scaling},
      {"riemann sum rate", riemann_rate},
      {"density well-formedness", density_well_formed},
      {"expansion improvement", expansion_improvement},
  };
  int failed = 0, idx = 0;
  for (const auto& c : criteria) {
    ++idx;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", idx, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", idx - failed, idx);
  return failed == 0 ? 0 : 1;
}
