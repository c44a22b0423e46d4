#include "fpv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fpv/random.hpp"

namespace fpv {

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("variance needs two samples");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs matching inputs of size >= 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double ks_statistic_sorted(std::span<const double> sorted, std::span<const double> cdf) {
  if (sorted.size() != cdf.size() || sorted.empty()) throw std::invalid_argument("ks statistic size mismatch");
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    d = std::max(d, std::abs(static_cast<double>(i + 1) / m - cdf[i]));
    d = std::max(d, std::abs(static_cast<double>(i) / m - cdf[i]));
  }
  return d;
}

TwoSampleKs ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two-sample KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, kolmogorov_survival(lambda)};
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size() || xs_.size() < 2) throw std::invalid_argument("interpolation needs >= 2 matching points");
  for (std::size_t i = 1; i < xs_.size(); ++i)
    if (!(xs_[i] > xs_[i - 1])) throw std::invalid_argument("interpolation abscissae must increase");
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
  return ys_[lo] + t * (ys_[hi] - ys_[lo]);
}

BootstrapInterval bootstrap_ks_difference(std::span<const double> sorted, std::span<const double> fa,
                                          std::span<const double> fb, std::size_t resamples, std::uint64_t seed,
                                          double level) {
  const std::size_t m = sorted.size();
  if (fa.size() != m || fb.size() != m || m == 0) throw std::invalid_argument("bootstrap size mismatch");
  if (resamples < 1) throw std::invalid_argument("bootstrap needs at least one resample");
  BootstrapInterval out;
  out.estimate = ks_statistic_sorted(sorted, fa) - ks_statistic_sorted(sorted, fb);
  std::vector<double> diffs(resamples);
  std::vector<std::uint32_t> counts(m);
  const double mm = static_cast<double>(m);
  for (std::size_t b = 0; b < resamples; ++b) {
    std::mt19937_64 rng(substream_seed(seed, b, StreamTag::bootstrap));
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::size_t i = 0; i < m; ++i) ++counts[pick(rng)];
    double da = 0.0, db = 0.0;
    std::size_t cum = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (counts[i] == 0) continue;
      const double before = static_cast<double>(cum) / mm;
      cum += counts[i];
      const double after = static_cast<double>(cum) / mm;
      da = std::max({da, std::abs(after - fa[i]), std::abs(before - fa[i])});
      db = std::max({db, std::abs(after - fb[i]), std::abs(before - fb[i])});
    }
    diffs[b] = da - db;
  }
  const double tail = 0.5 * (1.0 - level);
  out.lo = quantile(diffs, tail);
  out.hi = quantile(diffs, 1.0 - tail);
  return out;
}

}  // namespace fpv
