#include "fpv/fbm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iostream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

#include "fft.hpp"

namespace fpv {

namespace {

constexpr double kNegativeTolerance = 1e-9;

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated increment dump");
  return v;
}

}  // namespace

const char* to_string(FgnMethod m) { return m == FgnMethod::cholesky ? "cholesky" : "circulant"; }

FgnMethod parse_fgn_method(const std::string& name) {
  if (name == "cholesky") return FgnMethod::cholesky;
  if (name == "circulant") return FgnMethod::circulant;
  throw std::invalid_argument("unknown fgn method '" + name + "' (expected cholesky or circulant)");
}

double fgn_autocovariance(std::size_t k, double hurst, std::size_t n) {
  const double e = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  double g = 0.5 * (std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + std::pow(std::abs(kk - 1.0), e));
  return g * std::pow(static_cast<double>(n), -e);
}

struct StationaryGaussianSampler::Impl {
  std::vector<double> sqrt_eig;  // circulant: sqrt(lambda_k / N)
  Eigen::MatrixXd lower;         // cholesky
};

StationaryGaussianSampler::StationaryGaussianSampler(std::vector<double> gamma, FgnMethod preferred)
    : n_(gamma.empty() ? 0 : gamma.size() - 1), method_(preferred), impl_(std::make_unique<Impl>()) {
  if (n_ < 2) throw std::invalid_argument("sampler needs at least two points");
  if (preferred == FgnMethod::circulant) {
    const std::size_t size = 2 * n_;
    std::vector<detail::cplx> c(size, 0.0);
    for (std::size_t k = 0; k < n_; ++k) c[k] = gamma[k];
    c[n_] = gamma[n_];
    for (std::size_t k = 1; k < n_; ++k) c[size - k] = gamma[k];
    detail::fft_inplace(c, true);
    double max_eig = 0.0, min_eig = 0.0;
    for (const auto& z : c) {
      max_eig = std::max(max_eig, z.real());
      min_eig = std::min(min_eig, z.real());
    }
    min_ratio_ = max_eig > 0 ? min_eig / max_eig : -1.0;
    if (min_eig < -kNegativeTolerance * max_eig || max_eig <= 0) {
      std::clog << "fpv: circulant embedding of size " << size << " has eigenvalue " << min_eig
                << " (max " << max_eig << "); falling back to cholesky\n";
      method_ = FgnMethod::cholesky;
    } else {
      impl_->sqrt_eig.resize(size);
      for (std::size_t k = 0; k < size; ++k) {
        impl_->sqrt_eig[k] = std::sqrt(std::max(c[k].real(), 0.0) / static_cast<double>(size));
      }
    }
  }
  if (method_ == FgnMethod::cholesky) {
    Eigen::MatrixXd cov(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) cov(i, j) = gamma[i > j ? i - j : j - i];
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw std::runtime_error("cholesky factorization of covariance failed");
    impl_->lower = llt.matrixL();
  }
}

StationaryGaussianSampler::~StationaryGaussianSampler() = default;

void StationaryGaussianSampler::sample(NormalStream& rng, std::span<double> out) const {
  if (out.size() != n_) throw std::invalid_argument("sample buffer size mismatch");
  if (method_ == FgnMethod::circulant) {
    const std::size_t size = impl_->sqrt_eig.size();
    std::vector<detail::cplx> w(size);
    for (std::size_t k = 0; k < size; ++k) {
      double re = rng.next();
      double im = rng.next();
      w[k] = impl_->sqrt_eig[k] * detail::cplx(re, im);
    }
    detail::fft_inplace(w, true);
    for (std::size_t i = 0; i < n_; ++i) out[i] = w[i].real();
  } else {
    Eigen::VectorXd z(n_);
    for (std::size_t i = 0; i < n_; ++i) z[i] = rng.next();
    Eigen::VectorXd x = impl_->lower.triangularView<Eigen::Lower>() * z;
    for (std::size_t i = 0; i < n_; ++i) out[i] = x[i];
  }
}

std::shared_ptr<const StationaryGaussianSampler> fgn_sampler(std::size_t n, double hurst, FgnMethod method) {
  using Key = std::tuple<std::size_t, double, FgnMethod>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const StationaryGaussianSampler>> cache;
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("fgn sampler needs H in (0, 1)");
  if (n < 2) throw std::invalid_argument("fgn sampler needs n >= 2");
  std::lock_guard lock(mutex);
  Key key{n, hurst, method};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<double> gamma(n + 1);
  for (std::size_t k = 0; k <= n; ++k) gamma[k] = fgn_autocovariance(k, hurst, n);
  auto sampler = std::make_shared<const StationaryGaussianSampler>(std::move(gamma), method);
  cache.emplace(key, sampler);
  return sampler;
}

FgnSample sample_fgn(std::size_t n, double hurst, std::uint64_t seed, FgnMethod method) {
  auto sampler = fgn_sampler(n, hurst, method);
  FgnSample s;
  s.n = n;
  s.hurst = hurst;
  s.seed = seed;
  s.method = sampler->method();
  s.increments.resize(n);
  NormalStream rng(seed);
  sampler->sample(rng, s.increments);
  return s;
}

std::vector<double> path_from_increments(const FgnSample& sample) {
  std::vector<double> path(sample.increments.size() + 1, 0.0);
  for (std::size_t i = 0; i < sample.increments.size(); ++i) path[i + 1] = path[i] + sample.increments[i];
  return path;
}

void write_increments(std::ostream& out, const FgnSample& sample) {
  put<std::uint64_t>(out, sample.increments.size());
  put<double>(out, sample.hurst);
  put<std::uint64_t>(out, sample.seed);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(sample.method));
  for (double v : sample.increments) put<double>(out, v);
  if (!out) throw std::runtime_error("failed to write increment dump");
}

FgnSample read_increments(std::istream& in) {
  FgnSample s;
  s.n = get<std::uint64_t>(in);
  s.hurst = get<double>(in);
  s.seed = get<std::uint64_t>(in);
  auto m = get<std::uint8_t>(in);
  if (m > 1) throw std::runtime_error("bad method byte in increment dump");
  s.method = static_cast<FgnMethod>(m);
  s.increments.resize(s.n);
  for (auto& v : s.increments) v = get<double>(in);
  return s;
}

}  // namespace fpv
