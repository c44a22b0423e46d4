#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fpv/random.hpp"

namespace fpv {

enum class FgnMethod : std::uint8_t { cholesky = 0, circulant = 1 };

const char* to_string(FgnMethod m);
FgnMethod parse_fgn_method(const std::string& name);

struct FgnSample {
  std::size_t n = 0;
  double hurst = 0.0;
  std::uint64_t seed = 0;
  FgnMethod method = FgnMethod::circulant;  // method actually used
  std::vector<double> increments;           // B_{(i+1)/n} - B_{i/n}
};

// Autocovariance of fGn on a grid of mesh 1/n at lag k.
double fgn_autocovariance(std::size_t k, double hurst, std::size_t n);

// Exact sampler for a stationary Gaussian sequence of length n given its
// autocovariance at lags 0..n (the last lag only enters the embedding).
// A circulant embedding with a significantly negative eigenvalue falls back
// to a Cholesky factorization and logs the event.
class StationaryGaussianSampler {
 public:
  StationaryGaussianSampler(std::vector<double> autocovariance, FgnMethod preferred);
  ~StationaryGaussianSampler();
  StationaryGaussianSampler(const StationaryGaussianSampler&) = delete;
  StationaryGaussianSampler& operator=(const StationaryGaussianSampler&) = delete;

  std::size_t size() const noexcept { return n_; }
  FgnMethod method() const noexcept { return method_; }
  double min_eigenvalue_ratio() const noexcept { return min_ratio_; }

  void sample(NormalStream& rng, std::span<double> out) const;

 private:
  struct Impl;
  std::size_t n_;
  FgnMethod method_;
  double min_ratio_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

// Shared sampler for (n, H, method); built once and cached.
std::shared_ptr<const StationaryGaussianSampler> fgn_sampler(std::size_t n, double hurst, FgnMethod method);

// hurst may be any value in (0, 1) here; 1/2 gives Brownian increments.
FgnSample sample_fgn(std::size_t n, double hurst, std::uint64_t seed, FgnMethod method);

// B_0 = 0, B_{i/n} = cumulative sums.
std::vector<double> path_from_increments(const FgnSample& sample);

// Raw little-endian dump: u64 n, f64 H, u64 seed, u8 method, then n f64.
void write_increments(std::ostream& out, const FgnSample& sample);
FgnSample read_increments(std::istream& in);

}  // namespace fpv
