#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fpv::detail {

using cplx = std::complex<double>;

// In-place unnormalized DFT. forward uses exp(-2 pi i jk / N).
void fft_inplace(std::span<cplx> data, bool forward);

std::size_t next_pow2(std::size_t n);

// Symmetric Toeplitz operator y_i = sum_k K(|i - k|) x_k on vectors of a
// fixed length, applied through a circulant embedding.
class ToeplitzOperator {
 public:
  ToeplitzOperator(std::span<const double> kernel, std::size_t length);

  std::size_t length() const noexcept { return length_; }
  void apply(std::span<const double> x, std::span<double> y) const;
  // x^T T y
  double bilinear(std::span<const double> x, std::span<const double> y) const;

 private:
  std::size_t length_;
  std::size_t size_;
  std::vector<cplx> spectrum_;
};

// Full cross-correlation c(d) = sum_i a(i) b(i + d) for finite sequences.
// Sequences are indexed from -radius..radius stored at offset radius.
std::vector<double> correlate_centered(std::span<const double> a, std::span<const double> b);

}  // namespace fpv::detail
