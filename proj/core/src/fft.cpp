#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace fpv::detail {

namespace {

std::mutex plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan>& plans() {
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  return cache;
}

fftw_plan plan_for(std::size_t n, int sign) {
  std::lock_guard lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plans().find(key);
  if (it != plans().end()) return it->second;
  std::vector<cplx> scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw std::runtime_error("fftw plan creation failed");
  plans().emplace(key, plan);
  return plan;
}

}  // namespace

void fft_inplace(std::span<cplx> data, bool forward) {
  if (data.empty()) return;
  fftw_plan plan = plan_for(data.size(), forward ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

ToeplitzOperator::ToeplitzOperator(std::span<const double> kernel, std::size_t length)
    : length_(length), size_(next_pow2(2 * length)) {
  std::vector<cplx> c(size_, 0.0);
  for (std::size_t d = 0; d < length && d < kernel.size(); ++d) {
    c[d] = kernel[d];
    if (d > 0) c[size_ - d] = kernel[d];
  }
  fft_inplace(c, true);
  spectrum_ = std::move(c);
}

void ToeplitzOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != length_ || y.size() != length_) throw std::invalid_argument("toeplitz size mismatch");
  std::vector<cplx> buf(size_, 0.0);
  for (std::size_t i = 0; i < length_; ++i) buf[i] = x[i];
  fft_inplace(buf, true);
  for (std::size_t i = 0; i < size_; ++i) buf[i] *= spectrum_[i];
  fft_inplace(buf, false);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < length_; ++i) y[i] = buf[i].real() * scale;
}

double ToeplitzOperator::bilinear(std::span<const double> x, std::span<const double> y) const {
  std::vector<double> ty(length_);
  apply(y, ty);
  double s = 0.0;
  for (std::size_t i = 0; i < length_; ++i) s += x[i] * ty[i];
  return s;
}

std::vector<double> correlate_centered(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() % 2 == 0) throw std::invalid_argument("correlate_centered needs equal odd lengths");
  const std::size_t len = a.size();
  const std::size_t size = next_pow2(2 * len);
  std::vector<cplx> fa(size, 0.0), fb(size, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    fa[i] = a[i];
    fb[i] = b[i];
  }
  fft_inplace(fa, true);
  fft_inplace(fb, true);
  for (std::size_t i = 0; i < size; ++i) fa[i] = std::conj(fa[i]) * fb[i];
  fft_inplace(fa, false);
  // lag d in [-(len-1), len-1] sits at index d mod size
  std::vector<double> out(2 * len - 1);
  const double scale = 1.0 / static_cast<double>(size);
  const auto l = static_cast<std::ptrdiff_t>(len);
  for (std::ptrdiff_t d = -(l - 1); d <= l - 1; ++d) {
    std::size_t idx = d >= 0 ? static_cast<std::size_t>(d) : size - static_cast<std::size_t>(-d);
    out[static_cast<std::size_t>(d + l - 1)] = fa[idx].real() * scale;
  }
  return out;
}

}  // namespace fpv::detail
