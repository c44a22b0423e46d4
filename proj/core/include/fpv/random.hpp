#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fpv {

// Stream tags keep independent ensembles on disjoint seeds.
enum class StreamTag : std::uint64_t {
  fgn = 0x11,
  expansion = 0x22,
  bootstrap = 0x33,
  oracle = 0x44,
  order = 0x55,
};

// Seed for substream `index` of `base`; a pure function of its arguments.
std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index, StreamTag tag = StreamTag::fgn);

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() { return dist_(engine_); }
  void fill(std::span<double> out) {
    for (double& v : out) v = dist_(engine_);
  }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace fpv
