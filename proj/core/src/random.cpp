#include "fpv/random.hpp"

namespace fpv {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index, StreamTag tag) {
  std::uint64_t s = splitmix(base ^ splitmix(static_cast<std::uint64_t>(tag)));
  return splitmix(s ^ splitmix(index + 0x632be59bd9b4e019ULL));
}

}  // namespace fpv
