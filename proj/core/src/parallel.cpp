#include "fpv/parallel.hpp"

#include <cstdlib>
#include <string>

namespace fpv {

std::size_t default_thread_count() {
  if (const char* env = std::getenv("FPV_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace fpv
