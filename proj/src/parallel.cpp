#include "iife/parallel.hpp"

#include <cstdlib>
#include <string>

namespace iife {

unsigned default_threads() {
  if (const char* env = std::getenv("IIFE_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value >= 1) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace iife
