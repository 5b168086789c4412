#include "heightkit/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace heightkit {
namespace {

unsigned initial_cap() {
  if (const char* env = std::getenv("HEIGHTKIT_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::atomic<unsigned>& cap_storage() {
  static std::atomic<unsigned> cap{initial_cap()};
  return cap;
}

}  // namespace

unsigned thread_cap() { return cap_storage().load(); }

void set_thread_cap(unsigned threads) { cap_storage().store(std::max(1U, threads)); }

}  // namespace heightkit
