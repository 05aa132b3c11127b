#include "spotkit/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace spotkit {

int worker_count() {
  if (const char* env = std::getenv("SPOTKIT_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace spotkit
