#include "mfgdc/core/parallel.hpp"

#include <omp.h>

#include <cstdlib>

namespace mfgdc {

int worker_count() {
  static const int count = [] {
    if (const char* env = std::getenv("MFGDC_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
    return omp_get_max_threads();
  }();
  return count;
}

}  // namespace mfgdc
