#include "fabcr/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace fabcr {

int thread_count() { return omp_get_max_threads(); }

void set_thread_cap(int threads) {
  if (threads >= 1) omp_set_num_threads(threads);
}

int apply_thread_env() {
  const char* env = std::getenv("FABCR_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    const int threads = std::stoi(env);
    if (threads < 1) return 0;
    set_thread_cap(threads);
    return threads;
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace fabcr
