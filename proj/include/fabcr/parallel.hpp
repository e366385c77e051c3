#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <utility>

namespace fabcr {

/// Execution policy for the data-parallel kernels. `serial` runs the same loop
/// body in index order and is the reference the OpenMP path is tested against.
enum class Exec { serial, parallel };

/// Number of OpenMP threads the parallel kernels will use.
int thread_count();

/// Caps the OpenMP thread count (values < 1 are ignored).
void set_thread_cap(int threads);

/// Applies FABCR_THREADS from the environment, if set. Returns the cap applied
/// or 0 when the variable is absent.
int apply_thread_env();

/// Runs body(i) for i in [0, n). Iterations must be independent and write only
/// to their own slots. If any iteration throws, the exception of the lowest
/// failing index is rethrown after the loop, regardless of Exec.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t failed = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(fabcr_for_each_index)
      {
        if (static_cast<std::size_t>(i) < failed) {
          failed = static_cast<std::size_t>(i);
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace fabcr
