#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace spotkit {

/// Selects between the OpenMP kernels and the plain serial loop. Both paths
/// produce identical results; the serial one is kept as the reference.
enum class Execution { serial, parallel };

/// Worker count for parallel loops: SPOTKIT_WORKERS when set to a positive
/// integer, otherwise the OpenMP default.
int worker_count();

/// Runs body(i) for i in [0, n). Each index must write only to its own output
/// slot. Exceptions are collected per index and the lowest failing index is
/// rethrown, so error reporting does not depend on scheduling.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace spotkit
