#pragma once

#include "tresca/types.hpp"

#include <exception>
#include <mutex>

namespace tresca {

/// Runs fn(c) for c in [0, n), over OpenMP threads when exec is parallel.
/// The first exception thrown by any iteration is rethrown afterwards.
template <class Fn>
void for_cells(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::serial) {
    for (std::size_t c = 0; c < n; ++c) fn(c);
    return;
  }
  std::exception_ptr error;
  std::mutex guard;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < count; ++c) {
    try {
      fn(static_cast<std::size_t>(c));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace tresca
