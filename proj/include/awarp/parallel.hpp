// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace awarp {

/// 0 means one thread per hardware core.
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into at most `parts` contiguous, near-equal ranges.
/// Returns the boundaries b[0] = 0 < ... < b[k] = n (just {0, 0} if n == 0).
inline std::vector<std::int64_t> chunk_bounds(std::int64_t n, unsigned parts) {
  const std::int64_t k = std::max<std::int64_t>(1, std::min<std::int64_t>(parts, n));
  std::vector<std::int64_t> b(static_cast<std::size_t>(k + 1));
  for (std::int64_t c = 0; c <= k; ++c) b[static_cast<std::size_t>(c)] = n * c / k;
  return b;
}

/// Runs fn(chunk, begin, end) for every range of `bounds`, one thread per
/// range. The exception of the lowest-numbered failing chunk is rethrown.
template <class Fn>
void run_chunks(const std::vector<std::int64_t>& bounds, Fn&& fn) {
  const std::size_t k = bounds.size() - 1;
  if (k == 1) {
    fn(std::size_t{0}, bounds[0], bounds[1]);
    return;
  }
  std::vector<std::exception_ptr> errors(k);
  {
    std::vector<std::jthread> pool;
    pool.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
      pool.emplace_back([&, c] {
        try {
          fn(c, bounds[c], bounds[c + 1]);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class Fn>
void parallel_for_rows(std::int64_t n, unsigned threads, Fn&& fn) {
  run_chunks(chunk_bounds(n, threads),
             [&fn](std::size_t, std::int64_t a, std::int64_t b) { fn(a, b); });
}

}  // namespace awarp
