#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace domsim {

/// Splits [0, n) into `workers` contiguous chunks and runs `fn(begin, end)`
/// on each, one thread per chunk (the caller's thread takes the first).
/// If several chunks throw, the exception of the lowest chunk is rethrown.
template <typename Fn>
void parallel_for_chunks(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t base = n / workers;
  const std::size_t extra = n % workers;
  auto chunk_begin = [&](std::size_t w) { return w * base + std::min(w, extra); };

  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          fn(chunk_begin(w), chunk_begin(w + 1));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    try {
      fn(chunk_begin(0), chunk_begin(1));
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace domsim
