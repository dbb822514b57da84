// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Execution policy shared by the data-parallel kernels. Every kernel that
// accepts an Exec has a serial reference path; the OpenMP path must produce
// bit-identical results (work is partitioned by index and any reduction is
// done in index order afterwards).

#include <cstddef>
#include <exception>
#include <vector>

namespace catts {

enum class Exec { Serial, Parallel };

/// Number of OpenMP threads available, 1 when built without OpenMP.
int max_threads() noexcept;

/// Runs body(i) for i in [0, n). Under Exec::Parallel iterations are spread
/// over at most `threads` OpenMP threads (0 = runtime default). The first
/// exception by index is rethrown after the loop completes.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body, int threads = 0) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::Serial || n < 2) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const int team = threads > 0 ? threads : max_threads();
  (void)team;
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace catts
