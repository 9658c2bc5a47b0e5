// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace ncofdm {

using cplx = std::complex<double>;

/// Complex baseband samples on a global sample timeline.
///
/// samples[i] is the sample at global index origin_index + i. The frame
/// builder places global index 0 at the first post-CP sample of the
/// preamble (the optimal timing point), so timing estimates and timing
/// errors read directly in samples.
struct BasebandSignal {
  std::vector<cplx> samples;
  std::int64_t origin_index = 0;

  std::int64_t begin_index() const { return origin_index; }
  std::int64_t end_index() const {
    return origin_index + static_cast<std::int64_t>(samples.size());
  }
  std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }

  bool in_range(std::int64_t n, std::int64_t count = 1) const {
    return n >= begin_index() && n + count <= end_index();
  }
  const cplx& at_global(std::int64_t n) const {
    return samples[static_cast<std::size_t>(n - origin_index)];
  }
  cplx& at_global(std::int64_t n) {
    return samples[static_cast<std::size_t>(n - origin_index)];
  }
  /// Pointer to the window starting at global index n (caller checks range).
  const cplx* window(std::int64_t n) const {
    return samples.data() + (n - origin_index);
  }
};

/// Debug dump: interleaved float64 I/Q, little-endian.
void write_iq_f64(const BasebandSignal& x, const std::string& path);

}  // namespace ncofdm
