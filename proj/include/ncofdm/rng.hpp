// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <cstdint>
#include <random>

#include "ncofdm/signal.hpp"

namespace ncofdm {

// All randomness flows through mt19937_64 plus the fixed transforms below.
// mt19937_64 output is pinned by the C++ standard and the transforms avoid
// std::*_distribution (whose output is implementation-defined), so every
// draw is bit-identical across platforms and standard libraries. This is
// what lets the receiver regenerate the transmitter's preamble from the
// shared seed alone.

/// splitmix64 finalizer; also the seed-derivation mixer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from (base, stream id).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Fixed stream ids used when a trial seed is split into purpose streams.
enum class SeedStream : std::uint64_t {
  Preamble = 1,
  Data = 2,
  Channel = 3,
  Cfo = 4,
  Noise = 5,
  InterferencePhase = 6,
  WbiSymbols = 7,
  WbiOffset = 8,
  DsaCenter = 9,
};

inline std::uint64_t derive_seed(std::uint64_t base, SeedStream s) {
  return derive_seed(base, static_cast<std::uint64_t>(s));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; two engine draws per call.
  double gaussian() {
    double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;  // (0,1]
    double u2 = static_cast<double>(eng_() >> 11) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  cplx cgaussian(double variance) {
    double s = std::sqrt(variance * 0.5);
    double re = gaussian();
    double im = gaussian();
    return {s * re, s * im};
  }

  /// One QPSK symbol from {(+-1 +-j)/sqrt(2)}; unit power.
  cplx qpsk() {
    std::uint64_t w = eng_();
    constexpr double a = 0.7071067811865475244;
    return {(w & 1u) ? a : -a, (w & 2u) ? a : -a};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ncofdm
