// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <vector>

#include "ncofdm/signal.hpp"

namespace ncofdm {

/// Iterative radix-2 DIT FFT with precomputed twiddles for power-of-two
/// sizes; direct O(N^2) transform otherwise (only small odd sizes appear,
/// and only in tests).
///
/// Conventions, used consistently across the library:
///   forward:  X[k] = sum_m x[m] e^{-j 2 pi m k / N}   (unnormalized)
///   inverse:  x[m] = sum_k X[k] e^{+j 2 pi m k / N}   (unnormalized)
/// The OFDM modulator applies its own 1/sqrt(N); the synchronizer's forward
/// transform is used raw.
class FftPlan {
 public:
  explicit FftPlan(int n);

  int size() const { return n_; }
  void forward(cplx* data) const;
  void inverse(cplx* data) const;

 private:
  void radix2(cplx* data, bool inverse) const;
  void direct(cplx* data, bool inverse) const;

  int n_;
  bool pow2_;
  std::vector<int> rev_;        // bit-reversal permutation (pow2 only)
  std::vector<cplx> twiddle_;   // forward twiddles e^{-j 2 pi k / N}, k < N/2
};

/// Convenience one-shot transforms (plan built per call).
std::vector<cplx> fft(const std::vector<cplx>& x);
std::vector<cplx> ifft(const std::vector<cplx>& x);

/// Maps a subcarrier index in [-N/2, N/2-1] (or any integer) to an FFT bin.
inline int wrap_bin(int k, int n) {
  int m = k % n;
  return m < 0 ? m + n : m;
}

}  // namespace ncofdm
