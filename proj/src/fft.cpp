// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include "ncofdm/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace ncofdm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

FftPlan::FftPlan(int n) : n_(n), pow2_(is_pow2(n)) {
  if (n <= 0) throw std::invalid_argument("FftPlan: size must be positive");
  if (!pow2_) return;
  rev_.resize(n_);
  int bits = 0;
  while ((1 << bits) < n_) ++bits;
  for (int i = 0; i < n_; ++i) {
    int r = 0;
    for (int b = 0; b < bits; ++b)
      if (i & (1 << b)) r |= 1 << (bits - 1 - b);
    rev_[i] = r;
  }
  // Stage-packed twiddles, unit stride inside each butterfly pass.
  twiddle_.reserve(n_ - 1);
  for (int len = 2; len <= n_; len <<= 1) {
    const int half = len >> 1;
    for (int j = 0; j < half; ++j) {
      const double a = -kTwoPi * j / len;
      twiddle_.push_back({std::cos(a), std::sin(a)});
    }
  }
}

void FftPlan::radix2(cplx* data, bool inverse) const {
  double* d = reinterpret_cast<double*>(data);
  for (int i = 0; i < n_; ++i) {
    const int r = rev_[i];
    if (r > i) {
      std::swap(d[2 * i], d[2 * r]);
      std::swap(d[2 * i + 1], d[2 * r + 1]);
    }
  }
  const double wsign = inverse ? -1.0 : 1.0;
  const cplx* stage = twiddle_.data();
  for (int len = 2; len <= n_; len <<= 1) {
    const int half = len >> 1;
    for (int base = 0; base < n_; base += len) {
      double* p = d + 2 * base;
      double* q = d + 2 * (base + half);
      for (int j = 0; j < half; ++j) {
        const double wr = stage[j].real();
        const double wi = wsign * stage[j].imag();
        const double xr = q[2 * j], xi = q[2 * j + 1];
        const double tr = xr * wr - xi * wi;
        const double ti = xr * wi + xi * wr;
        const double ur = p[2 * j], ui = p[2 * j + 1];
        p[2 * j] = ur + tr;
        p[2 * j + 1] = ui + ti;
        q[2 * j] = ur - tr;
        q[2 * j + 1] = ui - ti;
      }
    }
    stage += half;
  }
}

void FftPlan::direct(cplx* data, bool inverse) const {
  std::vector<cplx> out(n_, cplx{0.0, 0.0});
  double sign = inverse ? 1.0 : -1.0;
  for (int k = 0; k < n_; ++k) {
    cplx acc{0.0, 0.0};
    for (int m = 0; m < n_; ++m) {
      double a = sign * kTwoPi * (static_cast<long long>(m) * k % n_) / n_;
      acc += data[m] * cplx{std::cos(a), std::sin(a)};
    }
    out[k] = acc;
  }
  for (int k = 0; k < n_; ++k) data[k] = out[k];
}

void FftPlan::forward(cplx* data) const {
  pow2_ ? radix2(data, false) : direct(data, false);
}

void FftPlan::inverse(cplx* data) const {
  pow2_ ? radix2(data, true) : direct(data, true);
}

std::vector<cplx> fft(const std::vector<cplx>& x) {
  std::vector<cplx> y = x;
  FftPlan(static_cast<int>(x.size())).forward(y.data());
  return y;
}

std::vector<cplx> ifft(const std::vector<cplx>& x) {
  std::vector<cplx> y = x;
  FftPlan(static_cast<int>(x.size())).inverse(y.data());
  return y;
}

}  // namespace ncofdm
