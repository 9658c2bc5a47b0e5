// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include "ncofdm/sync_baseline_sc.hpp"

#include <cmath>
#include <stdexcept>

#include "ncofdm/fft.hpp"

namespace ncofdm {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

std::pair<std::int64_t, ScMetricTrace> sc_timing(const BasebandSignal& r, int n_fft) {
  const int half = n_fft / 2;
  if (r.size() < n_fft) throw std::invalid_argument("sc_timing: signal shorter than N");

  ScMetricTrace tr;
  tr.n_lo = r.begin_index();
  const std::int64_t count = r.size() - n_fft + 1;
  tr.autocorr.resize(count);
  tr.energy.resize(count);
  tr.timing_metric.resize(count);

  // Sliding half-symbol autocorrelation: one term enters, one leaves.
  cplx p{0.0, 0.0};
  double e = 0.0;
  const cplx* s = r.samples.data();
  for (int m = 0; m < half; ++m) {
    p += std::conj(s[m]) * s[m + half];
    e += std::norm(s[m + half]);
  }
  for (std::int64_t i = 0;; ++i) {
    tr.autocorr[i] = p;
    tr.energy[i] = e;
    tr.timing_metric[i] = e > 0.0 ? std::norm(p) / (e * e) : 0.0;
    if (i + 1 >= count) break;
    p += std::conj(s[i + half]) * s[i + n_fft] - std::conj(s[i]) * s[i + half];
    e += std::norm(s[i + n_fft]) - std::norm(s[i + half]);
    if (e < 0.0) e = 0.0;  // rounding guard on long flat stretches
  }

  double max_m = 0.0;
  std::int64_t max_i = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    if (tr.timing_metric[i] > max_m) {
      max_m = tr.timing_metric[i];
      max_i = i;
    }
  }
  if (max_m <= 0.0) throw std::runtime_error("no signal energy");

  // First/last 90%-of-max crossings within +-N around the maximum; the
  // preamble start is taken as their midpoint.
  const double level = 0.9 * max_m;
  std::int64_t first = max_i, last = max_i;
  for (std::int64_t i = std::max<std::int64_t>(0, max_i - n_fft); i <= max_i; ++i) {
    if (tr.timing_metric[i] >= level) {
      first = i;
      break;
    }
  }
  for (std::int64_t i = std::min(count - 1, max_i + n_fft); i >= max_i; --i) {
    if (tr.timing_metric[i] >= level) {
      last = i;
      break;
    }
  }
  const std::int64_t timing = tr.n_lo + (first + last) / 2;
  return {timing, std::move(tr)};
}

double sc_frac_cfo(const ScMetricTrace& trace, std::int64_t timing, int n_fft) {
  (void)n_fft;  // half-symbol lag: angle covers one subcarrier spacing per pi
  if (timing < trace.n_lo || timing > trace.n_hi())
    throw std::out_of_range("sc_frac_cfo: timing outside trace");
  return std::arg(trace.p(timing)) / kPi;
}

int sc_int_cfo(const BasebandSignal& r, const PreambleRecord& rp,
               std::int64_t timing, double frac, int range) {
  const int n_fft = static_cast<int>(rp.time_samples.size());
  if (!r.in_range(timing, n_fft))
    throw std::out_of_range("sc_int_cfo: window outside signal");

  // Derotate the fractional part, spectrum of the window at the timing point.
  std::vector<cplx> buf(n_fft);
  const cplx* w = r.window(timing);
  for (int m = 0; m < n_fft; ++m) {
    const double a = -kTwoPi * frac * static_cast<double>(timing + m) / n_fft;
    buf[m] = w[m] * cplx{std::cos(a), std::sin(a)};
  }
  FftPlan(n_fft).forward(buf.data());

  // Adjacent occupied even bins, for the timing-phase-immune differential.
  std::vector<int> support;
  for (int k = -n_fft / 2; k < n_fft / 2; ++k)
    if (rp.freq_symbols[wrap_bin(k, n_fft)] != cplx{0.0, 0.0}) support.push_back(k);
  if (support.size() < 2) throw std::invalid_argument("sc_int_cfo: degenerate preamble");

  int best_g = 0;
  double best_v = -1.0;
  for (int g = -range; g <= range; ++g) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < support.size(); ++i) {
      const int k1 = support[i], k2 = support[i + 1];
      if (k2 - k1 != 2) continue;  // differential only within a block
      const cplx c1 = buf[wrap_bin(k1 + 2 * g, n_fft)] *
                      std::conj(rp.freq_symbols[wrap_bin(k1, n_fft)]);
      const cplx c2 = buf[wrap_bin(k2 + 2 * g, n_fft)] *
                      std::conj(rp.freq_symbols[wrap_bin(k2, n_fft)]);
      acc += c2 * std::conj(c1);
    }
    const double v = std::abs(acc);
    if (v > best_v) {
      best_v = v;
      best_g = g;
    }
  }
  return best_g;
}

ScResult run_schmidl_cox(const BasebandSignal& r, const PreambleRecord& rp,
                         int n_fft, int range) {
  ScResult res;
  auto [timing, trace] = sc_timing(r, n_fft);
  res.timing = timing;
  res.nu_frac = sc_frac_cfo(trace, timing, n_fft);
  res.g = sc_int_cfo(r, rp, timing, res.nu_frac, range);
  res.nu_hat = res.nu_frac + 2.0 * res.g;
  return res;
}

}  // namespace ncofdm
