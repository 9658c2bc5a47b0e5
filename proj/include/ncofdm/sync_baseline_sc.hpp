// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ncofdm/signal.hpp"
#include "ncofdm/waveform.hpp"

namespace ncofdm {

// Schmidl & Cox reference synchronizer (T. Schmidl, D. Cox, "Robust
// frequency and timing synchronization for OFDM", IEEE Trans. Commun. 45(12),
// 1997), adapted to the single repeated-halves preamble used here.

/// Autocorrelation timing metric trace. For window start n (global), indexed
/// n - n_lo:
///   autocorr P(n)  = sum_{m<N/2} conj(r(n+m)) r(n+m+N/2)
///   energy   Re(n) = sum_{m<N/2} |r(n+m+N/2)|^2
///   timing_metric M(n) = |P(n)|^2 / Re(n)^2   (0 where Re vanishes)
struct ScMetricTrace {
  std::int64_t n_lo = 0;
  std::vector<double> timing_metric;
  std::vector<cplx> autocorr;
  std::vector<double> energy;

  std::int64_t n_hi() const {
    return n_lo + static_cast<std::int64_t>(timing_metric.size()) - 1;
  }
  double metric(std::int64_t n) const {
    return timing_metric[static_cast<std::size_t>(n - n_lo)];
  }
  cplx p(std::int64_t n) const {
    return autocorr[static_cast<std::size_t>(n - n_lo)];
  }
};

/// Timing by the 90%-plateau rule: locate the metric maximum, find the
/// first and last crossings of 0.9*max within +-N around it, return the
/// midpoint. Throws "no signal energy" on an all-zero input.
std::pair<std::int64_t, ScMetricTrace> sc_timing(const BasebandSignal& r, int n_fft);

/// Fractional CFO from the autocorrelation angle at the timing point:
/// angle(P)/pi in subcarrier spacings (half-symbol lag, range (-1, 1]).
double sc_frac_cfo(const ScMetricTrace& trace, std::int64_t timing, int n_fft);

/// Integer CFO on the even-bin grid: derotates by frac, DFTs the window at
/// `timing`, and picks g in [-range, range] maximizing the differential
/// correlation of adjacent occupied even bins against the reference
/// spectrum shifted by 2g. The total estimate is frac + 2g.
int sc_int_cfo(const BasebandSignal& r, const PreambleRecord& rp,
               std::int64_t timing, double frac, int range);

struct ScResult {
  std::int64_t timing = 0;
  double nu_frac = 0.0;
  int g = 0;
  double nu_hat = 0.0;  // nu_frac + 2 g
};

ScResult run_schmidl_cox(const BasebandSignal& r, const PreambleRecord& rp,
                         int n_fft, int range);

}  // namespace ncofdm
