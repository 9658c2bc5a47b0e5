// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ncofdm/signal.hpp"
#include "ncofdm/waveform.hpp"

namespace ncofdm {

enum class DetectionRule { YOnly, YZCombined };

/// The synchronization variable Y(n,k) over a time window of candidate
/// starts n and integer frequency offsets k, plus the phase-compensated
/// pair metric Z(n,k) = (Y(n,k) - Y(n,k+1) e^{-j pi/N}) / sqrt(2).
///
/// Y(n,k) = sum_{m=0}^{N-1} r(n+m) conj(x_m) e^{-j 2 pi m k / N}: the
/// received window multiplied by the conjugate reference preamble and fed
/// to an unnormalized forward FFT.
///
/// Search range is k in [-k_search, k_search]. When that covers the whole
/// grid the store is cyclic over all N bins; otherwise bins
/// [-k_search-1, k_search+1] are kept so the frequency interpolator can
/// read one bin beyond the search range.
class SyncGrid {
 public:
  SyncGrid() = default;

  std::int64_t n_lo() const { return n_lo_; }
  std::int64_t n_hi() const { return n_hi_; }
  int n_fft() const { return n_fft_; }
  int k_search() const { return k_search_; }
  bool full_range() const { return full_range_; }
  bool has_z() const { return has_z_; }

  cplx y(std::int64_t n, int k) const {
    return values_[row(n) * stride_ + col(k)];
  }
  cplx z(std::int64_t n, int k) const {
    return z_values_[row(n) * z_stride_ + z_col(k)];
  }
  /// k bounds of the Z store: [z_k_min, z_k_max] inclusive.
  int z_k_min() const { return full_range_ ? -n_fft_ / 2 : -k_search_; }
  int z_k_max() const { return full_range_ ? n_fft_ / 2 - 1 : k_search_ - 1; }
  int y_k_min() const { return full_range_ ? -n_fft_ / 2 : -k_search_; }
  int y_k_max() const { return full_range_ ? n_fft_ / 2 - 1 : k_search_; }

  friend SyncGrid compute_sync_grid(const BasebandSignal&, const PreambleRecord&,
                                    std::int64_t, std::int64_t, int, bool);

 private:
  std::size_t row(std::int64_t n) const { return static_cast<std::size_t>(n - n_lo_); }
  std::size_t col(int k) const;
  std::size_t z_col(int k) const;

  std::int64_t n_lo_ = 0, n_hi_ = -1;
  int n_fft_ = 0;
  int k_search_ = 0;
  bool full_range_ = false;
  bool has_z_ = false;
  std::size_t stride_ = 0, z_stride_ = 0;
  std::vector<cplx> values_;
  std::vector<cplx> z_values_;
};

/// Fills the grid for window starts n in [n_lo, n_hi] (inclusive, global
/// indices; every window must fit inside r). k_search = ceil(nu_max); a
/// value with 2*k_search+1 >= N selects the full cyclic range.
SyncGrid compute_sync_grid(const BasebandSignal& r, const PreambleRecord& rp,
                           std::int64_t n_lo, std::int64_t n_hi, int k_search,
                           bool with_z);

/// Y(n,k) for the requested integer offsets (one FFT, bins picked mod N).
/// Throws if the window falls outside r.
std::vector<cplx> sync_variable(const BasebandSignal& r, const PreambleRecord& rp,
                                std::int64_t n, const std::vector<int>& ks);

/// Y(n,k) at an arbitrary real-valued frequency offset, evaluated as the
/// direct correlation sum (the FFT only provides integer bins; the defining
/// sum works for any k).
cplx sync_variable_at(const BasebandSignal& r, const PreambleRecord& rp,
                      std::int64_t n, double k);

/// Frequency-domain route: given the N-point DFT R(n,.) of the window and
/// the preamble symbols d (FFT bin order), computes
///   Y(n,k) = 1/sqrt(N) sum_{k1} conj(d_{k1}) R(n, (k+k1) mod N).
/// The 1/sqrt(N) makes it equal the time-domain form exactly (the reference
/// time samples carry that factor from the modulator).
cplx sync_variable_freq(const std::vector<cplx>& r_window_dft,
                        const std::vector<cplx>& preamble_symbols, int k);

struct CoarsePoint {
  std::int64_t n_m = 0;
  int k_m = 0;
  bool used_z_metric = false;
  double peak_power = 0.0;  // the winning |.|^2
};

/// Argmax of |Y|^2 (YOnly) or the better of the |Y|^2 and |Z|^2 maxima
/// (YZCombined, with the k_Z+1 disambiguation). Ties break toward smaller
/// n, then smaller |k|.
CoarsePoint coarse_detect(const SyncGrid& grid, DetectionRule rule);

/// Preamble presence threshold: -sigma_thr_sq * ln(p_fd / n_points), the
/// chi-square(2) tail level at which noise-only cells cross with total
/// probability ~p_fd over n_points grid cells.
double presence_threshold(double sigma_thr_sq, double p_fd, std::int64_t n_points);

struct CoarseFracCfo {
  double nu0 = 0.0;   // nu_c + k_m
  double nu_c = 0.0;  // fractional part from the three-bin interpolator
  bool degenerate = false;
};

/// Three-bin frequency interpolator at the coarse peak:
///   Q1 = Y(n,k-1) - Y(n,k+1),  Q2 = 2 Y(n,k) - Y(n,k-1) - Y(n,k+1),
///   nu_c = N/pi atan(tan(pi/N) Re(Q1/Q2))          [Candan-style]
/// Exact on the noiseless Dirichlet-kernel mean. |Q2| below 1e-3 |Y(n,k)|
/// returns nu_c = 0 with the degenerate flag set.
CoarseFracCfo coarse_frac_cfo(const SyncGrid& grid, std::int64_t n_m, int k_m);

/// sigma_thr^2(n) = sigma_x^2 sum_{m<N} |r(n+m)|^2.
double estimate_noise_floor(const BasebandSignal& r, std::int64_t n,
                            double sigma_x_sq, int n_fft);

/// Streaming form of the noise-floor estimate: one add and one subtract per
/// sample advance.
class NoiseFloorTracker {
 public:
  NoiseFloorTracker(const BasebandSignal& r, std::int64_t n0, double sigma_x_sq,
                    int n_fft);
  double value() const { return value_; }
  std::int64_t position() const { return n_; }
  /// Moves from n to n+1.
  void advance();

 private:
  const BasebandSignal* r_;
  std::int64_t n_;
  double sigma_x_sq_;
  int n_fft_;
  double value_;
};

/// Multipath component detection around the coarse lock: scans
/// n in [n_m - n_cp, n_m + n_cp] \ {n_m}, adds n when
///   |Y(n, nu0)|^2 > -sigma_thr^2(n) ln(p_fd / (2 n_cp)),
/// then keeps the strongest candidates that fit a window of n_cp samples
/// (greedy in descending power, n_m always kept). Returns ascending indices.
std::vector<std::int64_t> detect_paths(const BasebandSignal& r,
                                       const PreambleRecord& rp, std::int64_t n_m,
                                       double nu0, double p_fd, int n_cp);

struct FineCfoUpdate {
  double delta = 0.0;
  bool degenerate = false;
};

/// Path-coherent frequency update over the detected set D:
///   delta = N/pi atan(tan(pi/N) Re( sum_D Q1(n,nu) Y*(n,nu)
///                                 / sum_D Q2(n,nu) Y*(n,nu) ))
/// with Q1, Q2 evaluated at real-valued offsets nu-1, nu, nu+1.
FineCfoUpdate fine_cfo_update(const BasebandSignal& r, const PreambleRecord& rp,
                              const std::vector<std::int64_t>& paths,
                              double nu_prev);

/// h_hat(l) = Y(l, nu) / (N sigma_x^2) for each detected path index l; the
/// receiver takes sigma_x^2 from the reference preamble it owns.
std::map<std::int64_t, cplx> initial_channel_estimate(
    const BasebandSignal& r, const PreambleRecord& rp,
    const std::vector<std::int64_t>& paths, double nu);

struct LuisaParams {
  double nu_max = 20.0;  // |nu| bound; k search range is [-ceil, ceil]
  double p_fd = 1e-5;    // false path-detection probability, Eq-18 threshold
  int gamma = 2;         // fine CFO iterations
  DetectionRule rule = DetectionRule::YZCombined;
  int n_cp = 16;
  // Absence/presence gate over the coarse grid; off by default (the Monte
  // Carlo scenarios always contain a frame).
  bool presence_check = false;
  double presence_p_fd = 1e-5;
  // Optional scan-range override (inclusive global window starts); default
  // is every n where a full N-window fits in r.
  std::optional<std::pair<std::int64_t, std::int64_t>> scan;
};

struct SyncResult {
  bool detected = true;
  std::int64_t n_m = 0;
  int k_m = 0;
  bool used_z_metric = false;
  std::vector<double> nu_hat;        // nu_hat[0] = coarse, back() = final
  std::vector<std::int64_t> paths;   // D, ascending
  std::int64_t first_path = 0;       // min D
  std::map<std::int64_t, cplx> channel_estimate;
  bool frac_degenerate = false;

  double final_cfo() const { return nu_hat.empty() ? 0.0 : nu_hat.back(); }
};

/// Full pipeline: coarse time/integer-CFO search, coarse fractional CFO,
/// path detection, gamma fine CFO iterations, initial channel estimate.
SyncResult run_luisa(const BasebandSignal& r, const PreambleRecord& rp,
                     const LuisaParams& params);

}  // namespace ncofdm
