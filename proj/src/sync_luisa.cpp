// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include "ncofdm/sync_luisa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ncofdm/fft.hpp"

namespace ncofdm {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInvSqrt2 = 0.7071067811865475244;

// Relative |Q2| level below which the three-bin interpolator is treated as
// degenerate (pathological noise draws can null the curvature term).
constexpr double kQ2Guard = 1e-3;
}  // namespace

std::size_t SyncGrid::col(int k) const {
  if (full_range_) return static_cast<std::size_t>(wrap_bin(k, n_fft_));
  return static_cast<std::size_t>(k + k_search_ + 1);
}

std::size_t SyncGrid::z_col(int k) const {
  if (full_range_) return static_cast<std::size_t>(wrap_bin(k, n_fft_));
  return static_cast<std::size_t>(k + k_search_);
}

SyncGrid compute_sync_grid(const BasebandSignal& r, const PreambleRecord& rp,
                           std::int64_t n_lo, std::int64_t n_hi, int k_search,
                           bool with_z) {
  const int n_fft = static_cast<int>(rp.time_samples.size());
  if (n_fft < 2) throw std::invalid_argument("compute_sync_grid: empty preamble");
  if (n_hi < n_lo) throw std::invalid_argument("compute_sync_grid: empty scan range");
  if (!r.in_range(n_lo, n_fft) || !r.in_range(n_hi, n_fft))
    throw std::invalid_argument("compute_sync_grid: scan range outside signal");
  if (k_search < 0) throw std::invalid_argument("compute_sync_grid: negative k range");

  SyncGrid g;
  g.n_lo_ = n_lo;
  g.n_hi_ = n_hi;
  g.n_fft_ = n_fft;
  g.full_range_ = (2 * k_search + 1 >= n_fft);
  g.k_search_ = g.full_range_ ? n_fft / 2 : k_search;
  g.has_z_ = with_z;
  g.stride_ = g.full_range_ ? static_cast<std::size_t>(n_fft)
                            : static_cast<std::size_t>(2 * k_search + 3);
  g.z_stride_ = g.full_range_ ? static_cast<std::size_t>(n_fft)
                              : static_cast<std::size_t>(2 * k_search);

  const std::size_t rows = static_cast<std::size_t>(n_hi - n_lo + 1);
  g.values_.resize(rows * g.stride_);
  if (with_z) g.z_values_.resize(rows * g.z_stride_);

  std::vector<cplx> xc(n_fft);
  for (int m = 0; m < n_fft; ++m) xc[m] = std::conj(rp.time_samples[m]);

  FftPlan plan(n_fft);
  std::vector<cplx> buf(n_fft);
  const cplx half_bin = std::polar(1.0, -kPi / n_fft);

  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    const double* w = reinterpret_cast<const double*>(r.window(n));
    const double* x = reinterpret_cast<const double*>(xc.data());
    double* b = reinterpret_cast<double*>(buf.data());
    for (int m = 0; m < 2 * n_fft; m += 2) {
      b[m] = w[m] * x[m] - w[m + 1] * x[m + 1];
      b[m + 1] = w[m] * x[m + 1] + w[m + 1] * x[m];
    }
    plan.forward(buf.data());

    cplx* row = g.values_.data() + g.row(n) * g.stride_;
    if (g.full_range_) {
      std::copy(buf.begin(), buf.end(), row);
    } else {
      for (int k = -k_search - 1; k <= k_search + 1; ++k)
        row[g.col(k)] = buf[wrap_bin(k, n_fft)];
    }
    if (with_z) {
      cplx* zrow = g.z_values_.data() + g.row(n) * g.z_stride_;
      for (int k = g.z_k_min(); k <= g.z_k_max(); ++k)
        zrow[g.z_col(k)] = (row[g.col(k)] - row[g.col(k + 1)] * half_bin) * kInvSqrt2;
    }
  }
  return g;
}

std::vector<cplx> sync_variable(const BasebandSignal& r, const PreambleRecord& rp,
                                std::int64_t n, const std::vector<int>& ks) {
  const int n_fft = static_cast<int>(rp.time_samples.size());
  if (!r.in_range(n, n_fft))
    throw std::out_of_range("sync_variable: window outside signal");

  std::vector<cplx> buf(n_fft);
  const cplx* w = r.window(n);
  for (int m = 0; m < n_fft; ++m) buf[m] = w[m] * std::conj(rp.time_samples[m]);
  FftPlan(n_fft).forward(buf.data());

  std::vector<cplx> out(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) out[i] = buf[wrap_bin(ks[i], n_fft)];
  return out;
}

cplx sync_variable_at(const BasebandSignal& r, const PreambleRecord& rp,
                      std::int64_t n, double k) {
  const int n_fft = static_cast<int>(rp.time_samples.size());
  if (!r.in_range(n, n_fft))
    throw std::out_of_range("sync_variable_at: window outside signal");

  const cplx* w = r.window(n);
  const cplx step = std::polar(1.0, -kTwoPi * k / n_fft);
  cplx ph{1.0, 0.0};
  cplx acc{0.0, 0.0};
  for (int m = 0; m < n_fft; ++m) {
    acc += w[m] * std::conj(rp.time_samples[m]) * ph;
    ph *= step;
  }
  return acc;
}

cplx sync_variable_freq(const std::vector<cplx>& r_window_dft,
                        const std::vector<cplx>& preamble_symbols, int k) {
  const int n_fft = static_cast<int>(preamble_symbols.size());
  if (static_cast<int>(r_window_dft.size()) != n_fft)
    throw std::invalid_argument("sync_variable_freq: size mismatch");
  cplx acc{0.0, 0.0};
  for (int k1 = 0; k1 < n_fft; ++k1) {
    const cplx& d = preamble_symbols[k1];
    if (d == cplx{0.0, 0.0}) continue;
    acc += std::conj(d) * r_window_dft[wrap_bin(k + k1, n_fft)];
  }
  return acc / std::sqrt(static_cast<double>(n_fft));
}

namespace {

struct ArgmaxState {
  double value = -1.0;
  std::int64_t n = 0;
  int k = 0;
  bool set = false;

  void offer(double v, std::int64_t nn, int kk) {
    if (!set || v > value ||
        (v == value && (nn < n || (nn == n && std::abs(kk) < std::abs(k))))) {
      value = v;
      n = nn;
      k = kk;
      set = true;
    }
  }
};

}  // namespace

CoarsePoint coarse_detect(const SyncGrid& grid, DetectionRule rule) {
  ArgmaxState best_y;
  for (std::int64_t n = grid.n_lo(); n <= grid.n_hi(); ++n)
    for (int k = grid.y_k_min(); k <= grid.y_k_max(); ++k)
      best_y.offer(std::norm(grid.y(n, k)), n, k);

  CoarsePoint out;
  if (rule == DetectionRule::YOnly || !grid.has_z()) {
    out.n_m = best_y.n;
    out.k_m = best_y.k;
    out.peak_power = best_y.value;
    return out;
  }

  ArgmaxState best_z;
  for (std::int64_t n = grid.n_lo(); n <= grid.n_hi(); ++n)
    for (int k = grid.z_k_min(); k <= grid.z_k_max(); ++k)
      best_z.offer(std::norm(grid.z(n, k)), n, k);

  if (best_z.value > best_y.value) {
    out.used_z_metric = true;
    out.n_m = best_z.n;
    out.k_m = best_z.k;
    out.peak_power = best_z.value;
    // The pair metric cannot tell k_Z from k_Z+1; pick the stronger Y bin.
    if (std::norm(grid.y(best_z.n, best_z.k + 1)) > std::norm(grid.y(best_z.n, best_z.k)))
      out.k_m = best_z.k + 1;
  } else {
    out.n_m = best_y.n;
    out.k_m = best_y.k;
    out.peak_power = best_y.value;
  }
  return out;
}

double presence_threshold(double sigma_thr_sq, double p_fd, std::int64_t n_points) {
  if (!(p_fd > 0.0) || p_fd > 1.0)
    throw std::domain_error("presence_threshold: p_fd outside (0, 1]");
  if (n_points < 1) throw std::domain_error("presence_threshold: n_points < 1");
  return -sigma_thr_sq * std::log(p_fd / static_cast<double>(n_points));
}

CoarseFracCfo coarse_frac_cfo(const SyncGrid& grid, std::int64_t n_m, int k_m) {
  const int n_fft = grid.n_fft();
  const cplx y0 = grid.y(n_m, k_m);
  const cplx ym = grid.y(n_m, k_m - 1);
  const cplx yp = grid.y(n_m, k_m + 1);
  const cplx q1 = ym - yp;
  const cplx q2 = 2.0 * y0 - ym - yp;

  CoarseFracCfo out;
  if (std::abs(q2) < kQ2Guard * std::abs(y0)) {
    out.degenerate = true;
    out.nu_c = 0.0;
  } else {
    out.nu_c = n_fft / kPi * std::atan(std::tan(kPi / n_fft) * std::real(q1 / q2));
  }
  out.nu0 = out.nu_c + k_m;
  return out;
}

double estimate_noise_floor(const BasebandSignal& r, std::int64_t n,
                            double sigma_x_sq, int n_fft) {
  if (!r.in_range(n, n_fft))
    throw std::out_of_range("estimate_noise_floor: window outside signal");
  const cplx* w = r.window(n);
  double acc = 0.0;
  for (int m = 0; m < n_fft; ++m) acc += std::norm(w[m]);
  return sigma_x_sq * acc;
}

NoiseFloorTracker::NoiseFloorTracker(const BasebandSignal& r, std::int64_t n0,
                                     double sigma_x_sq, int n_fft)
    : r_(&r), n_(n0), sigma_x_sq_(sigma_x_sq), n_fft_(n_fft) {
  value_ = estimate_noise_floor(r, n0, sigma_x_sq, n_fft);
}

void NoiseFloorTracker::advance() {
  if (!r_->in_range(n_ + 1, n_fft_))
    throw std::out_of_range("NoiseFloorTracker: advanced outside signal");
  ++n_;
  value_ += sigma_x_sq_ *
            (std::norm(r_->at_global(n_ + n_fft_ - 1)) - std::norm(r_->at_global(n_ - 1)));
}

std::vector<std::int64_t> detect_paths(const BasebandSignal& r,
                                       const PreambleRecord& rp, std::int64_t n_m,
                                       double nu0, double p_fd, int n_cp) {
  const int n_fft = static_cast<int>(rp.time_samples.size());
  const double log_term = std::log(p_fd / (2.0 * n_cp));

  struct Cand {
    std::int64_t n;
    double power;
  };
  std::vector<Cand> cands;
  cands.reserve(2 * n_cp + 1);

  for (std::int64_t n = n_m - n_cp; n <= n_m + n_cp; ++n) {
    if (!r.in_range(n, n_fft)) continue;
    const double power = std::norm(sync_variable_at(r, rp, n, nu0));
    if (n == n_m) {
      cands.push_back({n, power});
      continue;
    }
    const double floor = estimate_noise_floor(r, n, rp.power, n_fft);
    if (power > -floor * log_term) cands.push_back({n, power});
  }

  // Strongest components that fit a window of n_cp samples; the coarse lock
  // is kept unconditionally, the rest greedily in descending power.
  std::stable_sort(cands.begin(), cands.end(), [n_m](const Cand& a, const Cand& b) {
    if ((a.n == n_m) != (b.n == n_m)) return a.n == n_m;
    if (a.power != b.power) return a.power > b.power;
    return a.n < b.n;
  });

  std::vector<std::int64_t> picked;
  std::int64_t lo = n_m, hi = n_m;
  for (const Cand& c : cands) {
    const std::int64_t new_lo = std::min(lo, c.n);
    const std::int64_t new_hi = std::max(hi, c.n);
    if (new_hi - new_lo <= n_cp) {
      picked.push_back(c.n);
      lo = new_lo;
      hi = new_hi;
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

FineCfoUpdate fine_cfo_update(const BasebandSignal& r, const PreambleRecord& rp,
                              const std::vector<std::int64_t>& paths,
                              double nu_prev) {
  if (paths.empty()) throw std::invalid_argument("fine_cfo_update: empty path set");
  const int n_fft = static_cast<int>(rp.time_samples.size());

  cplx num{0.0, 0.0}, den{0.0, 0.0};
  double scale = 0.0;
  for (std::int64_t n : paths) {
    const cplx y = sync_variable_at(r, rp, n, nu_prev);
    const cplx ym = sync_variable_at(r, rp, n, nu_prev - 1.0);
    const cplx yp = sync_variable_at(r, rp, n, nu_prev + 1.0);
    num += (ym - yp) * std::conj(y);
    den += (2.0 * y - ym - yp) * std::conj(y);
    scale += std::norm(y);
  }

  FineCfoUpdate out;
  if (std::abs(den) < kQ2Guard * scale) {
    out.degenerate = true;
    return out;
  }
  out.delta = n_fft / kPi * std::atan(std::tan(kPi / n_fft) * std::real(num / den));
  return out;
}

std::map<std::int64_t, cplx> initial_channel_estimate(
    const BasebandSignal& r, const PreambleRecord& rp,
    const std::vector<std::int64_t>& paths, double nu) {
  const int n_fft = static_cast<int>(rp.time_samples.size());
  std::map<std::int64_t, cplx> est;
  for (std::int64_t l : paths)
    est[l] = sync_variable_at(r, rp, l, nu) / (n_fft * rp.power);
  return est;
}

SyncResult run_luisa(const BasebandSignal& r, const PreambleRecord& rp,
                     const LuisaParams& params) {
  const int n_fft = static_cast<int>(rp.time_samples.size());
  std::int64_t lo = r.begin_index();
  std::int64_t hi = r.end_index() - n_fft;
  if (params.scan) {
    lo = std::max(lo, params.scan->first);
    hi = std::min(hi, params.scan->second);
  }
  if (hi < lo) throw std::invalid_argument("run_luisa: signal shorter than one window");

  const int k_search = static_cast<int>(std::ceil(params.nu_max));
  SyncGrid grid = compute_sync_grid(r, rp, lo, hi, k_search,
                                    params.rule == DetectionRule::YZCombined);

  SyncResult res;
  const CoarsePoint coarse = coarse_detect(grid, params.rule);
  res.n_m = coarse.n_m;
  res.k_m = coarse.k_m;
  res.used_z_metric = coarse.used_z_metric;

  if (params.presence_check) {
    const std::int64_t k_count = grid.full_range() ? n_fft : 2 * k_search + 1;
    const std::int64_t n_points = (hi - lo + 1) * k_count;
    bool crossed = false;
    NoiseFloorTracker floor(r, lo, rp.power, n_fft);
    for (std::int64_t n = lo; n <= hi && !crossed; ++n) {
      const double thr = presence_threshold(floor.value(), params.presence_p_fd, n_points);
      for (int k = grid.y_k_min(); k <= grid.y_k_max(); ++k) {
        if (std::norm(grid.y(n, k)) > thr) {
          crossed = true;
          break;
        }
      }
      if (n < hi) floor.advance();
    }
    if (!crossed) {
      res.detected = false;
      res.first_path = res.n_m;
      return res;
    }
  }

  const CoarseFracCfo frac = coarse_frac_cfo(grid, res.n_m, res.k_m);
  res.frac_degenerate = frac.degenerate;
  res.nu_hat.push_back(frac.nu0);

  res.paths = detect_paths(r, rp, res.n_m, frac.nu0, params.p_fd, params.n_cp);
  res.first_path = res.paths.empty() ? res.n_m : res.paths.front();

  for (int it = 0; it < params.gamma; ++it) {
    const FineCfoUpdate upd = fine_cfo_update(r, rp, res.paths, res.nu_hat.back());
    res.nu_hat.push_back(res.nu_hat.back() + upd.delta);
  }

  res.channel_estimate =
      initial_channel_estimate(r, rp, res.paths, res.nu_hat.back());
  return res;
}

}  // namespace ncofdm
