// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include "ncofdm/impairments.hpp"

#include <cmath>
#include <stdexcept>

#include "ncofdm/rng.hpp"

namespace ncofdm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Extended Vehicular A (3GPP TS 36.101 annex B): excess tap delays in ns and
// relative powers in dB.
constexpr double kEvaDelayNs[] = {0, 30, 150, 310, 370, 710, 1090, 1730, 2510};
constexpr double kEvaPowerDb[] = {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9};
constexpr int kEvaPaths = 9;
}  // namespace

int ChannelRealization::strongest_tap() const {
  int best = 0;
  double best_p = -1.0;
  for (int l = 0; l < length(); ++l) {
    double p = std::norm(taps[l]);
    if (p > best_p) {
      best_p = p;
      best = l;
    }
  }
  return best;
}

double ChannelRealization::total_power() const {
  double p = 0.0;
  for (const cplx& t : taps) p += std::norm(t);
  return p;
}

ChannelRealization identity_channel() {
  return ChannelRealization{{cplx{1.0, 0.0}}, "identity"};
}

ChannelRealization sample_eva_channel(int n_fft, int n_cp, double sample_rate_hz,
                                      std::uint64_t seed) {
  if (sample_rate_hz <= 0) throw std::invalid_argument("sample_eva_channel: bad rate");
  if (n_fft < 2 || n_cp < 0 || n_cp >= n_fft)
    throw std::invalid_argument("sample_eva_channel: bad dimensions");

  // Delay rounded to the nearest sample; powers of merged paths add.
  int max_slot = 0;
  int slot[kEvaPaths];
  double var[kEvaPaths];
  for (int p = 0; p < kEvaPaths; ++p) {
    slot[p] = static_cast<int>(std::lround(kEvaDelayNs[p] * 1e-9 * sample_rate_hz));
    var[p] = std::pow(10.0, kEvaPowerDb[p] / 10.0);
    if (slot[p] > max_slot) max_slot = slot[p];
  }
  if (max_slot > n_cp)
    throw std::invalid_argument("sample_eva_channel: delay spread exceeds n_cp");

  std::vector<double> slot_var(max_slot + 1, 0.0);
  double total = 0.0;
  for (int p = 0; p < kEvaPaths; ++p) {
    slot_var[slot[p]] += var[p];
    total += var[p];
  }

  ChannelRealization ch;
  ch.profile_name = "eva";
  ch.taps.assign(max_slot + 1, cplx{0.0, 0.0});
  Rng rng(seed);
  for (int l = 0; l <= max_slot; ++l)
    if (slot_var[l] > 0.0) ch.taps[l] = rng.cgaussian(slot_var[l] / total);
  return ch;
}

BasebandSignal apply_channel(const BasebandSignal& x, const ChannelRealization& ch) {
  const int L = ch.length();
  if (L < 1) throw std::invalid_argument("apply_channel: empty channel");
  BasebandSignal out;
  out.origin_index = x.origin_index;
  out.samples.assign(x.samples.size() + L - 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    const cplx xi = x.samples[i];
    for (int l = 0; l < L; ++l) out.samples[i + l] += xi * ch.taps[l];
  }
  return out;
}

BasebandSignal apply_cfo(const BasebandSignal& x, double nu, int n_fft) {
  BasebandSignal out = x;
  const double step = kTwoPi * nu / n_fft;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    double a = step * static_cast<double>(out.origin_index + static_cast<std::int64_t>(i));
    out.samples[i] *= cplx{std::cos(a), std::sin(a)};
  }
  return out;
}

BasebandSignal make_nbi(int length, double center_freq, double amplitude,
                        double phase, int n_fft) {
  if (length < 1) throw std::invalid_argument("make_nbi: length < 1");
  BasebandSignal out;
  out.origin_index = 0;
  out.samples.resize(length);
  const double step = kTwoPi * center_freq / n_fft;
  for (int n = 0; n < length; ++n) {
    double a = step * n + phase;
    out.samples[n] = amplitude * cplx{std::cos(a), std::sin(a)};
  }
  return out;
}

namespace {

// One WBI sample at absolute index n. Each block of sym_len samples carries
// fresh QPSK symbols on every tone; block seeds are derived from the stream
// seed so blocks are addressable in any order.
void wbi_fill(cplx* out, std::int64_t start, std::int64_t count,
              const std::vector<double>& bins, int sym_len, std::uint64_t seed,
              int n_fft) {
  const double amp = 1.0 / std::sqrt(static_cast<double>(bins.size()));
  std::int64_t n = start;
  std::int64_t left = count;
  while (left > 0) {
    std::int64_t block = n >= 0 ? n / sym_len : -((-n + sym_len - 1) / sym_len);
    std::int64_t block_start = block * sym_len;
    std::int64_t run = std::min<std::int64_t>(block_start + sym_len - n, left);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(block)));
    for (std::size_t t = 0; t < bins.size(); ++t) {
      const cplx c = amp * rng.qpsk();
      const double step = kTwoPi * bins[t] / n_fft;
      for (std::int64_t i = 0; i < run; ++i) {
        double a = step * static_cast<double>(n + i);
        out[n + i - start] += c * cplx{std::cos(a), std::sin(a)};
      }
    }
    n += run;
    left -= run;
  }
}

}  // namespace

BasebandSignal make_wbi(int length, const std::vector<double>& bins, int symbol_len,
                        std::uint64_t seed, int n_fft) {
  if (length < 1) throw std::invalid_argument("make_wbi: length < 1");
  if (bins.empty()) throw std::invalid_argument("make_wbi: empty tone set");
  const int sym = symbol_len > 0 ? symbol_len : n_fft;
  BasebandSignal out;
  out.origin_index = 0;
  out.samples.assign(length, cplx{0.0, 0.0});
  wbi_fill(out.samples.data(), 0, length, bins, sym, seed, n_fft);
  return out;
}

BasebandSignal corrupt(const BasebandSignal& x, const ImpairmentConfig& imp,
                       const ChannelRealization& ch, std::uint64_t seed) {
  BasebandSignal r = apply_cfo(apply_channel(x, ch), imp.cfo, imp.n_fft);

  if (imp.interference == InterferenceKind::Nbi) {
    if (imp.nbi.center_freq < -imp.n_fft / 2.0 || imp.nbi.center_freq >= imp.n_fft / 2.0)
      throw std::invalid_argument("corrupt: NBI center outside [-N/2, N/2)");
    const double amplitude = std::sqrt(imp.interference_power());
    double phase = imp.nbi.phase;
    if (!imp.nbi.pin_phase) {
      Rng rng(derive_seed(seed, SeedStream::InterferencePhase));
      phase = rng.uniform(0.0, kTwoPi);
    }
    const double step = kTwoPi * imp.nbi.center_freq / imp.n_fft;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      double a = step * static_cast<double>(r.origin_index + static_cast<std::int64_t>(i)) + phase;
      r.samples[i] += amplitude * cplx{std::cos(a), std::sin(a)};
    }
  } else if (imp.interference == InterferenceKind::Wbi) {
    if (imp.wbi.bins.empty()) throw std::invalid_argument("corrupt: WBI with no tones");
    const int sym = imp.wbi.symbol_len > 0 ? imp.wbi.symbol_len : imp.n_fft;
    // Interferer symbol clock is independent of the victim frame: shift its
    // timeline by a per-trial offset.
    Rng off_rng(derive_seed(seed, SeedStream::WbiOffset));
    const std::int64_t offset =
        static_cast<std::int64_t>(off_rng.uniform01() * sym) % sym;
    std::vector<cplx> w(r.samples.size(), cplx{0.0, 0.0});
    wbi_fill(w.data(), r.origin_index + offset, static_cast<std::int64_t>(w.size()),
             imp.wbi.bins, sym, derive_seed(seed, SeedStream::WbiSymbols), imp.n_fft);
    const double scale = std::sqrt(imp.interference_power());
    for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] += scale * w[i];
  }

  const double sigma_w_sq = imp.noise_power();
  if (sigma_w_sq > 0.0) {
    Rng rng(derive_seed(seed, SeedStream::Noise));
    for (auto& s : r.samples) s += rng.cgaussian(sigma_w_sq);
  }
  return r;
}

}  // namespace ncofdm
