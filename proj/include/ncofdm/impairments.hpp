// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ncofdm/signal.hpp"

namespace ncofdm {

/// Discrete-time multipath channel: tap l multiplies the input delayed by
/// l samples. The EVA sampler normalizes E[sum |h(l)|^2] to 1 over the
/// ensemble.
struct ChannelRealization {
  std::vector<cplx> taps;
  std::string profile_name;

  int length() const { return static_cast<int>(taps.size()); }
  int strongest_tap() const;
  double total_power() const;
};

/// Single-tap unit channel (no fading).
ChannelRealization identity_channel();

enum class InterferenceKind { None, Nbi, Wbi };

struct NbiSpec {
  double center_freq = 24.0;  // normalized frequency, bins
  bool pin_phase = false;     // when false the phase is drawn per frame
  double phase = 0.0;
};

struct WbiSpec {
  std::vector<double> bins;  // fractional-bin tone frequencies
  int symbol_len = 0;        // 0 -> N (block length of the OFDM-like stream)
};

struct ImpairmentConfig {
  int n_fft = 256;      // grid size the normalized frequencies refer to
  double cfo = 0.0;     // nu, normalized to subcarrier spacing
  double snr_db = std::numeric_limits<double>::infinity();  // inf -> noiseless
  InterferenceKind interference = InterferenceKind::None;
  NbiSpec nbi;
  WbiSpec wbi;
  double sir_db = 0.0;          // meaningful when interference != None
  double signal_power = 1.0;    // sigma_x^2 reference for the SNR/SIR ratios

  bool noiseless() const { return std::isinf(snr_db) && snr_db > 0; }
  double noise_power() const {
    return noiseless() ? 0.0 : signal_power * std::pow(10.0, -snr_db / 10.0);
  }
  double interference_power() const {
    return interference == InterferenceKind::None
               ? 0.0
               : signal_power * std::pow(10.0, -sir_db / 10.0);
  }
};

/// Extended Vehicular A tap-delay profile drawn onto the sample grid.
/// Path delays are rounded to the nearest sample and coincident paths merge
/// (their complex Gaussians add, i.e. variances add). Throws if the rounded
/// delay spread exceeds n_cp.
ChannelRealization sample_eva_channel(int n_fft, int n_cp, double sample_rate_hz,
                                      std::uint64_t seed);

/// Linear convolution with the channel taps; length grows by L-1,
/// origin_index is preserved (tap 0 defines timing).
BasebandSignal apply_channel(const BasebandSignal& x, const ChannelRealization& ch);

/// Multiplies sample at global index n by e^{j 2 pi n nu / N}.
BasebandSignal apply_cfo(const BasebandSignal& x, double nu, int n_fft);

/// Complex sinusoid A e^{j(2 pi f n / N + theta)} for n = 0..length-1.
BasebandSignal make_nbi(int length, double center_freq, double amplitude,
                        double phase, int n_fft);

/// OFDM-like wideband interferer: per block of symbol_len samples, fresh
/// QPSK symbols on the given fractional-bin tones. Unit average power.
BasebandSignal make_wbi(int length, const std::vector<double>& bins,
                        int symbol_len, std::uint64_t seed, int n_fft);

/// Full receive model: channel convolution, CFO rotation, scaled
/// interference, complex AWGN with sigma_w^2 = sigma_x^2 10^(-SNR/10).
/// Noise/interference randomness is split off `seed` with fixed stream ids,
/// so a trial is reproducible from one number.
BasebandSignal corrupt(const BasebandSignal& x, const ImpairmentConfig& imp,
                       const ChannelRealization& ch, std::uint64_t seed);

}  // namespace ncofdm
