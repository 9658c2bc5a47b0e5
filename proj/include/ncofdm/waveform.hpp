// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <cstdint>
#include <vector>

#include "ncofdm/signal.hpp"

namespace ncofdm {

enum class PreambleKind { SchmidlCox, Simple };

/// The occupied-subcarrier index sets of an NC-OFDM system over an N-bin
/// grid. Indices live in [-N/2, N/2-1] and map to FFT bins as k mod N.
struct SubcarrierMap {
  int n_fft = 0;
  std::vector<int> occupied;           // I, strictly ascending
  std::vector<int> preamble_occupied;  // I_RP subset of I, strictly ascending

  int alpha() const { return static_cast<int>(occupied.size()); }

  /// Per-sample signal power sigma_x^2 for unit-power data symbols.
  double signal_power() const { return static_cast<double>(alpha()) / n_fft; }

  /// Throws std::invalid_argument on malformed sets; warns once on stderr
  /// when 8 <= alpha < 32 (the Gaussian approximation of the time samples
  /// gets shaky for small occupancy).
  void validate() const;
};

struct FrameConfig {
  SubcarrierMap map;
  int n_cp = 0;
  int n_symbols = 1;  // P, preamble included
  PreambleKind preamble_kind = PreambleKind::SchmidlCox;
  int interframe_gap = 0;  // empty OFDM symbols preceding the frame

  int symbol_len() const { return map.n_fft + n_cp; }
  void validate() const;
};

/// Frequency- and time-domain reference preamble.
///
/// freq_symbols is length N in FFT bin order, zero off I_RP. time_samples is
/// the post-CP body (length N). For the S&C kind only even members of I are
/// modulated and the symbols carry a sqrt(2) amplitude scale, so the
/// time-domain power matches a data symbol; the two halves of time_samples
/// are then identical. power is the per-sample power sigma_x^2.
struct PreambleRecord {
  std::vector<cplx> freq_symbols;
  std::vector<cplx> time_samples;
  PreambleKind kind = PreambleKind::SchmidlCox;
  double power = 0.0;
};

/// count pseudo-random QPSK symbols; deterministic in seed, unit power.
std::vector<cplx> qpsk_symbols(int count, std::uint64_t seed);

/// Builds the reference preamble for cfg. Throws "empty preamble support"
/// if the S&C kind finds no even index in I.
PreambleRecord make_preamble(const FrameConfig& cfg, std::uint64_t seed);

/// One OFDM symbol: 1/sqrt(N)-scaled IDFT of freq_symbols (length N, FFT
/// bin order) with an n_cp-sample cyclic prefix in front. Output length
/// n_cp + N.
std::vector<cplx> modulate_symbol(const std::vector<cplx>& freq_symbols, int n_cp);

/// Full transmit frame: interframe_gap empty symbols, the preamble symbol,
/// then P-1 random-QPSK data symbols. origin_index is set so that global
/// index 0 is the first post-CP preamble sample.
BasebandSignal assemble_frame(const FrameConfig& cfg, std::uint64_t data_seed,
                              const PreambleRecord& preamble);

}  // namespace ncofdm
