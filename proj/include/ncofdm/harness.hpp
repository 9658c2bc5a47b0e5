// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncofdm/impairments.hpp"
#include "ncofdm/sync_luisa.hpp"
#include "ncofdm/waveform.hpp"

namespace ncofdm {

enum class AlgorithmId { LuisaSc, LuisaSimple, LuisaYOnly, ScBaseline };

struct Algorithm {
  AlgorithmId id = AlgorithmId::LuisaSc;
  std::string name;  // luisa-sc | luisa-simple | luisa-yonly | sc-baseline
  PreambleKind preamble = PreambleKind::SchmidlCox;
  DetectionRule rule = DetectionRule::YZCombined;
  double nu_max = 20.0;  // >= N/2 selects the full integer range
  int sc_range = 10;     // S&C even-shift search: 2g in [-2*sc_range, 2*sc_range]
};

/// Preset configurations behind the CLI names. Throws on unknown names.
Algorithm algorithm_from_name(const std::string& name);

/// A Monte Carlo experiment: subcarrier plan, interference template, CFO
/// range, channel profile and trial budget. The DSA flavour redraws the
/// interferer frequency and carves the notch per frame.
struct Scenario {
  std::string name;
  SubcarrierMap sc_map;
  bool dsa = false;
  int dsa_notch_width = 45;  // subcarriers removed around the interferer
  int n_fft = 256;
  int n_cp = 16;
  int n_symbols = 11;
  int interframe_gap = 2;
  InterferenceKind interference = InterferenceKind::None;
  NbiSpec nbi;
  WbiSpec wbi;
  double cfo_lo = -3.0, cfo_hi = 3.0;
  std::string channel_profile = "eva";  // "eva" or "awgn" (single unit tap)
  double sample_rate_hz = 3.84e6;       // 256 subcarriers at 15 kHz
  std::int64_t trials = 10000;
  std::uint64_t base_seed = 1;
  double p_fd = 1e-5;
  int gamma = 2;
};

// Subcarrier plans of the three simulated deployments. "gs" keeps a single
// subcarrier between DC and the widened notch, reading the guard insertion
// literally (15 guards into each side of every occupied block); "gs-alt"
// keeps the full {1..16} block for the wider-block reading.
SubcarrierMap map_no_guards();   // {-100..-1, 1..16, 32..100}
SubcarrierMap map_guards();      // {-85..-1, 1, 47..85}
SubcarrierMap map_guards_alt();  // {-85..-1, 1..16, 47..85}
SubcarrierMap map_dsa_initial(); // {-100..-1, 1..100}

/// Presets: nogs | gs | gs-alt | dsa | awgn. Throws on unknown names.
Scenario make_scenario(const std::string& name);

struct SweepCell {
  double snr_db = 0.0;
  double sir_db = std::numeric_limits<double>::infinity();  // inf -> no interference
};

struct TrialRecord {
  std::int64_t trial_id = 0;
  std::string algorithm;
  double snr_db = 0, sir_db = 0;
  std::int64_t true_timing = 0;
  double true_cfo = 0;
  std::int64_t est_timing = 0;
  double est_cfo = 0;
  bool success = false;
  bool detected = true;
  std::int64_t n_m = 0;
  int k_m = 0;
  bool used_z = false;
};

struct CellMetrics {
  std::string algorithm;
  double snr_db = 0, sir_db = 0;
  std::int64_t trials = 0, errors = 0;
  double p_err = 0, p_err_ci_lo = 0, p_err_ci_hi = 0;
  double time_mse_all = 0, time_mse_ok = 0;
  double freq_mse_all = 0, freq_mse_ok = 0;
};

struct MetricsReport {
  std::string scenario;
  std::vector<CellMetrics> cells;
  std::vector<TrialRecord> trials;
  bool keep_trials = true;  // false drops per-trial rows (large sweeps)
};

/// 95% Wilson score interval for errors/trials.
std::pair<double, double> wilson_ci(std::int64_t errors, std::int64_t trials);

/// Runs every (cell, trial, algorithm) combination. Trials are independent
/// and scheduled over a worker pool; seeds are pre-assigned per trial, so
/// the report is identical for any thread count. All algorithms of one
/// preamble kind see the identical received signal within a trial.
MetricsReport run_scenario(const Scenario& s, const std::vector<Algorithm>& algos,
                           const std::vector<SweepCell>& sweep,
                           bool keep_trials = true);

/// Writes metrics.csv and trials.csv.gz under out_dir (created if needed).
/// Output is byte-stable for a fixed report.
void emit_report(const MetricsReport& report, const std::string& out_dir);

/// Worker pool width: min(hardware, NCOFDM_SYNC_THREADS if set).
int worker_threads();

}  // namespace ncofdm
