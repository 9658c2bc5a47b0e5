// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors
//
// Acceptance suite: end-to-end checks of the synchronizer against its
// closed-form statistics and the Monte Carlo operating points, one line of
// verdict per criterion. Expect a total runtime in the tens of minutes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ncofdm/analytic.hpp"
#include "ncofdm/fft.hpp"
#include "ncofdm/harness.hpp"
#include "ncofdm/impairments.hpp"
#include "ncofdm/rng.hpp"
#include "ncofdm/sync_baseline_sc.hpp"
#include "ncofdm/sync_luisa.hpp"
#include "ncofdm/waveform.hpp"
#include "test_helpers.hpp"

using namespace ncofdm;
namespace an = ncofdm::analytic;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Verdict {
  bool pass = false;
  std::string detail;
};

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

FrameConfig frame_cfg(PreambleKind kind, int n_symbols = 3, int gap = 1,
                      int n_cp = 16) {
  FrameConfig cfg;
  cfg.map = map_no_guards();
  cfg.n_cp = n_cp;
  cfg.n_symbols = n_symbols;
  cfg.interframe_gap = gap;
  cfg.preamble_kind = kind;
  return cfg;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------- C1
// Time-domain vs frequency-domain synchronization variable on randomized
// signals, 1e-9 relative, under one second.
Verdict criterion1() {
  const double t0 = now_seconds();
  auto cfg = frame_cfg(PreambleKind::SchmidlCox);
  auto rp_sc = make_preamble(cfg, 11);
  cfg.preamble_kind = PreambleKind::Simple;
  auto rp_simple = make_preamble(cfg, 12);

  Rng rng(13);
  BasebandSignal r;
  r.origin_index = -100;
  r.samples.resize(900);
  for (auto& s : r.samples) s = rng.cgaussian(1.0);

  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const PreambleRecord& rp = (t % 2 == 0) ? rp_sc : rp_simple;
    const std::int64_t n = -100 + static_cast<std::int64_t>(rng.uniform01() * 500);
    const int k = static_cast<int>(rng.uniform(-128, 128));
    std::vector<cplx> w(r.window(n), r.window(n) + 256);
    const cplx time_route = sync_variable(r, rp, n, {k})[0];
    const cplx freq_route = sync_variable_freq(fft(w), rp.freq_symbols, k);
    worst = std::max(worst, std::abs(time_route - freq_route) / std::abs(time_route));
  }
  const double dt = now_seconds() - t0;
  return {worst < 1e-9 && dt < 1.0,
          fmt("max rel err %.2e over 100 cases, %.2f s", worst, dt)};
}

// ---------------------------------------------------------------- C2
// Closed-form moments of the path components, validated on the waveform
// model they are derived for (independent Gaussian samples with the CP /
// repeated-half structure): mean within 3 SE, variance within 5%, for
// every alignment case, applicable preamble kind and nu in {0, .25, .5}.
Verdict criterion2() {
  const int N = 256, NCP = 16, trials = 10000;
  struct Setup {
    an::CorrelationCase c;
    PreambleKind kind;
    std::int64_t off;
    const char* label;
  };
  // 'otherwise' offsets avoid windows where the repeated-half structure
  // correlates with itself (outside the Table's model).
  const Setup setups[] = {
      {an::CorrelationCase::A, PreambleKind::Simple, -N, "A/simple"},
      {an::CorrelationCase::A, PreambleKind::SchmidlCox, -N, "A/sc"},
      {an::CorrelationCase::B, PreambleKind::SchmidlCox, -N / 2, "B/sc"},
      {an::CorrelationCase::C, PreambleKind::Simple, 0, "C/simple"},
      {an::CorrelationCase::C, PreambleKind::SchmidlCox, 0, "C/sc"},
      {an::CorrelationCase::D, PreambleKind::SchmidlCox, N / 2, "D/sc"},
      {an::CorrelationCase::Otherwise, PreambleKind::Simple, -N / 4, "oth/simple"},
      {an::CorrelationCase::Otherwise, PreambleKind::SchmidlCox, -160, "oth/sc-"},
      {an::CorrelationCase::Otherwise, PreambleKind::SchmidlCox, 160, "oth/sc+"},
  };

  double worst_mean_se = 0, worst_var_rel = 0;
  std::string worst_at = "-";
  bool pass = true;
  for (double nu : {0.0, 0.25, 0.5}) {
    for (const Setup& su : setups) {
      cplx sum{0, 0};
      double power = 0;
      for (int t = 0; t < trials; ++t) {
        auto [tx, rp] = ncofdm::testing::model_gaussian_frame(
            su.kind, derive_seed(2000 + static_cast<int>(nu * 8), t), N, NCP, 2, 3);
        ImpairmentConfig imp;
        imp.n_fft = N;
        imp.cfo = nu;
        auto r = corrupt(tx, imp, identity_channel(), 1);
        const cplx y = sync_variable_at(r, rp, su.off, 0.0);
        sum += y;
        power += std::norm(y);
      }
      const cplx mean = sum / double(trials);
      const double var = power / trials - std::norm(mean);
      const auto pred = an::path_component_moments(su.c, su.kind, su.off, 0, 0.0,
                                                   nu, N, NCP, 1.0);
      const double se = std::sqrt(pred.variance / trials);
      const double mean_se = std::abs(mean - pred.mean) / se;
      const double var_rel = std::abs(var - pred.variance) / pred.variance;
      if (mean_se > worst_mean_se) {
        worst_mean_se = mean_se;
        worst_at = fmt("%s nu=%.2f", su.label, nu);
      }
      worst_var_rel = std::max(worst_var_rel, var_rel);
      if (mean_se > 3.0 || var_rel > 0.05) pass = false;
    }
  }
  return {pass, fmt("worst mean dev %.2f SE (%s), worst var dev %.1f%% "
                    "(27 case/kind/nu combinations, 1e4 seeds each)",
                    worst_mean_se, worst_at.c_str(), 100 * worst_var_rel)};
}

// ---------------------------------------------------------------- C3
// Peak geometry: exact sigma_x^4 N^2 peak at nu = k; about 40% of it at
// half-bin offset, about 80% for the pair metric (each +-2%).
Verdict criterion3() {
  const int N = 256;
  auto cfg = frame_cfg(PreambleKind::SchmidlCox);
  bool pass = true;
  std::string detail;

  // exact per-realization peak
  double worst_peak = 0;
  for (int t = 0; t < 20; ++t) {
    auto rp = make_preamble(cfg, derive_seed(3000, t));
    ImpairmentConfig imp;
    imp.n_fft = N;
    auto r = corrupt(assemble_frame(cfg, derive_seed(3001, t), rp), imp,
                     identity_channel(), 1);
    const double peak = std::norm(sync_variable(r, rp, 0, {0})[0]);
    const double want = std::pow(N * rp.power, 2.0);
    worst_peak = std::max(worst_peak, std::abs(peak - want) / want);
  }
  pass = pass && worst_peak < 0.02;

  // ensemble mean of Y and Z at nu = 0.5 (the half-bin worst case)
  const int trials = 4000;
  cplx sum_y{0, 0}, sum_z{0, 0};
  double sx2 = 0;
  const cplx half_bin = std::polar(1.0, -M_PI / N);
  for (int t = 0; t < trials; ++t) {
    auto rp = make_preamble(cfg, derive_seed(3100, t));
    ImpairmentConfig imp;
    imp.n_fft = N;
    imp.cfo = 0.5;
    auto r = corrupt(assemble_frame(cfg, derive_seed(3101, t), rp), imp,
                     identity_channel(), 1);
    auto y = sync_variable(r, rp, 0, {0, 1});
    sum_y += y[0];
    sum_z += (y[0] - y[1] * half_bin) / std::sqrt(2.0);
    sx2 = rp.power;
  }
  const double peak = std::pow(N * sx2, 2.0);
  const double ratio_y = std::norm(sum_y / double(trials)) / peak;
  const double ratio_z = std::norm(sum_z / double(trials)) / peak;
  const double want_y = 4.0 / (M_PI * M_PI);        // ~0.405
  const double want_z = 8.0 / (M_PI * M_PI);        // ~0.81
  pass = pass && std::abs(ratio_y - want_y) / want_y < 0.02;
  pass = pass && std::abs(ratio_z - want_z) / want_z < 0.02;
  return {pass, fmt("peak exact to %.1e; |Y|^2 at half bin %.4f (want %.4f), "
                    "|Z|^2 %.4f (want %.4f)",
                    worst_peak, ratio_y, want_y, ratio_z, want_z)};
}

// ---------------------------------------------------------------- C4
// Idealistic S&C run (N_CP = N/4, no noise, nu = 0): exactly four local
// maxima of mean |Y(n,0)|^2, at offsets -N, -N/2, 0, N/2.
Verdict criterion4() {
  const int N = 256, NCP = 64;
  auto cfg = frame_cfg(PreambleKind::SchmidlCox, 3, 2, NCP);
  const std::int64_t lo = -340, hi = 200;
  std::vector<double> mean_power(hi - lo + 1, 0.0);

  const int seeds = 200;
  for (int t = 0; t < seeds; ++t) {
    auto rp = make_preamble(cfg, derive_seed(4000, t));
    ImpairmentConfig imp;
    imp.n_fft = N;
    auto r = corrupt(assemble_frame(cfg, derive_seed(4001, t), rp), imp,
                     identity_channel(), 1);
    SyncGrid grid = compute_sync_grid(r, rp, lo, hi, 0, false);
    for (std::int64_t n = lo; n <= hi; ++n)
      mean_power[n - lo] += std::norm(grid.y(n, 0));
  }

  // A peak is a sample above 3% of the global maximum that dominates its
  // +-8-sample neighborhood. The window absorbs the deterministic +-2
  // self-correlation shoulders of the banded preamble (lag-2 correlation,
  // ~7% of the peak power), which sit on the flanks of the main lobes.
  double max_p = 0;
  for (double p : mean_power) max_p = std::max(max_p, p);
  const int w = 8;
  std::vector<std::int64_t> peaks;
  for (std::size_t i = 0; i < mean_power.size(); ++i) {
    if (mean_power[i] <= 0.03 * max_p) continue;
    bool dominant = true;
    for (std::size_t j = (i > std::size_t(w) ? i - w : 0);
         j <= std::min(i + w, mean_power.size() - 1) && dominant; ++j)
      if (j != i && mean_power[j] >= mean_power[i]) dominant = false;
    if (dominant) peaks.push_back(lo + static_cast<std::int64_t>(i));
  }
  const std::vector<std::int64_t> want = {-256, -128, 0, 128};
  const bool pass = peaks == want;
  std::string got = "{";
  for (std::int64_t p : peaks) got += fmt("%lld,", static_cast<long long>(p));
  got += "}";
  return {pass, fmt("windowed local maxima above 3%% of peak at %s (want {-256,-128,0,128,})",
                    got.c_str())};
}

// ---------------------------------------------------------------- C5
// Fine CFO estimator in AWGN at 20 dB: MSE within [0.5, 2] x 1/(4 N SNR)
// and above the Cramer-Rao bound.
Verdict criterion5() {
  const int N = 256;
  auto cfg = frame_cfg(PreambleKind::SchmidlCox);
  const auto bounds = an::cfo_estimator_bounds(N, 100.0);

  const int trials = 10000;
  double mse = 0;
  for (int t = 0; t < trials; ++t) {
    Rng cfo_rng(derive_seed(5000, t));
    const double nu = cfo_rng.uniform(-0.5, 0.5);
    auto rp = make_preamble(cfg, derive_seed(5001, t));
    ImpairmentConfig imp;
    imp.n_fft = N;
    imp.cfo = nu;
    imp.snr_db = 20.0;
    imp.signal_power = cfg.map.signal_power();
    auto r = corrupt(assemble_frame(cfg, derive_seed(5002, t), rp), imp,
                     identity_channel(), derive_seed(5003, t));
    LuisaParams params;
    params.nu_max = 1.0;
    params.n_cp = 16;
    params.gamma = 2;
    params.scan = std::make_pair<std::int64_t, std::int64_t>(-16, 16);
    const SyncResult res = run_luisa(r, rp, params);
    const double err = res.final_cfo() - nu;
    mse += err * err;
  }
  mse /= trials;
  const bool pass =
      mse >= 0.5 * bounds.variance && mse <= 2.0 * bounds.variance && mse > bounds.crlb;
  return {pass, fmt("MSE %.3e vs 1/(4N SNR) %.3e [x%.2f], CRLB %.3e", mse,
                    bounds.variance, mse / bounds.variance, bounds.crlb)};
}

// ---------------------------------------------------------------- C6
// Interference-free operating points: the simple-preamble/plain-argmax
// configuration reaches the 1e-3 band at 5.7 dB; the S&C baseline anchor
// sits near 12.8 dB (soft, variant-dependent); LUISA never loses to the
// baseline on a common SNR grid (the hard ordering).
Verdict criterion6() {
  const std::int64_t trials = 10000;

  Scenario s = make_scenario("nogs");
  s.trials = trials;
  s.base_seed = 61;

  // (a) simple preamble, plain argmax, full integer range, 5.7 dB
  auto rep_a = run_scenario(s, {algorithm_from_name("luisa-simple")},
                            {{5.7, kInf}}, false);
  const CellMetrics& a = rep_a.cells[0];
  const bool pass_a = a.p_err_ci_lo <= 3e-3 && a.p_err_ci_hi >= 3e-4;
  std::printf("    [6a] luisa-simple @ 5.7 dB: p_err %.3e CI [%.2e, %.2e] %s\n",
              a.p_err, a.p_err_ci_lo, a.p_err_ci_hi, pass_a ? "in band" : "OUT OF BAND");
  std::fflush(stdout);

  // (b, soft) + (c): S&C baseline and LUISA on a common grid
  s.base_seed = 62;
  std::vector<SweepCell> grid;
  for (double snr : {6.0, 8.0, 10.0, 11.8, 12.8, 13.8}) grid.push_back({snr, kInf});
  auto rep = run_scenario(
      s, {algorithm_from_name("luisa-sc"), algorithm_from_name("sc-baseline")},
      grid, false);

  bool pass_order = true;
  bool anchor_hit = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CellMetrics& lu = rep.cells[2 * i];
    const CellMetrics& sc = rep.cells[2 * i + 1];
    std::printf("    [6c] snr %5.1f: luisa-sc %.3e  sc-baseline %.3e\n", lu.snr_db,
                lu.p_err, sc.p_err);
    if (lu.p_err > sc.p_err) pass_order = false;
    if (sc.snr_db >= 11.7 && sc.p_err_ci_lo <= 3e-3 && sc.p_err_ci_hi >= 3e-4)
      anchor_hit = true;
  }
  std::printf("    [6b] S&C baseline 1e-3 anchor within 12.8 +- 1 dB: %s (soft)\n",
              anchor_hit ? "yes" : "no");
  std::fflush(stdout);

  return {pass_a && pass_order,
          fmt("simple@5.7dB %s, ordering %s, S&C anchor %s (soft)",
              pass_a ? "in band" : "MISSED", pass_order ? "holds" : "VIOLATED",
              anchor_hit ? "hit" : "missed")};
}

// ---------------------------------------------------------------- C7
// Narrowband-interference robustness: with guard subcarriers and the +-20
// search range, -10 dB SIR leaves the error probability inside the 95% CI
// of the clean run; the autocorrelation baseline false-locks at SIR <= 0.
Verdict criterion7() {
  const std::int64_t trials = 10000;

  Scenario s = make_scenario("gs");
  s.trials = trials;
  s.base_seed = 71;
  std::vector<SweepCell> cells;
  for (double snr : {6.0, 8.0, 10.0}) {
    cells.push_back({snr, -10.0});
    cells.push_back({snr, kInf});
  }
  auto rep = run_scenario(s, {algorithm_from_name("luisa-sc")}, cells, false);
  bool pass_nbi = true;
  for (std::size_t i = 0; i < cells.size(); i += 2) {
    const CellMetrics& with = rep.cells[i];
    const CellMetrics& clean = rep.cells[i + 1];
    const bool overlap = with.p_err_ci_lo <= clean.p_err_ci_hi &&
                         clean.p_err_ci_lo <= with.p_err_ci_hi;
    std::printf("    [7a] snr %5.1f: SIR -10 dB p_err %.3e CI [%.2e,%.2e]; "
                "clean %.3e CI [%.2e,%.2e] %s\n",
                with.snr_db, with.p_err, with.p_err_ci_lo, with.p_err_ci_hi,
                clean.p_err, clean.p_err_ci_lo, clean.p_err_ci_hi,
                overlap ? "overlap" : "DISJOINT");
    if (!overlap) pass_nbi = false;
  }
  std::fflush(stdout);

  // breadth of the invariant: milder SIRs behave the same way
  s.base_seed = 73;
  auto rep_sir = run_scenario(s, {algorithm_from_name("luisa-sc")},
                              {{6.0, 0.0}, {6.0, 10.0}, {6.0, kInf}}, false);
  {
    const CellMetrics& clean = rep_sir.cells[2];
    for (int i = 0; i < 2; ++i) {
      const CellMetrics& with = rep_sir.cells[i];
      const bool overlap = with.p_err_ci_lo <= clean.p_err_ci_hi &&
                           clean.p_err_ci_lo <= with.p_err_ci_hi;
      std::printf("    [7a] snr   6.0: SIR %+3.0f dB p_err %.3e vs clean %.3e %s\n",
                  with.sir_db, with.p_err, clean.p_err,
                  overlap ? "overlap" : "DISJOINT");
      if (!overlap) pass_nbi = false;
    }
  }
  std::fflush(stdout);

  // no-guard scenario under strong narrowband interference: the baseline
  // false-locks on the sinusoid while the cross-correlator stays usable
  Scenario nogs = make_scenario("nogs");
  nogs.trials = 2000;
  nogs.base_seed = 72;
  auto rep_ord = run_scenario(
      nogs, {algorithm_from_name("sc-baseline"), algorithm_from_name("luisa-sc")},
      {{15.0, 0.0}, {15.0, -10.0}}, false);
  bool pass_sc = true;
  bool pass_order = true;
  bool pass_luisa_sir0 = true;
  for (std::size_t i = 0; i < rep_ord.cells.size(); i += 2) {
    const CellMetrics& sc = rep_ord.cells[i];
    const CellMetrics& lu = rep_ord.cells[i + 1];
    std::printf("    [7b] @15 dB SIR %+3.0f: sc-baseline p_err %.3f, luisa-sc %.4f\n",
                sc.sir_db, sc.p_err, lu.p_err);
    if (sc.p_err < 0.5) pass_sc = false;
    if (lu.p_err >= sc.p_err) pass_order = false;
    // without guards the -10 dB interferer line can outweigh a faded
    // channel peak, so the hard bound applies at SIR 0 and the stronger
    // interference is held to the qualitative ordering only
    if (sc.sir_db == 0.0 && lu.p_err > 0.1) pass_luisa_sir0 = false;
  }
  std::fflush(stdout);

  return {pass_nbi && pass_sc && pass_order && pass_luisa_sir0,
          fmt("LUISA under NBI %s clean CIs (guards); without guards baseline "
              "false-sync %s 0.5, ordering %s",
              pass_nbi ? "inside" : "OUTSIDE", pass_sc ? ">=" : "<",
              pass_order ? "holds" : "VIOLATED")};
}

// ---------------------------------------------------------------- C8
// Path false-detection calibration on noise-only windows at P_FD = 1e-2
// (desk-scale stand-in for the production 1e-5): the per-window false
// addition rate stays within a factor of two.
Verdict criterion8() {
  auto cfg = frame_cfg(PreambleKind::SchmidlCox);
  auto rp = make_preamble(cfg, 81);
  const double p_fd = 1e-2;
  const int windows = 100000;

  Rng rng(82);
  std::int64_t additions = 0;
  BasebandSignal noise;
  noise.origin_index = -64;
  noise.samples.resize(400);
  for (int w = 0; w < windows; ++w) {
    for (auto& smp : noise.samples) smp = rng.cgaussian(0.41);
    auto d = detect_paths(noise, rp, 0, 0.27, p_fd, 16);
    additions += static_cast<std::int64_t>(d.size()) - 1;
  }
  const double rate = static_cast<double>(additions) / windows;
  const bool pass = rate >= 0.5 * p_fd && rate <= 2.0 * p_fd;
  return {pass, fmt("false additions per window %.4e vs P_FD %.0e [x%.2f], 1e5 windows",
                    rate, p_fd, rate / p_fd)};
}

// ---------------------------------------------------------------- C9
// Byte-level determinism of the report files for a fixed seed, across
// repeated runs and worker-pool widths.
Verdict criterion9() {
  namespace fs = std::filesystem;
  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };

  Scenario s = make_scenario("gs");
  s.trials = 50;
  s.base_seed = 91;
  std::vector<Algorithm> algos = {algorithm_from_name("luisa-sc"),
                                  algorithm_from_name("sc-baseline")};
  std::vector<SweepCell> cells = {{10.0, 0.0}, {14.0, kInf}};

  emit_report(run_scenario(s, algos, cells), "acc9_a");
  emit_report(run_scenario(s, algos, cells), "acc9_b");
  setenv("NCOFDM_SYNC_THREADS", "1", 1);
  emit_report(run_scenario(s, algos, cells), "acc9_c");
  unsetenv("NCOFDM_SYNC_THREADS");

  const bool metrics_same = slurp("acc9_a/metrics.csv") == slurp("acc9_b/metrics.csv") &&
                            slurp("acc9_a/metrics.csv") == slurp("acc9_c/metrics.csv");
  const bool trials_same =
      slurp("acc9_a/trials.csv.gz") == slurp("acc9_b/trials.csv.gz") &&
      slurp("acc9_a/trials.csv.gz") == slurp("acc9_c/trials.csv.gz");
  for (const char* d : {"acc9_a", "acc9_b", "acc9_c"}) fs::remove_all(d);
  return {metrics_same && trials_same,
          fmt("metrics.csv %s, trials.csv.gz %s (rerun + single-thread pool)",
              metrics_same ? "identical" : "DIFFER", trials_same ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Verdict (*fn)();
  };
  const Entry entries[] = {
      {"oracle equivalence Y(n,k) time vs frequency route", criterion1},
      {"path-component moment table, all cases and kinds", criterion2},
      {"peak geometry: exact peak, 40% half-bin, 80% pair metric", criterion3},
      {"idealistic run shows exactly four correlation peaks", criterion4},
      {"fine CFO MSE at 20 dB within [0.5,2]x closed form, above CRLB", criterion5},
      {"clean-channel operating points and LUISA/S&C ordering", criterion6},
      {"narrowband-interference robustness with guard subcarriers", criterion7},
      {"path false-detection rate calibrated to P_FD", criterion8},
      {"seeded runs reproduce byte-identical reports", criterion9},
  };

  int failures = 0;
  const double t0 = now_seconds();
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    std::printf("[ %zu ] running: %s\n", i + 1, entries[i].name);
    std::fflush(stdout);
    const double tc = now_seconds();
    const Verdict v = entries[i].fn();
    std::printf("[ %zu ] %s  %s (%s; %.1f s)\n", i + 1, v.pass ? "PASS" : "FAIL",
                entries[i].name, v.detail.c_str(), now_seconds() - tc);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  std::printf("acceptance: %zu/%zu criteria passed (%.1f min)\n",
              std::size(entries) - failures, std::size(entries),
              (now_seconds() - t0) / 60.0);
  return failures == 0 ? 0 : 1;
}
