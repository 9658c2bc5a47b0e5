// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors
//
// Command-line front end: Monte Carlo runs, analytic curve dumps and a
// quick self-check of the core identities.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncofdm/analytic.hpp"
#include "ncofdm/fft.hpp"
#include "ncofdm/harness.hpp"
#include "ncofdm/impairments.hpp"
#include "ncofdm/rng.hpp"
#include "ncofdm/sync_baseline_sc.hpp"
#include "ncofdm/sync_luisa.hpp"
#include "ncofdm/waveform.hpp"

namespace {

using namespace ncofdm;

// Accepts "a,b,c", "lo:step:hi" (inclusive), a single value, or
// "inf"/"none" entries.
std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  auto parse_one = [](const std::string& tok) {
    if (tok == "inf" || tok == "none")
      return std::numeric_limits<double>::infinity();
    return std::stod(tok);
  };
  const auto colon1 = text.find(':');
  if (colon1 != std::string::npos) {
    const auto colon2 = text.find(':', colon1 + 1);
    if (colon2 == std::string::npos)
      throw CLI::ValidationError("range must be lo:step:hi");
    const double lo = std::stod(text.substr(0, colon1));
    const double step = std::stod(text.substr(colon1 + 1, colon2 - colon1 - 1));
    const double hi = std::stod(text.substr(colon2 + 1));
    if (step <= 0) throw CLI::ValidationError("range step must be positive");
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    return out;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(parse_one(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

// Flat key=value configuration mirroring the run flags. Values only fill
// options that were not given on the command line (flags override file).
void apply_config(const std::string& path, const CLI::App& run_cmd,
                  std::string& scenario, std::vector<std::string>& algos,
                  std::string& snr, std::string& sir, std::int64_t& trials,
                  std::uint64_t& seed, double& nu_max, double& p_fd, int& gamma,
                  std::string& out_dir, std::string& channel) {
  std::ifstream f(path);
  if (!f.good()) throw std::runtime_error("cannot open config file " + path);
  auto given = [&](const char* flag) { return run_cmd.count(flag) > 0; };
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = v.find_last_not_of(" \t\r");
      return v.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key == "scenario") { if (!given("--scenario")) scenario = value; }
    else if (key == "algo") {
      if (!given("--algo")) {
        algos.clear();
        std::size_t pos = 0;
        while (pos < value.size()) {
          auto comma = value.find(',', pos);
          if (comma == std::string::npos) comma = value.size();
          algos.push_back(value.substr(pos, comma - pos));
          pos = comma + 1;
        }
      }
    }
    else if (key == "snr") { if (!given("--snr")) snr = value; }
    else if (key == "sir") { if (!given("--sir")) sir = value; }
    else if (key == "trials") { if (!given("--trials")) trials = std::stoll(value); }
    else if (key == "seed") { if (!given("--seed")) seed = std::stoull(value); }
    else if (key == "nu-max") { if (!given("--nu-max")) nu_max = std::stod(value); }
    else if (key == "pfd") { if (!given("--pfd")) p_fd = std::stod(value); }
    else if (key == "gamma") { if (!given("--gamma")) gamma = std::stoi(value); }
    else if (key == "out") { if (!given("--out")) out_dir = value; }
    else if (key == "channel") { if (!given("--channel")) channel = value; }
    else throw std::runtime_error("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
  }
}

int cmd_run(const std::string& scenario_name, const std::vector<std::string>& algo_names,
            const std::string& snr_list, const std::string& sir_list,
            std::int64_t trials, std::uint64_t seed, double nu_max, double p_fd,
            int gamma, const std::string& out_dir, const std::string& channel,
            bool keep_trials) {
  Scenario s = make_scenario(scenario_name);
  s.trials = trials;
  s.base_seed = seed;
  s.p_fd = p_fd;
  s.gamma = gamma;
  if (!channel.empty()) s.channel_profile = channel;

  std::vector<Algorithm> algos;
  for (const std::string& name : algo_names) {
    Algorithm a = algorithm_from_name(name);
    if (nu_max > 0 && a.id != AlgorithmId::ScBaseline) a.nu_max = nu_max;
    algos.push_back(a);
  }

  std::vector<SweepCell> sweep;
  for (double snr : parse_list(snr_list))
    for (double sir : parse_list(sir_list)) sweep.push_back({snr, sir});

  const MetricsReport rep = run_scenario(s, algos, sweep, keep_trials);
  emit_report(rep, out_dir);
  std::printf("scenario %s: %zu cells x %lld trials -> %s/metrics.csv\n",
              s.name.c_str(), sweep.size(), static_cast<long long>(trials),
              out_dir.c_str());
  for (const CellMetrics& m : rep.cells)
    std::printf("  %-12s snr %6.2f sir %6.2f  p_err %.4g  [%.4g, %.4g]\n",
                m.algorithm.c_str(), m.snr_db, m.sir_db, m.p_err, m.p_err_ci_lo,
                m.p_err_ci_hi);
  return 0;
}

int cmd_predict_vi(const std::string& interference, const std::string& map_name,
                   const std::string& kind_name, const std::string& out_path) {
  SubcarrierMap map;
  if (map_name == "nogs") map = map_no_guards();
  else if (map_name == "gs") map = map_guards();
  else if (map_name == "gs-alt") map = map_guards_alt();
  else throw CLI::ValidationError("unknown map: " + map_name);

  const PreambleKind kind =
      kind_name == "simple" ? PreambleKind::Simple : PreambleKind::SchmidlCox;
  const int n = map.n_fft;

  std::vector<double> g;
  const auto colon = interference.find(':');
  const std::string itype = interference.substr(0, colon);
  if (itype == "nbi") {
    const double f = colon == std::string::npos ? 24.0
                                                : std::stod(interference.substr(colon + 1));
    g = analytic::nbi_psd(f, 1.0, n);
  } else if (itype == "wbi") {
    std::vector<double> bins;
    if (colon != std::string::npos)
      bins = parse_list(interference.substr(colon + 1));
    if (bins.empty())
      for (int b = 17; b <= 30; ++b) bins.push_back(b + 0.5);
    g = analytic::wbi_psd(bins, 1.0, n);
  } else {
    throw CLI::ValidationError("interference must be nbi[:f] or wbi[:f1,f2,...]");
  }

  auto d = analytic::preamble_psd(map, kind);
  // symbol units -> power units: scale so the preamble has power alpha/N
  const double sx2 = map.signal_power();

  std::string csv = "k,vi_normalized\n";
  for (int k = -n / 2; k < n / 2; ++k) {
    const double vi = analytic::interference_variance_component(g, d, k);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d,%.9g\n", k, vi / (n * 1.0 * sx2));
    csv += buf;
  }
  if (out_path == "-") {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else {
    std::FILE* f = std::fopen(out_path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + out_path);
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_predict_moments(const std::string& case_name, const std::string& kind_name,
                        const std::string& nu_list, double k, int n_fft, int n_cp) {
  analytic::CorrelationCase c;
  std::int64_t off = 0;
  if (case_name == "A") { c = analytic::CorrelationCase::A; off = -n_fft; }
  else if (case_name == "B") { c = analytic::CorrelationCase::B; off = -n_fft / 2; }
  else if (case_name == "C") { c = analytic::CorrelationCase::C; off = 0; }
  else if (case_name == "D") { c = analytic::CorrelationCase::D; off = n_fft / 2; }
  else throw CLI::ValidationError("case must be one of A,B,C,D");
  const PreambleKind kind =
      kind_name == "simple" ? PreambleKind::Simple : PreambleKind::SchmidlCox;

  std::printf("nu,k,mean_re,mean_im,variance\n");
  for (double nu : parse_list(nu_list)) {
    const auto m = analytic::path_component_moments(c, kind, off, 0, k, nu,
                                                    n_fft, n_cp, 1.0);
    std::printf("%.9g,%.9g,%.9g,%.9g,%.9g\n", nu, k, m.mean.real(), m.mean.imag(),
                m.variance);
  }
  return 0;
}

int cmd_predict_cfobounds(int n_fft, const std::string& snr_list) {
  std::printf("snr_db,variance,crlb\n");
  for (double snr_db : parse_list(snr_list)) {
    const auto b = analytic::cfo_estimator_bounds(n_fft, std::pow(10.0, snr_db / 10.0));
    std::printf("%.9g,%.9g,%.9g\n", snr_db, b.variance, b.crlb);
  }
  return 0;
}

#define SELFTEST(label, cond)                              \
  do {                                                     \
    const bool ok_ = (cond);                               \
    std::printf("  [%s] %s\n", ok_ ? "ok" : "FAIL", label); \
    if (!ok_) failures++;                                  \
  } while (0)

int cmd_selftest() {
  int failures = 0;
  std::printf("self test:\n");

  // time-domain vs frequency-domain synchronization variable
  {
    FrameConfig cfg;
    cfg.map = map_no_guards();
    cfg.n_cp = 16;
    cfg.n_symbols = 3;
    cfg.interframe_gap = 1;
    cfg.preamble_kind = PreambleKind::SchmidlCox;
    auto rp = make_preamble(cfg, 1);
    Rng rng(2);
    BasebandSignal r;
    r.origin_index = 0;
    r.samples.resize(700);
    for (auto& s : r.samples) s = rng.cgaussian(1.0);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      const std::int64_t n = static_cast<std::int64_t>(rng.uniform01() * 400);
      const int k = static_cast<int>(rng.uniform(-128, 128));
      std::vector<cplx> w(r.window(n), r.window(n) + 256);
      const cplx a = sync_variable(r, rp, n, {k})[0];
      const cplx b = sync_variable_freq(fft(w), rp.freq_symbols, k);
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    SELFTEST("Y(n,k) time/frequency equivalence < 1e-9", worst < 1e-9);
  }

  // pair-metric identity and coarse lock on a clean frame
  {
    FrameConfig cfg;
    cfg.map = map_no_guards();
    cfg.n_cp = 16;
    cfg.n_symbols = 3;
    cfg.interframe_gap = 1;
    cfg.preamble_kind = PreambleKind::SchmidlCox;
    auto rp = make_preamble(cfg, 3);
    ImpairmentConfig imp;
    imp.n_fft = 256;
    imp.cfo = 1.7;
    imp.signal_power = cfg.map.signal_power();
    auto r = corrupt(assemble_frame(cfg, 4, rp), imp, identity_channel(), 5);
    auto grid = compute_sync_grid(r, rp, -200, 400, 20, true);
    auto pt = coarse_detect(grid, DetectionRule::YZCombined);
    SELFTEST("coarse lock at the optimal point", pt.n_m == 0 && pt.k_m == 2);
    auto frac = coarse_frac_cfo(grid, pt.n_m, pt.k_m);
    SELFTEST("coarse CFO within 0.05", std::abs(frac.nu0 - 1.7) < 0.05);
  }

  // estimator bound ratio
  {
    const auto b = analytic::cfo_estimator_bounds(256, 100.0);
    SELFTEST("variance/CRLB ratio pi^2/6",
             std::abs(b.variance / b.crlb - M_PI * M_PI / 6.0) < 1e-12);
  }

  // deterministic Monte Carlo cell
  {
    Scenario s = make_scenario("nogs");
    s.trials = 5;
    s.base_seed = 11;
    auto algos = std::vector<Algorithm>{algorithm_from_name("luisa-sc")};
    auto r1 = run_scenario(s, algos, {{20.0, std::numeric_limits<double>::infinity()}});
    auto r2 = run_scenario(s, algos, {{20.0, std::numeric_limits<double>::infinity()}});
    bool same = r1.trials.size() == r2.trials.size();
    for (std::size_t i = 0; same && i < r1.trials.size(); ++i)
      same = r1.trials[i].est_cfo == r2.trials[i].est_cfo &&
             r1.trials[i].est_timing == r2.trials[i].est_timing;
    SELFTEST("trial-level determinism", same);
  }

  std::printf("self test: %s\n", failures == 0 ? "all checks passed" : "FAILURES");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NC-OFDM preamble synchronization: Monte Carlo runner and analytic curves"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "Monte Carlo scenario sweep");
  std::string scenario = "nogs";
  std::vector<std::string> algos = {"luisa-sc"};
  std::string snr = "10";
  std::string sir = "inf";
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  double nu_max = 0;  // 0 keeps the per-algorithm default
  double p_fd = 1e-5;
  int gamma = 2;
  std::string out_dir = "out";
  std::string channel;
  bool no_trials_file = false;
  run->add_option("--scenario", scenario, "nogs|gs|gs-alt|dsa|awgn")->capture_default_str();
  std::string config_path;
  run->add_option("--config", config_path, "flat key=value file; flags override");
  run->add_option("--algo", algos,
                  "luisa-sc|luisa-simple|luisa-yonly|sc-baseline (repeatable)")
      ->delimiter(',')
      ->capture_default_str();
  run->add_option("--snr", snr, "SNR dB list: a,b,c or lo:step:hi")->capture_default_str();
  run->add_option("--sir", sir, "SIR dB list; inf disables interference")
      ->capture_default_str();
  run->add_option("--trials", trials, "frames per cell")->capture_default_str();
  run->add_option("--seed", seed, "base seed")->capture_default_str();
  run->add_option("--nu-max", nu_max, "override CFO search bound (subcarriers)");
  run->add_option("--pfd", p_fd, "path false-detection probability")->capture_default_str();
  run->add_option("--gamma", gamma, "fine CFO iterations")->capture_default_str();
  run->add_option("--out", out_dir, "output directory")->capture_default_str();
  run->add_option("--channel", channel, "override channel profile: eva|awgn");
  run->add_flag("--no-trials-file", no_trials_file, "skip the per-trial dump");

  // --- predict ---
  auto* predict = app.add_subcommand("predict", "analytic curves as CSV");
  std::string what = "vi";
  std::string interference = "nbi:24";
  std::string map_name = "nogs";
  std::string kind_name = "sc";
  std::string case_name = "C";
  std::string nu_list = "0:0.05:0.5";
  double k_probe = 0;
  int n_fft = 256, n_cp = 16;
  std::string out_path = "-";
  std::string snr_list = "0:2:30";
  predict->add_option("--what", what, "vi|moments|cfobounds")->capture_default_str();
  predict->add_option("--interference", interference, "nbi[:f] | wbi[:f1,f2,...]")
      ->capture_default_str();
  predict->add_option("--map", map_name, "nogs|gs|gs-alt")->capture_default_str();
  predict->add_option("--kind", kind_name, "sc|simple")->capture_default_str();
  predict->add_option("--case", case_name, "A|B|C|D (moments)")->capture_default_str();
  predict->add_option("--nu", nu_list, "CFO list (moments)")->capture_default_str();
  predict->add_option("--k", k_probe, "frequency offset probe (moments)");
  predict->add_option("--n", n_fft, "FFT size")->capture_default_str();
  predict->add_option("--ncp", n_cp, "CP length")->capture_default_str();
  predict->add_option("--snr", snr_list, "SNR dB list (cfobounds)")->capture_default_str();
  predict->add_option("--out", out_path, "output file or - for stdout")
      ->capture_default_str();

  // --- selftest ---
  app.add_subcommand("selftest", "run the built-in identity checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!config_path.empty())
        apply_config(config_path, *run, scenario, algos, snr, sir, trials, seed,
                     nu_max, p_fd, gamma, out_dir, channel);
      return cmd_run(scenario, algos, snr, sir, trials, seed, nu_max, p_fd, gamma,
                     out_dir, channel, !no_trials_file);
    }
    if (predict->parsed()) {
      if (what == "vi") return cmd_predict_vi(interference, map_name, kind_name, out_path);
      if (what == "moments")
        return cmd_predict_moments(case_name, kind_name, nu_list, k_probe, n_fft, n_cp);
      if (what == "cfobounds") return cmd_predict_cfobounds(n_fft, snr_list);
      std::fprintf(stderr, "unknown --what: %s\n", what.c_str());
      return 1;
    }
    return cmd_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
