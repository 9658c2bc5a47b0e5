// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include "ncofdm/harness.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ncofdm/rng.hpp"
#include "ncofdm/sync_baseline_sc.hpp"

namespace ncofdm {

namespace {

std::vector<int> index_range(int lo, int hi) {
  std::vector<int> v;
  v.reserve(hi - lo + 1);
  for (int k = lo; k <= hi; ++k) v.push_back(k);
  return v;
}

std::vector<int> concat(std::initializer_list<std::vector<int>> parts) {
  std::vector<int> v;
  for (const auto& p : parts) v.insert(v.end(), p.begin(), p.end());
  return v;
}

SubcarrierMap make_map(std::vector<int> occupied) {
  SubcarrierMap m;
  m.n_fft = 256;
  m.occupied = std::move(occupied);
  m.preamble_occupied = m.occupied;
  m.validate();
  return m;
}

}  // namespace

SubcarrierMap map_no_guards() {
  return make_map(concat({index_range(-100, -1), index_range(1, 16), index_range(32, 100)}));
}

SubcarrierMap map_guards() {
  // 15 guard subcarriers pushed into each edge of every occupied block of
  // the no-guards plan; the {1..16} block collapses to {1} and the notch
  // around the interferer grows to 45 subcarriers ({2..46}).
  return make_map(concat({index_range(-85, -1), {1}, index_range(47, 85)}));
}

SubcarrierMap map_guards_alt() {
  // Alternative reading that keeps the whole {1..16} block. Here the
  // interferer at bin 24 is only 8 bins from occupied spectrum, so with a
  // +-20 integer-CFO search the narrowband rejection no longer holds.
  return make_map(concat({index_range(-85, -1), index_range(1, 16), index_range(47, 85)}));
}

SubcarrierMap map_dsa_initial() {
  return make_map(concat({index_range(-100, -1), index_range(1, 100)}));
}

Algorithm algorithm_from_name(const std::string& name) {
  Algorithm a;
  a.name = name;
  if (name == "luisa-sc") {
    a.id = AlgorithmId::LuisaSc;
    a.preamble = PreambleKind::SchmidlCox;
    a.rule = DetectionRule::YZCombined;
    a.nu_max = 20.0;
  } else if (name == "luisa-simple") {
    a.id = AlgorithmId::LuisaSimple;
    a.preamble = PreambleKind::Simple;
    a.rule = DetectionRule::YOnly;
    a.nu_max = 128.0;  // full integer range
  } else if (name == "luisa-yonly") {
    a.id = AlgorithmId::LuisaYOnly;
    a.preamble = PreambleKind::SchmidlCox;
    a.rule = DetectionRule::YOnly;
    a.nu_max = 128.0;
  } else if (name == "sc-baseline") {
    a.id = AlgorithmId::ScBaseline;
    a.preamble = PreambleKind::SchmidlCox;
    a.sc_range = 10;  // even shifts 2g cover {-20..20}
  } else {
    throw std::invalid_argument("unknown algorithm: " + name);
  }
  return a;
}

Scenario make_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "nogs") {
    s.sc_map = map_no_guards();
    s.interference = InterferenceKind::Nbi;
    s.nbi.center_freq = 24.0;
  } else if (name == "gs") {
    s.sc_map = map_guards();
    s.interference = InterferenceKind::Nbi;
    s.nbi.center_freq = 24.0;
  } else if (name == "gs-alt") {
    s.sc_map = map_guards_alt();
    s.interference = InterferenceKind::Nbi;
    s.nbi.center_freq = 24.0;
  } else if (name == "dsa") {
    s.sc_map = map_dsa_initial();
    s.dsa = true;
    s.interference = InterferenceKind::Nbi;
  } else if (name == "awgn") {
    s.sc_map = map_no_guards();
    s.channel_profile = "awgn";
    s.interference = InterferenceKind::None;
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }
  // The wideband interferer fills the licensed-user band between the
  // occupied blocks with half-bin-offset tones (maximally non-orthogonal).
  for (int b = 17; b <= 30; ++b) s.wbi.bins.push_back(b + 0.5);
  s.wbi.symbol_len = 0;
  return s;
}

int worker_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("NCOFDM_SYNC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(hw);
}

std::pair<double, double> wilson_ci(std::int64_t errors, std::int64_t trials) {
  if (trials <= 0) return {0.0, 1.0};
  if (errors == 0 && trials > 0) {
    const double z = 1.959963984540054;
    const double z2 = z * z;
    return {0.0, z2 / (trials + z2)};
  }
  const double z = 1.959963984540054;  // 95%
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, (center - spread) / denom),
          std::min(1.0, (center + spread) / denom)};
}

namespace {

struct KindSignal {
  bool built = false;
  PreambleRecord preamble;
  BasebandSignal rx;
};

// Carves the per-frame notch of the dynamic-allocation scenario.
SubcarrierMap dsa_frame_map(const Scenario& s, double nbi_center) {
  const int c0 = static_cast<int>(std::lround(nbi_center));
  const int half = (s.dsa_notch_width - 1) / 2;
  SubcarrierMap m;
  m.n_fft = s.sc_map.n_fft;
  for (int k : s.sc_map.occupied)
    if (k < c0 - half || k > c0 + half) m.occupied.push_back(k);
  m.preamble_occupied = m.occupied;
  m.validate();
  return m;
}

void run_one_trial(const Scenario& s, const std::vector<Algorithm>& algos,
                   const SweepCell& cell, std::size_t cell_idx, std::int64_t trial,
                   TrialRecord* out) {
  const std::uint64_t cell_seed = derive_seed(s.base_seed, 0x100 + cell_idx);
  const std::uint64_t trial_seed = derive_seed(cell_seed, static_cast<std::uint64_t>(trial));

  Rng cfo_rng(derive_seed(trial_seed, SeedStream::Cfo));
  const double cfo = cfo_rng.uniform(s.cfo_lo, s.cfo_hi);

  SubcarrierMap map = s.sc_map;
  double nbi_center = s.nbi.center_freq;
  if (s.dsa) {
    Rng dsa_rng(derive_seed(trial_seed, SeedStream::DsaCenter));
    nbi_center = dsa_rng.uniform(-128.0, 127.0);
    map = dsa_frame_map(s, nbi_center);
  }

  ChannelRealization ch =
      s.channel_profile == "eva"
          ? sample_eva_channel(s.n_fft, s.n_cp, s.sample_rate_hz,
                               derive_seed(trial_seed, SeedStream::Channel))
          : identity_channel();

  const bool with_interference =
      s.interference != InterferenceKind::None && std::isfinite(cell.sir_db);

  KindSignal kinds[2];  // indexed by PreambleKind
  auto bundle = [&](PreambleKind kind) -> KindSignal& {
    KindSignal& ks = kinds[static_cast<int>(kind)];
    if (ks.built) return ks;
    FrameConfig cfg;
    cfg.map = map;
    cfg.n_cp = s.n_cp;
    cfg.n_symbols = s.n_symbols;
    cfg.preamble_kind = kind;
    cfg.interframe_gap = s.interframe_gap;
    const std::uint64_t kind_tag = static_cast<std::uint64_t>(kind) + 1;
    ks.preamble =
        make_preamble(cfg, derive_seed(derive_seed(trial_seed, SeedStream::Preamble), kind_tag));
    BasebandSignal tx = assemble_frame(
        cfg, derive_seed(derive_seed(trial_seed, SeedStream::Data), kind_tag), ks.preamble);

    ImpairmentConfig imp;
    imp.n_fft = s.n_fft;
    imp.cfo = cfo;
    imp.snr_db = cell.snr_db;
    imp.signal_power = map.signal_power();
    if (with_interference) {
      imp.interference = s.interference;
      imp.sir_db = cell.sir_db;
      imp.nbi = s.nbi;
      imp.nbi.center_freq = nbi_center;
      imp.wbi = s.wbi;
    }
    ks.rx = corrupt(tx, imp, ch, trial_seed);
    ks.built = true;
    return ks;
  };

  for (std::size_t ai = 0; ai < algos.size(); ++ai) {
    const Algorithm& algo = algos[ai];
    KindSignal& ks = bundle(algo.preamble);
    TrialRecord rec;
    rec.trial_id = trial;
    rec.algorithm = algo.name;
    rec.snr_db = cell.snr_db;
    rec.sir_db = cell.sir_db;
    rec.true_timing = 0;  // first channel path is tap 0 at the frame origin
    rec.true_cfo = cfo;

    if (algo.id == AlgorithmId::ScBaseline) {
      const ScResult r = run_schmidl_cox(ks.rx, ks.preamble, s.n_fft, algo.sc_range);
      rec.est_timing = r.timing;
      rec.est_cfo = r.nu_hat;
    } else {
      LuisaParams params;
      params.nu_max = algo.nu_max;
      params.p_fd = s.p_fd;
      params.gamma = s.gamma;
      params.rule = algo.rule;
      params.n_cp = s.n_cp;
      const SyncResult r = run_luisa(ks.rx, ks.preamble, params);
      rec.detected = r.detected;
      rec.est_timing = r.first_path;
      rec.est_cfo = r.final_cfo();
      rec.n_m = r.n_m;
      rec.k_m = r.k_m;
      rec.used_z = r.used_z_metric;
    }
    rec.success = rec.detected &&
                  std::llabs(rec.est_timing - rec.true_timing) < s.n_cp &&
                  std::abs(rec.est_cfo - rec.true_cfo) < 0.5;
    out[ai] = std::move(rec);
  }
}

}  // namespace

MetricsReport run_scenario(const Scenario& s, const std::vector<Algorithm>& algos,
                           const std::vector<SweepCell>& sweep, bool keep_trials) {
  if (algos.empty()) throw std::invalid_argument("run_scenario: no algorithms");
  if (s.interference == InterferenceKind::Wbi) {
    // tones landing exactly on occupied integer bins would be orthogonal to
    // the victim, which defeats the interferer model
    for (double b : s.wbi.bins) {
      const double r = std::round(b);
      if (std::abs(b - r) < 1e-9 &&
          std::binary_search(s.sc_map.occupied.begin(), s.sc_map.occupied.end(),
                             static_cast<int>(r)))
        throw std::invalid_argument("run_scenario: WBI tone coincides with an occupied subcarrier");
    }
  }
  if (sweep.empty()) {
    MetricsReport empty;
    empty.scenario = s.name;
    empty.keep_trials = keep_trials;
    return empty;
  }

  const std::int64_t jobs = static_cast<std::int64_t>(sweep.size()) * s.trials;
  std::vector<TrialRecord> records(static_cast<std::size_t>(jobs) * algos.size());

  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::int64_t j = next.fetch_add(1);
      if (j >= jobs) return;
      const std::size_t cell_idx = static_cast<std::size_t>(j / s.trials);
      const std::int64_t trial = j % s.trials;
      try {
        run_one_trial(s, algos, sweep[cell_idx], cell_idx, trial,
                      records.data() + static_cast<std::size_t>(j) * algos.size());
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };

  const int nthreads = std::min<std::int64_t>(worker_threads(), jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  MetricsReport rep;
  rep.scenario = s.name;
  rep.keep_trials = keep_trials;

  for (std::size_t cell_idx = 0; cell_idx < sweep.size(); ++cell_idx) {
    for (std::size_t ai = 0; ai < algos.size(); ++ai) {
      CellMetrics m;
      m.algorithm = algos[ai].name;
      m.snr_db = sweep[cell_idx].snr_db;
      m.sir_db = sweep[cell_idx].sir_db;
      double t_all = 0, t_ok = 0, f_all = 0, f_ok = 0;
      std::int64_t ok = 0;
      for (std::int64_t trial = 0; trial < s.trials; ++trial) {
        const std::size_t idx =
            (cell_idx * static_cast<std::size_t>(s.trials) + static_cast<std::size_t>(trial)) *
                algos.size() +
            ai;
        const TrialRecord& r = records[idx];
        const double te = static_cast<double>(r.est_timing - r.true_timing);
        const double fe = r.est_cfo - r.true_cfo;
        t_all += te * te;
        f_all += fe * fe;
        if (r.success) {
          ++ok;
          t_ok += te * te;
          f_ok += fe * fe;
        }
      }
      m.trials = s.trials;
      m.errors = s.trials - ok;
      m.p_err = static_cast<double>(m.errors) / s.trials;
      std::tie(m.p_err_ci_lo, m.p_err_ci_hi) = wilson_ci(m.errors, m.trials);
      m.time_mse_all = t_all / s.trials;
      m.freq_mse_all = f_all / s.trials;
      m.time_mse_ok = ok > 0 ? t_ok / ok : std::nan("");
      m.freq_mse_ok = ok > 0 ? f_ok / ok : std::nan("");
      rep.cells.push_back(std::move(m));
    }
  }
  if (keep_trials) rep.trials = std::move(records);
  return rep;
}

namespace {

void append_num(std::string& out, double v, const char* fmt = "%.12g") {
  char buf[64];
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
    return;
  }
  std::snprintf(buf, sizeof(buf), fmt, v);
  out += buf;
}

std::string metrics_csv(const MetricsReport& rep) {
  std::string out =
      "scenario,algorithm,snr_db,sir_db,trials,errors,p_err,p_err_ci_lo,"
      "p_err_ci_hi,time_mse_all,time_mse_ok,freq_mse_all,freq_mse_ok\n";
  for (const CellMetrics& m : rep.cells) {
    out += rep.scenario + "," + m.algorithm + ",";
    append_num(out, m.snr_db, "%g");
    out += ",";
    append_num(out, m.sir_db, "%g");
    out += ",";
    out += std::to_string(m.trials) + "," + std::to_string(m.errors) + ",";
    append_num(out, m.p_err);
    out += ",";
    append_num(out, m.p_err_ci_lo);
    out += ",";
    append_num(out, m.p_err_ci_hi);
    out += ",";
    append_num(out, m.time_mse_all);
    out += ",";
    append_num(out, m.time_mse_ok);
    out += ",";
    append_num(out, m.freq_mse_all);
    out += ",";
    append_num(out, m.freq_mse_ok);
    out += "\n";
  }
  return out;
}

std::string trials_csv(const MetricsReport& rep) {
  std::string out =
      "scenario,algorithm,snr_db,sir_db,trial_id,true_timing,true_cfo,"
      "est_timing,est_cfo,success,detected,n_m,k_m,used_z\n";
  for (const TrialRecord& r : rep.trials) {
    out += rep.scenario + "," + r.algorithm + ",";
    append_num(out, r.snr_db, "%g");
    out += ",";
    append_num(out, r.sir_db, "%g");
    out += "," + std::to_string(r.trial_id) + "," + std::to_string(r.true_timing) + ",";
    append_num(out, r.true_cfo);
    out += "," + std::to_string(r.est_timing) + ",";
    append_num(out, r.est_cfo);
    out += ",";
    out += r.success ? '1' : '0';
    out += ",";
    out += r.detected ? '1' : '0';
    out += "," + std::to_string(r.n_m) + "," + std::to_string(r.k_m) + ",";
    out += r.used_z ? '1' : '0';
    out += "\n";
  }
  return out;
}

// Deterministic gzip container: fixed header (mtime 0, unknown OS), raw
// deflate body, CRC32 + size trailer.
void write_gzip(const std::string& path, const std::string& data) {
  z_stream strm;
  std::memset(&strm, 0, sizeof(strm));
  if (deflateInit2(&strm, 9, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw std::runtime_error("write_gzip: deflateInit2 failed");

  std::string body;
  body.resize(deflateBound(&strm, static_cast<uLong>(data.size())));
  strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  strm.avail_in = static_cast<uInt>(data.size());
  strm.next_out = reinterpret_cast<Bytef*>(body.data());
  strm.avail_out = static_cast<uInt>(body.size());
  const int rc = deflate(&strm, Z_FINISH);
  if (rc != Z_STREAM_END) {
    deflateEnd(&strm);
    throw std::runtime_error("write_gzip: deflate failed");
  }
  body.resize(body.size() - strm.avail_out);
  deflateEnd(&strm);

  const std::uint32_t crc =
      static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>(data.data()),
                                       static_cast<uInt>(data.size())));
  const std::uint32_t isize = static_cast<std::uint32_t>(data.size());

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_gzip: cannot open " + path);
  const unsigned char header[10] = {0x1f, 0x8b, 8, 0, 0, 0, 0, 0, 0, 0xff};
  bool ok = std::fwrite(header, 1, sizeof(header), f) == sizeof(header) &&
            (body.empty() || std::fwrite(body.data(), 1, body.size(), f) == body.size());
  unsigned char trailer[8];
  for (int i = 0; i < 4; ++i) trailer[i] = static_cast<unsigned char>(crc >> (8 * i));
  for (int i = 0; i < 4; ++i) trailer[4 + i] = static_cast<unsigned char>(isize >> (8 * i));
  ok = ok && std::fwrite(trailer, 1, 8, f) == 8;
  std::fclose(f);
  if (!ok) throw std::runtime_error("write_gzip: short write to " + path);
}

void write_file(const std::string& path, const std::string& data) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("emit_report: cannot open " + path);
  const bool ok = data.empty() || std::fwrite(data.data(), 1, data.size(), f) == data.size();
  std::fclose(f);
  if (!ok) throw std::runtime_error("emit_report: short write to " + path);
}

}  // namespace

void emit_report(const MetricsReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/metrics.csv", metrics_csv(report));
  write_gzip(out_dir + "/trials.csv.gz", trials_csv(report));
}

}  // namespace ncofdm
