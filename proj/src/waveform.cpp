// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include "ncofdm/waveform.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "ncofdm/fft.hpp"
#include "ncofdm/rng.hpp"

namespace ncofdm {

void SubcarrierMap::validate() const {
  if (n_fft < 2) throw std::invalid_argument("SubcarrierMap: n_fft too small");
  if (occupied.empty()) throw std::invalid_argument("SubcarrierMap: empty occupied set");
  if (alpha() >= n_fft)
    throw std::invalid_argument("SubcarrierMap: alpha must be < n_fft");
  int prev = -n_fft;  // below any valid index
  for (int k : occupied) {
    if (k < -n_fft / 2 || k > n_fft / 2 - 1)
      throw std::invalid_argument("SubcarrierMap: index outside [-N/2, N/2-1]");
    if (k <= prev)
      throw std::invalid_argument("SubcarrierMap: occupied not strictly ascending");
    prev = k;
  }
  if (!std::includes(occupied.begin(), occupied.end(), preamble_occupied.begin(),
                     preamble_occupied.end()))
    throw std::invalid_argument("SubcarrierMap: preamble_occupied not a subset of occupied");
  if (alpha() < 8)
    throw std::invalid_argument("SubcarrierMap: needs at least 8 occupied subcarriers");
  if (alpha() < 32)
    std::fprintf(stderr,
                 "ncofdm: warning: only %d occupied subcarriers; Gaussian "
                 "approximation of the waveform is rough below 32\n",
                 alpha());
}

void FrameConfig::validate() const {
  map.validate();
  if (n_cp < 0 || n_cp >= map.n_fft)
    throw std::invalid_argument("FrameConfig: need 0 <= n_cp < n_fft");
  if (n_symbols < 1) throw std::invalid_argument("FrameConfig: n_symbols < 1");
  if (interframe_gap < 0) throw std::invalid_argument("FrameConfig: negative gap");
  if (preamble_kind == PreambleKind::SchmidlCox && map.n_fft % 2 != 0)
    throw std::invalid_argument("FrameConfig: S&C preamble needs even n_fft");
}

std::vector<cplx> qpsk_symbols(int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("qpsk_symbols: count < 1");
  Rng rng(seed);
  std::vector<cplx> out(count);
  for (auto& s : out) s = rng.qpsk();
  return out;
}

PreambleRecord make_preamble(const FrameConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int n = cfg.map.n_fft;

  PreambleRecord rec;
  rec.kind = cfg.preamble_kind;
  rec.freq_symbols.assign(n, cplx{0.0, 0.0});

  std::vector<int> support;
  double scale = 1.0;
  if (cfg.preamble_kind == PreambleKind::SchmidlCox) {
    for (int k : cfg.map.occupied)
      if (k % 2 == 0) support.push_back(k);
    if (support.empty()) throw std::invalid_argument("empty preamble support");
    // sqrt(2) on half the subcarriers keeps the time-domain power equal to
    // a data symbol's.
    scale = 1.4142135623730950488;
  } else {
    support = cfg.map.occupied;
  }

  std::vector<cplx> symbols = qpsk_symbols(static_cast<int>(support.size()), seed);
  for (std::size_t i = 0; i < support.size(); ++i)
    rec.freq_symbols[wrap_bin(support[i], n)] = scale * symbols[i];

  rec.time_samples = ifft(rec.freq_symbols);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  double power = 0.0;
  for (auto& s : rec.time_samples) {
    s *= norm;
    power += std::norm(s);
  }
  rec.power = power / n;
  return rec;
}

std::vector<cplx> modulate_symbol(const std::vector<cplx>& freq_symbols, int n_cp) {
  const int n = static_cast<int>(freq_symbols.size());
  if (n < 1) throw std::invalid_argument("modulate_symbol: empty input");
  if (n_cp < 0 || n_cp >= n) throw std::invalid_argument("modulate_symbol: bad n_cp");

  std::vector<cplx> body = ifft(freq_symbols);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& s : body) s *= norm;

  std::vector<cplx> out(n_cp + n);
  for (int i = 0; i < n_cp; ++i) out[i] = body[n - n_cp + i];
  for (int i = 0; i < n; ++i) out[n_cp + i] = body[i];
  return out;
}

BasebandSignal assemble_frame(const FrameConfig& cfg, std::uint64_t data_seed,
                              const PreambleRecord& preamble) {
  cfg.validate();
  const int n = cfg.map.n_fft;
  if (static_cast<int>(preamble.time_samples.size()) != n ||
      preamble.kind != cfg.preamble_kind)
    throw std::invalid_argument("assemble_frame: preamble does not match config");

  const int sym_len = cfg.symbol_len();
  const std::int64_t total =
      static_cast<std::int64_t>(cfg.interframe_gap + cfg.n_symbols) * sym_len;

  BasebandSignal out;
  out.samples.assign(static_cast<std::size_t>(total), cplx{0.0, 0.0});
  out.origin_index = -static_cast<std::int64_t>(cfg.interframe_gap) * sym_len - cfg.n_cp;

  std::size_t pos = static_cast<std::size_t>(cfg.interframe_gap) * sym_len;
  std::vector<cplx> sym = modulate_symbol(preamble.freq_symbols, cfg.n_cp);
  std::copy(sym.begin(), sym.end(), out.samples.begin() + pos);
  pos += sym.size();

  Rng rng(data_seed);
  std::vector<cplx> d(n);
  for (int p = 1; p < cfg.n_symbols; ++p) {
    std::fill(d.begin(), d.end(), cplx{0.0, 0.0});
    for (int k : cfg.map.occupied) d[wrap_bin(k, n)] = rng.qpsk();
    sym = modulate_symbol(d, cfg.n_cp);
    std::copy(sym.begin(), sym.end(), out.samples.begin() + pos);
    pos += sym.size();
  }
  return out;
}

}  // namespace ncofdm
