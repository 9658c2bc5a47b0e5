// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include "ncofdm/signal.hpp"

#include <bit>
#include <cstdio>
#include <stdexcept>

namespace ncofdm {

static_assert(std::endian::native == std::endian::little,
              "I/Q dump assumes a little-endian host");

void write_iq_f64(const BasebandSignal& x, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_iq_f64: cannot open " + path);
  for (const cplx& s : x.samples) {
    double iq[2] = {s.real(), s.imag()};
    if (std::fwrite(iq, sizeof(double), 2, f) != 2) {
      std::fclose(f);
      throw std::runtime_error("write_iq_f64: short write to " + path);
    }
  }
  std::fclose(f);
}

}  // namespace ncofdm
