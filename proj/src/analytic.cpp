// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include "ncofdm/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "ncofdm/fft.hpp"

namespace ncofdm::analytic {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

// Periodic sinc ratio sin(pi M theta / N) / sin(pi theta / N), evaluated by
// limit (-> M cos(pi M theta / N) / cos(pi theta / N)) where the denominator
// vanishes, i.e. theta at multiples of N; switchover below 1e-8.
double dirichlet_ratio(double theta, double m, int n) {
  const double den = std::sin(kPi * theta / n);
  if (std::abs(std::remainder(theta, static_cast<double>(n))) < 1e-8)
    return m * std::cos(kPi * m * theta / n) / std::cos(kPi * theta / n);
  return std::sin(kPi * m * theta / n) / den;
}

cplx cis(double a) { return {std::cos(a), std::sin(a)}; }
}  // namespace

MomentPrediction path_component_moments(CorrelationCase c, PreambleKind kind,
                                        std::int64_t n, std::int64_t l, double k,
                                        double nu, int n_fft, int n_cp,
                                        double sigma_x_sq) {
  const std::int64_t off = n - l;
  const double theta = nu - k;
  const double s2 = sigma_x_sq;
  const double s4 = sigma_x_sq * sigma_x_sq;
  const double N = n_fft;

  auto check_offset = [&](std::int64_t want) {
    if (off != want)
      throw std::invalid_argument("path_component_moments: case inconsistent with n-l");
  };
  auto require_sc = [&] {
    if (kind != PreambleKind::SchmidlCox)
      throw std::invalid_argument("path_component_moments: case needs the S&C preamble");
  };

  // Leading rotation of every mean is e^{j 2 pi n nu / N} with n = l + offset.
  const auto lead = [&](double offset) {
    return cis(2.0 * kPi * (static_cast<double>(l) + offset) * nu / N);
  };

  MomentPrediction out;
  switch (c) {
    case CorrelationCase::A: {
      check_offset(-n_fft);
      out.mean = s2 * lead(-N) * cis(kPi * theta * (2.0 - (n_cp + 1.0) / N)) *
                 dirichlet_ratio(theta, n_cp, n_fft);
      out.variance = s4 * n_cp;
      break;
    }
    case CorrelationCase::B: {
      check_offset(-n_fft / 2);
      require_sc();
      out.mean = s2 * lead(-N / 2) * cis(kPi * theta * (1.5 - (n_cp + 1.0) / N)) *
                 dirichlet_ratio(theta, N / 2 + n_cp, n_fft);
      out.variance = s4 * N / 2 + (1.0 + 2.0 * std::cos(kPi * theta)) * s4 * n_cp;
      out.in_validity_domain = std::abs(theta) <= 0.5;
      break;
    }
    case CorrelationCase::C: {
      check_offset(0);
      out.mean = s2 * lead(0.0) * cis(kPi * theta * (1.0 - 1.0 / N)) *
                 dirichlet_ratio(theta, N, n_fft);
      out.variance = kind == PreambleKind::SchmidlCox
                         ? (1.0 + std::cos(kPi * theta)) * N * s4
                         : s4 * N;
      break;
    }
    case CorrelationCase::D: {
      check_offset(n_fft / 2);
      require_sc();
      out.mean = s2 * lead(N / 2) * cis(kPi * theta * (0.5 - 1.0 / N)) *
                 dirichlet_ratio(theta, N / 2, n_fft);
      out.variance = s4 * N;
      break;
    }
    case CorrelationCase::Otherwise: {
      // A and C exist for both kinds; B and D only with two repeated halves.
      const bool sc = kind == PreambleKind::SchmidlCox;
      if (off == -n_fft || off == 0 ||
          (sc && (off == n_fft / 2 || off == -n_fft / 2)))
        throw std::invalid_argument(
            "path_component_moments: offset belongs to a correlated case");
      out.mean = cplx{0.0, 0.0};
      const double overlap = std::min(
          std::max(0.0, static_cast<double>(n_fft + n_cp + off)), static_cast<double>(n_fft));
      out.variance = s4 * overlap;
      break;
    }
  }
  return out;
}

double interference_variance_component(const std::vector<double>& interference_psd,
                                       const std::vector<double>& preamble_psd,
                                       int k) {
  const int n = static_cast<int>(interference_psd.size());
  if (static_cast<int>(preamble_psd.size()) != n || n == 0)
    throw std::invalid_argument("interference_variance_component: size mismatch");
  double acc = 0.0;
  for (int k1 = 0; k1 < n; ++k1)
    acc += interference_psd[k1] * preamble_psd[wrap_bin(k1 - k, n)];
  return acc;
}

double full_variance(const ChannelRealization& ch,
                     const std::vector<MomentPrediction>& per_path, double v_i,
                     double sigma_w_sq, double sigma_x_sq, int n_fft) {
  if (per_path.size() != ch.taps.size())
    throw std::invalid_argument("full_variance: path count mismatch");
  double acc = v_i + n_fft * sigma_w_sq * sigma_x_sq;
  for (std::size_t l = 0; l < per_path.size(); ++l)
    acc += std::norm(ch.taps[l]) * per_path[l].variance;
  return acc;
}

CfoEstimatorBounds cfo_estimator_bounds(int n_fft, double snr_linear) {
  if (snr_linear <= 0) throw std::invalid_argument("cfo_estimator_bounds: snr <= 0");
  CfoEstimatorBounds b;
  b.variance = 1.0 / (4.0 * n_fft * snr_linear);
  b.crlb = 6.0 / (4.0 * kPi * kPi * n_fft * snr_linear);
  return b;
}

std::vector<double> nbi_psd(double center_freq, double sigma_i_sq, int n_fft) {
  std::vector<double> psd(n_fft, 0.0);
  const double rounded = std::round(center_freq);
  if (std::abs(center_freq - rounded) < 1e-12) {
    psd[wrap_bin(static_cast<int>(rounded), n_fft)] = n_fft * sigma_i_sq;
    return psd;
  }
  for (int k = -n_fft / 2; k < n_fft / 2; ++k) {
    const double d = dirichlet_ratio(center_freq - k, n_fft, n_fft);
    psd[wrap_bin(k, n_fft)] = sigma_i_sq / n_fft * d * d;
  }
  return psd;
}

std::vector<double> wbi_psd(const std::vector<double>& bins, double sigma_i_sq,
                            int n_fft) {
  if (bins.empty()) throw std::invalid_argument("wbi_psd: empty tone set");
  std::vector<double> psd(n_fft, 0.0);
  const double per_tone = sigma_i_sq / bins.size();
  for (double f : bins) {
    const double rounded = std::round(f);
    if (std::abs(f - rounded) < 1e-12) {
      psd[wrap_bin(static_cast<int>(rounded), n_fft)] += n_fft * per_tone;
      continue;
    }
    for (int k = -n_fft / 2; k < n_fft / 2; ++k) {
      const double d = dirichlet_ratio(f - k, n_fft, n_fft);
      psd[wrap_bin(k, n_fft)] += per_tone / n_fft * d * d;
    }
  }
  return psd;
}

std::vector<double> preamble_psd(const SubcarrierMap& map, PreambleKind kind) {
  std::vector<double> psd(map.n_fft, 0.0);
  if (kind == PreambleKind::SchmidlCox) {
    for (int k : map.occupied)
      if (k % 2 == 0) psd[wrap_bin(k, map.n_fft)] = 2.0;
  } else {
    for (int k : map.occupied) psd[wrap_bin(k, map.n_fft)] = 1.0;
  }
  return psd;
}

}  // namespace ncofdm::analytic
