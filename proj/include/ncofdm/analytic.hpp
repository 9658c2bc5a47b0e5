// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#pragma once

#include <cstdint>
#include <vector>

#include "ncofdm/impairments.hpp"
#include "ncofdm/signal.hpp"
#include "ncofdm/waveform.hpp"

namespace ncofdm::analytic {

// Closed-form first and second moments of the synchronization variable's
// channel-path components Y_l(n,k), per alignment case of the correlation
// window against the received preamble. These are the executable oracle the
// simulator is validated against.

/// Window alignments with nonzero mean. The offset is n - l:
///   A: -N (only the preamble CP inside the window)
///   B: -N/2 (S&C kind only)
///   C: 0 (full alignment)
///   D: +N/2 (S&C kind only)
///   Otherwise: any other offset (zero mean; variance counts the nonzero
///   received samples under the window).
enum class CorrelationCase { A, B, C, D, Otherwise };

struct MomentPrediction {
  cplx mean{0.0, 0.0};
  double variance = 0.0;
  // Case B's variance term (1 + 2 cos(pi (nu-k))) is only trusted for
  // |nu-k| <= 0.5; outside, this flag is cleared instead of clamping.
  bool in_validity_domain = true;
};

/// Mean and variance of Y_l(n,k) for the given case. k may be real-valued.
/// Throws when the case is inconsistent with n-l or with the preamble kind.
MomentPrediction path_component_moments(CorrelationCase c, PreambleKind kind,
                                        std::int64_t n, std::int64_t l, double k,
                                        double nu, int n_fft, int n_cp,
                                        double sigma_x_sq);

/// Interference-related variance component
///   V_i(n,k) = sum_{k1} E|g_{k1}|^2 E|d_{(k1-k) mod N}|^2,
/// the cyclic cross-correlation of the interference PSD and the preamble
/// symbol PSD (both length N, FFT bin order).
double interference_variance_component(const std::vector<double>& interference_psd,
                                       const std::vector<double>& preamble_psd,
                                       int k);

/// V[Y(n,k)] = sum_l |h(l)|^2 V[Y_l(n,k)] + V_i + N sigma_w^2 sigma_x^2.
double full_variance(const ChannelRealization& ch,
                     const std::vector<MomentPrediction>& per_path, double v_i,
                     double sigma_w_sq, double sigma_x_sq, int n_fft);

struct CfoEstimatorBounds {
  double variance = 0.0;  // 1 / (4 N SNR)
  double crlb = 0.0;      // 6 / (4 pi^2 N SNR)
};

/// Fine-CFO estimator variance in AWGN and the corresponding Cramer-Rao
/// bound; their ratio is pi^2/6 for every input.
CfoEstimatorBounds cfo_estimator_bounds(int n_fft, double snr_linear);

/// PSD builders (E|g_k|^2 resp. E|d_k|^2, FFT bin order) for the V_i curve.
std::vector<double> nbi_psd(double center_freq, double sigma_i_sq, int n_fft);
std::vector<double> wbi_psd(const std::vector<double>& bins, double sigma_i_sq,
                            int n_fft);
std::vector<double> preamble_psd(const SubcarrierMap& map, PreambleKind kind);

}  // namespace ncofdm::analytic
