// SPDX-License-Identifier: Apache-2.0
//
// ncofdm-sync: interference-robust preamble synchronization for NC-OFDM
// Copyright (C) 2026 the ncofdm-sync authors

#include <cmath>

#include "doctest.h"
#include "ncofdm/analytic.hpp"
#include "ncofdm/fft.hpp"
#include "ncofdm/harness.hpp"
#include "ncofdm/impairments.hpp"
#include "ncofdm/rng.hpp"
#include "ncofdm/sync_luisa.hpp"
#include "test_helpers.hpp"

using namespace ncofdm;
namespace an = ncofdm::analytic;
using Case = an::CorrelationCase;

TEST_CASE("path component moments: pinned closed-form values") {
  const int N = 256, NCP = 16;
  const double s2 = 1.0;

  SUBCASE("case C at nu = k: peak mean N sigma_x^2, variance by kind") {
    auto simple = an::path_component_moments(Case::C, PreambleKind::Simple, 0, 0,
                                             0.4, 0.4, N, NCP, s2);
    CHECK(std::abs(simple.mean - cplx{256.0, 0.0}) < 1e-9);
    CHECK(simple.variance == doctest::Approx(256.0));

    auto sc = an::path_component_moments(Case::C, PreambleKind::SchmidlCox, 0, 0,
                                         0.0, 0.0, N, NCP, s2);
    CHECK(sc.variance == doctest::Approx(512.0));  // (1+cos 0) N
  }

  SUBCASE("case C, S&C, one bin off the CFO: variance is exactly zero") {
    auto m = an::path_component_moments(Case::C, PreambleKind::SchmidlCox, 3, 3,
                                        1.3, 0.3, N, NCP, s2);
    CHECK(std::abs(m.variance) < 1e-12);
  }

  SUBCASE("'otherwise' piecewise variance endpoints") {
    auto zero = an::path_component_moments(Case::Otherwise, PreambleKind::Simple,
                                           -(N + NCP), 0, 0, 0, N, NCP, s2);
    CHECK(zero.variance == 0.0);
    CHECK(std::abs(zero.mean) == 0.0);

    auto cp_edge = an::path_component_moments(Case::Otherwise, PreambleKind::Simple,
                                              -NCP, 0, 0, 0, N, NCP, s2);
    CHECK(cp_edge.variance == doctest::Approx(256.0));

    CHECK_THROWS(an::path_component_moments(Case::Otherwise, PreambleKind::Simple,
                                            0, 0, 0, 0, N, NCP, s2));
  }

  SUBCASE("case/offset consistency is enforced") {
    CHECK_THROWS(an::path_component_moments(Case::A, PreambleKind::Simple, 0, 0,
                                            0, 0, N, NCP, s2));
    CHECK_THROWS(an::path_component_moments(Case::B, PreambleKind::Simple, -128,
                                            0, 0, 0, N, NCP, s2));  // kind
    CHECK_THROWS(an::path_component_moments(Case::D, PreambleKind::Simple, 128,
                                            0, 0, 0, N, NCP, s2));  // kind
    // simple preamble has no half-repeat: offset -N/2 is 'otherwise'
    auto m = an::path_component_moments(Case::Otherwise, PreambleKind::Simple,
                                        -128, 0, 0, 0, N, NCP, s2);
    CHECK(m.variance == doctest::Approx(144.0));
  }

  SUBCASE("case B validity flag outside |nu - k| <= 0.5") {
    auto in = an::path_component_moments(Case::B, PreambleKind::SchmidlCox, -128,
                                         0, 0, 0.5, N, NCP, s2);
    CHECK(in.in_validity_domain);
    auto out = an::path_component_moments(Case::B, PreambleKind::SchmidlCox, -128,
                                          0, 0, 0.9, N, NCP, s2);
    CHECK(!out.in_validity_domain);
  }

  SUBCASE("scaling in sigma_x^2") {
    auto a = an::path_component_moments(Case::A, PreambleKind::Simple, -N, 0,
                                        0.0, 0.25, N, NCP, 1.0);
    auto b = an::path_component_moments(Case::A, PreambleKind::Simple, -N, 0,
                                        0.0, 0.25, N, NCP, 0.5);
    CHECK(std::abs(b.mean - 0.5 * a.mean) < 1e-12);
    CHECK(b.variance == doctest::Approx(0.25 * a.variance));
  }
}

TEST_CASE("interference variance component") {
  const int N = 256;

  SUBCASE("uniform interference and preamble: N sigma_i^2 sigma_x^2 at all k") {
    const double si2 = 2.0, sx2 = 0.7;
    std::vector<double> g(N, si2), d(N, sx2);
    for (int k : {-100, -3, 0, 17, 127})
      CHECK(an::interference_variance_component(g, d, k) ==
            doctest::Approx(N * si2 * sx2));
  }

  SUBCASE("tone in the notch, S&C preamble, k = 0: exactly zero") {
    auto g = an::nbi_psd(24.0, 1.0, N);
    auto d = an::preamble_psd(map_no_guards(), PreambleKind::SchmidlCox);
    CHECK(an::interference_variance_component(g, d, 0) == 0.0);
    // ... but not once k shifts the notch onto occupied spectrum
    CHECK(an::interference_variance_component(g, d, 24 - 16) > 0.0);
  }

  SUBCASE("both single-bin and aligned: N^2 sigma_i^2 sigma_x^2") {
    const double si2 = 0.5, sx2 = 2.0;
    std::vector<double> g(N, 0.0), d(N, 0.0);
    g[wrap_bin(24, N)] = N * si2;
    d[wrap_bin(10, N)] = N * sx2;
    CHECK(an::interference_variance_component(g, d, 14) ==
          doctest::Approx(double(N) * N * si2 * sx2));
    CHECK(an::interference_variance_component(g, d, 13) == 0.0);
  }

  SUBCASE("invariant under simultaneous cyclic shift of both inputs") {
    Rng rng(9);
    std::vector<double> g(N), d(N);
    for (int i = 0; i < N; ++i) {
      g[i] = rng.uniform01();
      d[i] = rng.uniform01();
    }
    std::vector<double> g5(N), d5(N);
    for (int i = 0; i < N; ++i) {
      g5[wrap_bin(i + 5, N)] = g[i];
      d5[wrap_bin(i + 5, N)] = d[i];
    }
    for (int k : {-31, 0, 7})
      CHECK(an::interference_variance_component(g, d, k) ==
            doctest::Approx(an::interference_variance_component(g5, d5, k)));
  }
}

TEST_CASE("full variance assembly") {
  const int N = 256;

  SUBCASE("noise only") {
    ChannelRealization ch{{cplx{0, 0}}, "null"};
    std::vector<an::MomentPrediction> paths(1);
    paths[0].variance = 123.0;  // zero tap weight, contributes nothing
    CHECK(an::full_variance(ch, paths, 0.0, 0.25, 0.5, N) ==
          doctest::Approx(N * 0.25 * 0.5));
  }

  SUBCASE("matches the noise-floor expectation with uniform interference") {
    // with 'otherwise' path variances and flat interference, the Eq-level
    // identity V[Y(n,k)] = E[sigma_thr^2(n)] holds
    const double sx2 = 0.7227, sw2 = 0.3, si2 = 1.1;
    ChannelRealization ch = sample_eva_channel(256, 16, 3.84e6, 5);
    const std::int64_t n = -200;
    std::vector<an::MomentPrediction> paths(ch.length());
    for (int l = 0; l < ch.length(); ++l)
      paths[l] = an::path_component_moments(Case::Otherwise, PreambleKind::Simple,
                                            n, l, 0.0, 0.0, N, 16, sx2);
    std::vector<double> g(N, si2), d(N, sx2);
    const double vi = an::interference_variance_component(g, d, 0);
    const double v = an::full_variance(ch, paths, vi, sw2, sx2, N);

    double want = sx2 * (si2 + sw2) * N;
    for (int l = 0; l < ch.length(); ++l)
      want += std::norm(ch.taps[l]) * sx2 * sx2 *
              std::min(std::max(0.0, 256.0 + 16.0 + double(n - l)), 256.0);
    CHECK(v == doctest::Approx(want));
  }

  SUBCASE("matches the Monte Carlo variance of Y(n,k) off the peaks") {
    // single fixed channel, noise + narrowband interference, fixed (n,k)
    const int trials = 10000;
    FrameConfig cfg;
    cfg.map = map_no_guards();
    cfg.n_cp = 16;
    cfg.n_symbols = 4;
    cfg.interframe_gap = 1;
    cfg.preamble_kind = PreambleKind::Simple;
    const double sx2 = cfg.map.signal_power();
    ChannelRealization ch{{cplx{0.8, 0}, cplx{0, 0.6}}, "two-tap"};
    const double snr_db = 6.0, sir_db = 3.0;
    const std::int64_t n = -40;
    const int k = -3;

    // Gaussian-model frames: the closed forms assume sample independence
    cplx mean{0, 0};
    double power = 0;
    for (int t = 0; t < trials; ++t) {
      auto [tx, rp] = ncofdm::testing::model_gaussian_frame(
          PreambleKind::Simple, derive_seed(1100, t), 256, 16, 1, 4);
      for (auto& s : tx.samples) s *= std::sqrt(sx2);
      for (auto& s : rp.time_samples) s *= std::sqrt(sx2);
      rp.power = sx2;
      ImpairmentConfig imp;
      imp.n_fft = 256;
      imp.cfo = 0.37;
      imp.snr_db = snr_db;
      imp.sir_db = sir_db;
      imp.interference = InterferenceKind::Nbi;
      imp.nbi.center_freq = 24.0;
      imp.signal_power = sx2;
      auto r = corrupt(tx, imp, ch, derive_seed(1101, t));
      const cplx y = sync_variable_at(r, rp, n, k);
      mean += y;
      power += std::norm(y);
    }
    mean /= trials;
    const double emp_var = power / trials - std::norm(mean);

    std::vector<an::MomentPrediction> paths(2);
    for (int l = 0; l < 2; ++l)
      paths[l] = an::path_component_moments(Case::Otherwise, PreambleKind::Simple,
                                            n, l, k, 0.37, 256, 16, sx2);
    const double si2 = sx2 * std::pow(10.0, -sir_db / 10.0);
    const double sw2 = sx2 * std::pow(10.0, -snr_db / 10.0);
    auto g = an::nbi_psd(24.0, si2, 256);
    // the white-reference model spreads the preamble PSD flat across bins
    std::vector<double> d(256, sx2);
    const double vi = an::interference_variance_component(g, d, k);
    const double want = an::full_variance(ch, paths, vi, sw2, sx2, 256);
    CHECK(std::abs(emp_var - want) / want < 0.05);
  }
}

TEST_CASE("CFO estimator bounds") {
  auto b = an::cfo_estimator_bounds(256, 100.0);
  CHECK(b.variance == doctest::Approx(9.765625e-6));
  CHECK(b.crlb < b.variance);
  CHECK(b.variance / b.crlb == doctest::Approx(M_PI * M_PI / 6.0));

  auto b2 = an::cfo_estimator_bounds(1024, 3.7);
  CHECK(b2.variance / b2.crlb == doctest::Approx(M_PI * M_PI / 6.0));
  CHECK_THROWS(an::cfo_estimator_bounds(256, 0.0));
}

TEST_CASE("moment oracle against the model simulation (spot checks)") {
  // full sweep lives in the acceptance suite; here one case per family
  const int N = 256, NCP = 16, trials = 4000;
  struct Probe {
    Case c;
    PreambleKind kind;
    std::int64_t off;
  };
  for (const Probe& p : {Probe{Case::C, PreambleKind::SchmidlCox, 0},
                         Probe{Case::D, PreambleKind::SchmidlCox, 128},
                         Probe{Case::B, PreambleKind::SchmidlCox, -128},
                         Probe{Case::A, PreambleKind::Simple, -256}}) {
    const double nu = 0.25;
    cplx sum{0, 0};
    double power = 0;
    for (int t = 0; t < trials; ++t) {
      auto [tx, rp] = ncofdm::testing::model_gaussian_frame(p.kind,
                                                            derive_seed(1300, t),
                                                            N, NCP, 2, 3);
      ImpairmentConfig imp;
      imp.n_fft = N;
      imp.cfo = nu;
      auto r = corrupt(tx, imp, identity_channel(), 1);
      const cplx y = sync_variable_at(r, rp, p.off, 0.0);
      sum += y;
      power += std::norm(y);
    }
    const cplx mean = sum / double(trials);
    const double var = power / trials - std::norm(mean);
    const auto pred =
        an::path_component_moments(p.c, p.kind, p.off, 0, 0.0, nu, N, NCP, 1.0);
    const double se = std::sqrt(pred.variance / trials);
    CHECK(std::abs(mean - pred.mean) < 3 * se);
    CHECK(std::abs(var - pred.variance) / pred.variance < 0.05);
  }
}
