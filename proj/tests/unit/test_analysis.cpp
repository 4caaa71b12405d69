// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include <catch_amalgamated.hpp>

#include <cmath>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "pixelcode/analysis.hpp"
#include "pixelcode/rng.hpp"
#include "pixelcode/sebo.hpp"

using namespace pixelcode;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("EADoF counts the singular values needed for the energy threshold", "[analysis]") {
  const auto flat = fixtures::synthetic(8, 10, 1, std::vector<double>{1.0, 1.0, 1.0});
  CHECK(pattern_svd(flat).eadof == 3);

  const std::vector<double> s{std::sqrt(0.9), std::sqrt(0.09), std::sqrt(0.009), std::sqrt(0.001)};
  const auto decay = fixtures::synthetic(8, 10, 2, s);
  const PatternBasis b = pattern_svd(decay, 0.998);
  CHECK(b.eadof == 3);
  REQUIRE(b.cumulative_energy.size() == 9);
  CHECK_THAT(b.cumulative_energy[0], WithinAbs(0.9, 1e-12));
  CHECK_THAT(b.cumulative_energy[1], WithinAbs(0.99, 1e-12));
  CHECK_THAT(b.cumulative_energy[2], WithinAbs(0.999, 1e-12));
  CHECK(b.u_matrix.cols() == 3);
  CHECK(b.v_matrix.cols() == 3);
  CHECK(b.singular_values.size() == 3);
  CHECK(pattern_svd(decay, 0.9).eadof == 1);
  CHECK(pattern_svd(decay, 1.0).eadof == 4);

  const auto full = fixtures::synthetic(5, 10, 3);
  CHECK(pattern_svd(full, 1.0).eadof == 6);

  CHECK_THROWS_AS(pattern_svd(full, 0.0), InvalidConfig);
  CHECK_THROWS_AS(pattern_svd(full, 1.5), InvalidConfig);
  auto zero = full;
  zero.e_oc.setZero();
  CHECK_THROWS_AS(pattern_svd(zero), DegenerateModel);
}

TEST_CASE("equivalent combiner reproduces the channel", "[analysis][property]") {
  const auto m = fixtures::synthetic(8, 12, 4, std::vector<double>{2.0, 1.0, 0.5});
  const PatternBasis basis = pattern_svd(m, 0.998);
  REQUIRE(basis.eadof == 3);
  Rng rng = derive_stream(4, StreamTag::kTrial);
  const CVector e_t = isotropic_pattern(12);
  const auto ch = sample_virtual_channel(12, rng);
  const CVector reduced = reduced_channel(basis, ch, e_t);
  const auto hv = oracle::from_eigen(ch.h_v);
  const auto et = oracle::from_eigen(e_t);
  for (std::uint64_t idx = 0; idx < 256; idx += 7) {
    const auto c = AntennaCoder::from_index(8, idx);
    const EquivalentCombiner w = equivalent_combiner(basis, m, c);
    CHECK(w.norm_residual <= 1e-10);
    const double direct = oracle::siso_gain(m, c, hv, et);
    CHECK_THAT(std::norm(w.w.dot(reduced)), WithinRel(direct, 1e-9));
    CHECK(direct <= gain_upper_bound(basis, ch, e_t) * (1 + 1e-12));
  }
  CHECK_THAT(gain_upper_bound(basis, ch.h_v * e_t), WithinRel(reduced.squaredNorm(), 1e-14));
}

TEST_CASE("the maximum-ratio bound has mean R", "[analysis][statistical]") {
  const auto m = fixtures::synthetic(10, 16, 5, std::vector<double>{1.0, 0.8, 0.6, 0.4, 0.3});
  const PatternBasis basis = pattern_svd(m, 0.999999);
  REQUIRE(basis.eadof == 5);
  const CVector e_t = isotropic_pattern(16);
  const int n = 10000;
  double sum = 0.0;
  for (int t = 0; t < n; ++t) {
    Rng rng = derive_stream(5, StreamTag::kTrial, static_cast<std::uint64_t>(t));
    sum += gain_upper_bound(basis, sample_forward_field(e_t, rng));
  }
  // Sum of R unit exponentials: variance R.
  CHECK(std::abs(sum / n - 5.0) <= 3.0 * std::sqrt(5.0 / n));
}

TEST_CASE("with one degree of freedom the bound is attained", "[analysis]") {
  const auto m = fixtures::synthetic(6, 8, 6, std::vector<double>{1.0});
  const PatternBasis basis = pattern_svd(m);
  REQUIRE(basis.eadof == 1);
  const CoderResponse response(m);
  for (std::uint64_t t = 0; t < 5; ++t) {
    Rng rng = derive_stream(6, StreamTag::kTrial, t);
    const CVector f = sample_forward_field(isotropic_pattern(8), rng);
    const SisoGainEvaluator evaluator(response, f);
    const double best = exhaustive_maximize([&](const AntennaCoder& c) { return evaluator.gain(c); }, 6).second;
    CHECK_THAT(best, WithinRel(gain_upper_bound(basis, f), 1e-9));
  }
}

TEST_CASE("pattern correlation matrix", "[analysis][property]") {
  const auto m = fixtures::synthetic(7, 9, 7);
  const std::vector<AntennaCoder> coders{AntennaCoder::from_index(7, 3), AntennaCoder::from_index(7, 90),
                                         AntennaCoder::from_index(7, 3), AntennaCoder::from_index(7, 127)};
  const CMatrix rho = codebook_correlation(m, coders);
  for (int i = 0; i < 4; ++i) {
    CHECK_THAT(rho(i, i).real(), WithinAbs(1.0, 1e-12));
    CHECK(rho(i, i).imag() == 0.0);
    for (int j = 0; j < 4; ++j) {
      CHECK(rho(i, j) == std::conj(rho(j, i)));
      const auto ref = oracle::inner(oracle::pattern(m, coders[i], true), oracle::pattern(m, coders[j], true));
      CHECK(std::abs(rho(i, j) - ref) < 1e-10);
    }
  }
  CHECK_THAT(std::abs(rho(0, 2)), WithinAbs(1.0, 1e-12));
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12);

  const auto report = analysis_report(pattern_svd(m), m, coders);
  CHECK(report.at("eadof").get<int>() == pattern_svd(m).eadof);
  CHECK(report.at("rho_re").size() == 4);
  CHECK(report.at("combiner_residuals").size() == 4);
}
