// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "pixelcode/analysis.hpp"
#include "pixelcode/antenna_model.hpp"
#include "pixelcode/rng.hpp"

using namespace pixelcode;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix identity_z(int n) { return CMatrix::Identity(n, n); }

CMatrix finite_e(int k, int cols) {
  CMatrix e(2 * k, cols);
  for (int i = 0; i < 2 * k; ++i)
    for (int j = 0; j < cols; ++j) e(i, j) = Complex(0.1 * (i + 1), -0.2 * j);
  return e;
}

double max_rel_diff(const CVector& a, const oracle::Vec& b) {
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a(i) - b[static_cast<std::size_t>(i)]));
    den = std::max(den, std::abs(b[static_cast<std::size_t>(i)]));
  }
  return den > 0 ? num / den : num;
}

}  // namespace

TEST_CASE("coder bits index round trip", "[antenna_model]") {
  const AntennaCoder c{1, 0, 1, 1};
  CHECK(c.to_index() == 0b1011);
  CHECK(AntennaCoder::from_index(4, 0b1011) == c);
  CHECK(c.to_string() == "1011");
  CHECK(c.count_ones() == 3);
  CHECK(c.hamming_distance(AntennaCoder{0, 0, 1, 0}) == 2);
  CHECK_THROWS_AS(AntennaCoder({0, 2}), InvalidConfig);
}

TEST_CASE("validate_model reports invariant violations", "[antenna_model]") {
  SECTION("identity impedance is valid") {
    const auto m = fixtures::hand_model(identity_z(2), finite_e(1, 2));
    CHECK(validate_model(m).ok());
  }
  SECTION("asymmetric impedance violates reciprocity") {
    CMatrix z = identity_z(2);
    z(0, 1) = 2.0;
    z(1, 0) = 3.0;
    const auto report = validate_model(fixtures::hand_model(z, finite_e(1, 2)));
    CHECK(report.mentions("reciprocity"));
  }
  SECTION("indefinite resistance violates passivity") {
    // Oracle eigenvalues of [[1,2],[2,1]]: 3 and -1.
    const auto [hi, lo] = oracle::eig2_hermitian(1.0, 2.0, 1.0);
    CHECK(hi == 3.0);
    CHECK(lo == -1.0);
    CMatrix z(2, 2);
    z << 1.0, 2.0, 2.0, 1.0;
    const auto report = validate_model(fixtures::hand_model(z, finite_e(1, 2)));
    CHECK(report.mentions("passivity"));
    CHECK_FALSE(report.mentions("reciprocity"));
  }
  SECTION("non-finite patterns and wrong shapes are reported") {
    CMatrix e = finite_e(1, 2);
    e(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK(validate_model(fixtures::hand_model(identity_z(2), e)).mentions("finite"));
    auto m = fixtures::hand_model(identity_z(2), finite_e(1, 3));
    CHECK(validate_model(m).mentions("dimensions"));
  }
}

TEST_CASE("port_currents on hand-solvable networks", "[antenna_model]") {
  SECTION("open switch carries no current") {
    const auto m = fixtures::hand_model(identity_z(2), finite_e(1, 2));
    const CVector i = port_currents(m, AntennaCoder{1});
    CHECK(i(0) == Complex(1.0, 0.0));
    CHECK(i(1) == Complex(0.0, 0.0));
  }
  SECTION("single shorted switch") {
    CMatrix z(2, 2);
    z << 1.0, 1.0, 1.0, 1.0;
    const auto m = fixtures::hand_model(z, finite_e(1, 2));
    const CVector i = port_currents(m, AntennaCoder{0});
    CHECK_THAT(i(1).real(), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(i(1).imag(), WithinAbs(0.0, 1e-15));
  }
  SECTION("two switches, one open, against the penalty oracle") {
    CMatrix z(3, 3);
    z << 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 2.0;
    const auto m = fixtures::hand_model(z, finite_e(1, 3));
    const AntennaCoder b{0, 1};
    const oracle::Vec penalty = oracle::penalty_currents(m, b);
    // Frozen from the oracle: [1, -0.5, 0].
    CHECK_THAT(penalty[1].real(), WithinAbs(-0.5, 1e-9));
    CHECK_THAT(std::abs(penalty[2]), WithinAbs(0.0, 1e-9));
    const CVector i = port_currents(m, b);
    CHECK_THAT(i(1).real(), WithinAbs(-0.5, 1e-15));
    CHECK(i(2) == Complex(0.0, 0.0));
    CHECK(max_rel_diff(i, penalty) <= 1e-9);
  }
  SECTION("errors") {
    const auto m = fixtures::hand_model(identity_z(3), finite_e(1, 3));
    CHECK_THROWS_AS(port_currents(m, AntennaCoder{0}), DimensionMismatch);
    CMatrix z = CMatrix::Zero(3, 3);
    z(0, 0) = 1.0;
    const auto singular = fixtures::hand_model(z, finite_e(1, 3));
    CHECK_THROWS_AS(port_currents(singular, AntennaCoder{0, 0}), SingularNetwork);
    CHECK_NOTHROW(port_currents(singular, AntennaCoder{1, 1}));
  }
}

TEST_CASE("radiation_pattern superposes port patterns", "[antenna_model]") {
  CMatrix z(2, 2);
  z << 1.0, 1.0, 1.0, 1.0;
  const auto m = fixtures::hand_model(z, CMatrix::Identity(2, 2));
  const CVector e = radiation_pattern(m, AntennaCoder{0}, false);
  const oracle::Vec expected = oracle::pattern(m, AntennaCoder{0}, false);
  // Frozen from the oracle: [1, -1].
  CHECK_THAT(expected[0].real(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(expected[1].real(), WithinAbs(-1.0, 1e-15));
  CHECK(e(0) == Complex(1.0, 0.0));
  CHECK(e(1) == Complex(-1.0, 0.0));

  const CVector off = radiation_pattern(m, AntennaCoder{1}, false);
  CHECK(off == m.e_oc.col(0));
  CHECK_THAT(radiation_pattern(m, AntennaCoder{0}, true).norm(), WithinAbs(1.0, 1e-12));

  CMatrix dead = CMatrix::Zero(2, 2);
  dead(1, 1) = 1.0;
  const auto silent = fixtures::hand_model(identity_z(2), dead);
  CHECK_THROWS_AS(radiation_pattern(silent, AntennaCoder{1}, true), ZeroPattern);
  CHECK_NOTHROW(radiation_pattern(silent, AntennaCoder{1}, false));
}

TEST_CASE("synthesize_model is deterministic, valid and honours the spectrum", "[antenna_model]") {
  const auto a = fixtures::synthetic(10, 12, 7);
  const auto b = fixtures::synthetic(10, 12, 7);
  CHECK(a == b);
  CHECK_FALSE(a == fixtures::synthetic(10, 12, 8));
  CHECK(validate_model(a).ok());

  const auto s = fixtures::synthetic(6, 10, 3, std::vector<double>{1.0, 1.0});
  const PatternBasis basis = pattern_svd(s, 0.998);
  REQUIRE(basis.all_singular_values.size() == 7);
  CHECK_THAT(basis.all_singular_values[0], WithinAbs(1.0, 1e-9));
  CHECK_THAT(basis.all_singular_values[1], WithinAbs(1.0, 1e-9));
  for (std::size_t i = 2; i < 7; ++i) CHECK_THAT(basis.all_singular_values[i], WithinAbs(0.0, 1e-9));
  CHECK(validate_model(s).ok());

  SynthesisSpec bad;
  bad.singular_spectrum = std::vector<double>{0.5, 1.0};
  CHECK_THROWS_AS(synthesize_model(bad), InvalidSpec);
  bad.singular_spectrum = std::vector<double>{-1.0};
  CHECK_THROWS_AS(synthesize_model(bad), InvalidSpec);
  bad.singular_spectrum = std::vector<double>(20, 1.0);
  bad.q_switches = 4;
  CHECK_THROWS_AS(synthesize_model(bad), InvalidSpec);
}

TEST_CASE("model files round trip and reject malformed input", "[antenna_model]") {
  const auto m = fixtures::synthetic(5, 6, 11);
  const std::string text = save_model(m);
  const auto back = load_model(text);
  CHECK(back == m);
  CHECK(save_model(back) == text);

  SECTION("wrong e_oc column count names the field") {
    const auto wide = fixtures::synthetic(39, 72, 1);
    auto doc = nlohmann::json::parse(save_model(wide));
    const auto rows = static_cast<std::size_t>(2 * 72);
    doc["e_oc_re"] = std::vector<double>(rows * 30, 0.0);
    doc["e_oc_im"] = std::vector<double>(rows * 30, 0.0);
    CHECK_THROWS_WITH(load_model(doc.dump()), ContainsSubstring("e_oc columns"));
    CHECK_THROWS_AS(load_model(doc.dump()), ParseError);
  }
  SECTION("non-finite impedance is a parse error") {
    std::string broken = text;
    const auto pos = broken.find("\"z_re\":[") + 8;
    broken.insert(pos, "NaN,");
    CHECK_THROWS_AS(load_model(broken), ParseError);
    auto doc = nlohmann::json::parse(text);
    doc["z_re"][0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(load_model(doc.dump()), ParseError);
    std::string overflow = text;
    overflow.replace(overflow.find("\"z_re\":[") + 8, 0, "1e400,");
    CHECK_THROWS_AS(load_model(overflow), ParseError);
  }
  SECTION("invalid physics is rejected after parsing") {
    auto doc = nlohmann::json::parse(text);
    doc["z_re"][1] = doc["z_re"][1].get<double>() + 5.0;
    CHECK_THROWS_AS(load_model(doc.dump()), ValidationFailed);
  }
  SECTION("garbage") {
    CHECK_THROWS_AS(load_model("{"), ParseError);
    CHECK_THROWS_AS(load_model("{}"), ParseError);
  }
}

TEST_CASE("open/short exactness against the penalty oracle", "[antenna_model][property]") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng = derive_stream(seed, StreamTag::kTrial);
    const int q = 1 + static_cast<int>(seed % 10);
    const auto m = fixtures::synthetic(q, 3, seed);
    for (int rep = 0; rep < 5; ++rep) {
      const auto coder = AntennaCoder::from_index(q, rng() & ((std::uint64_t{1} << q) - 1));
      CHECK(max_rel_diff(port_currents(m, coder), oracle::penalty_currents(m, coder)) <= 1e-6);
    }
  }
}

TEST_CASE("currents and patterns are linear in the antenna current", "[antenna_model][property]") {
  const auto m = fixtures::synthetic(8, 4, 21);
  const Complex scale(2.5, -1.25);
  for (std::uint64_t idx : {0ULL, 17ULL, 200ULL, 255ULL}) {
    const auto c = AntennaCoder::from_index(8, idx);
    const CVector base = port_currents(m, c);
    const CVector scaled = port_currents(m, c, scale);
    CHECK((scaled - scale * base).norm() <= 1e-12 * scaled.norm());
  }
  const auto off = AntennaCoder(8, 1);
  CHECK(port_currents(m, off).tail(8).isZero(0.0));
  CHECK(radiation_pattern(m, off, false) == m.e_oc.col(0));
}
