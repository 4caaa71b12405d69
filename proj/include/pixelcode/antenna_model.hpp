// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pixelcode/common.hpp"

namespace pixelcode {

/// Switch states of a pixel antenna. Bit q is 0 when switch q is on (short)
/// and 1 when it is off (open).
class AntennaCoder {
 public:
  AntennaCoder() = default;
  explicit AntennaCoder(int length, std::uint8_t fill = 0);
  AntennaCoder(std::initializer_list<int> bits);
  explicit AntennaCoder(const std::vector<int>& bits);

  // Coder whose bit 0 is the most significant bit of `index`, so increasing
  // index walks coders in lexicographic order.
  static AntennaCoder from_index(int length, std::uint64_t index);
  std::uint64_t to_index() const;

  int size() const { return static_cast<int>(bits_.size()); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](int q) const { return bits_[static_cast<std::size_t>(q)]; }
  void set(int q, std::uint8_t value);
  void flip(int q) { bits_[static_cast<std::size_t>(q)] ^= 1U; }

  int count_ones() const;
  int hamming_distance(const AntennaCoder& other) const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::string to_string() const;

  friend bool operator==(const AntennaCoder&, const AntennaCoder&) = default;
  friend auto operator<=>(const AntennaCoder&, const AntennaCoder&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Multiport description of a pixel antenna: a (Q+1)-port impedance matrix
/// (port 0 is the antenna port) and the open-circuit pattern matrix whose
/// first K rows are theta-polarized samples and last K rows phi-polarized.
struct PixelAntennaModel {
  int q_switches = 0;
  int k_angles = 0;
  CMatrix z_matrix;
  CMatrix e_oc;
  double frequency_hz = 2.4e9;

  Complex z_aa() const { return z_matrix(0, 0); }
  auto z_pa() const { return z_matrix.col(0).tail(q_switches); }
  auto z_pp() const { return z_matrix.bottomRightCorner(q_switches, q_switches); }

  friend bool operator==(const PixelAntennaModel& a, const PixelAntennaModel& b);
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  bool mentions(std::string_view keyword) const;
  std::string summary() const;
};

// Reciprocity, passivity and shape checks; violations are reported, not thrown.
ValidationReport validate_model(const PixelAntennaModel& model);

inline constexpr double kSingularTolerance = 1e-12;
inline constexpr double kZeroPatternNorm = 1e-12;

/// Port currents [i_A; i_P(b)] for the given switch states.
///
/// Off switches carry exactly zero current. The on-switch currents solve the
/// reduced system Z_PP[S,S] i_S = -z_PA[S] i_A, which is the open/short limit
/// of the loaded network without any large finite load.
CVector port_currents(const PixelAntennaModel& model, const AntennaCoder& coder,
                      Complex antenna_current = Complex(1.0, 0.0));

/// Far-field samples E_oc * i(b) with unit antenna-port current, optionally
/// scaled to unit l2-norm. Throws ZeroPattern when normalizing a pattern that
/// does not radiate.
CVector radiation_pattern(const PixelAntennaModel& model, const AntennaCoder& coder,
                          bool normalize);

struct SynthesisSpec {
  int q_switches = 10;
  int k_angles = 72;
  double resistance_scale = 1.0;
  double reactance_scale = 1.0;
  std::optional<std::vector<double>> singular_spectrum;
  std::uint64_t seed = 0;
  double frequency_hz = 2.4e9;
};

// Random but physically consistent model: Re(Z) is a Gram matrix (passive),
// Z is symmetric (reciprocal), and E_oc optionally carries an exact spectrum.
PixelAntennaModel synthesize_model(const SynthesisSpec& spec);

std::string save_model(const PixelAntennaModel& model);
PixelAntennaModel load_model(std::string_view document);

PixelAntennaModel read_model_file(const std::string& path);
void write_model_file(const PixelAntennaModel& model, const std::string& path);

}  // namespace pixelcode
