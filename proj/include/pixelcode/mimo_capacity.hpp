// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pixelcode/antenna_model.hpp"
#include "pixelcode/beamspace.hpp"
#include "pixelcode/codebook.hpp"
#include "pixelcode/sebo.hpp"

namespace pixelcode {

enum class PowerMode { kUniform, kWaterfilling };

std::string to_string(PowerMode mode);
PowerMode parse_power_mode(const std::string& text);

struct PowerAllocation {
  std::vector<double> powers;
  double water_level = 0.0;
  std::vector<double> eigenvalues;
};

// Eigenvalues below this fraction of the largest one count as zero.
inline constexpr double kEigenRankTolerance = 1e-12;

// Eigenvalues of H H^H (or H^H H, whichever is smaller), descending, clamped >= 0.
std::vector<double> gram_eigenvalues(const CMatrix& h);

// log2 det(I + P/(sigma2 N_T) H H^H).
double capacity_uniform(const CMatrix& h, double total_power, double noise_power);

/// Exact waterfilling by the sorted active-set method. Powers are returned in
/// the order of the input eigenvalues.
PowerAllocation waterfill(const std::vector<double>& eigenvalues, double total_power,
                          double noise_power);

struct WaterfillingCapacity {
  double capacity = 0.0;
  PowerAllocation allocation;
};

WaterfillingCapacity capacity_waterfilling(const CMatrix& h, double total_power,
                                           double noise_power);

// Capacity of a fixed channel under the given mode; 0 for an all-zero channel.
double capacity(const CMatrix& h, double total_power, double noise_power, PowerMode mode);

struct SeboMethod {
  SeboConfig config;
};

struct CodebookMethod {
  const Codebook* transmit = nullptr;
  const Codebook* receive = nullptr;
};

using CodingMethod = std::variant<SeboMethod, CodebookMethod>;

struct CodingDesign {
  std::vector<AntennaCoder> coders_t;
  std::vector<AntennaCoder> coders_r;
  double capacity = 0.0;
  PowerMode mode = PowerMode::kUniform;
  int cycles = 0;
  std::uint64_t evaluations = 0;
};

/// Joint transmit/receive antenna coding for capacity maximization.
///
/// SEBO flattens [vec(B_T); vec(B_R)] column-major into one binary vector.
/// The codebook method runs cyclic coordinate ascent over antennas (transmit
/// first), antenna n starting on entry n mod M, until a full cycle changes nothing.
CodingDesign optimize_coding(const CoderResponse& transmit, const CoderResponse& receive,
                             int n_t, int n_r, const VirtualChannel& channel,
                             double total_power, double noise_power, PowerMode mode,
                             const CodingMethod& method);

CodingDesign optimize_coding(const PixelAntennaModel& model_t, const PixelAntennaModel& model_r,
                             int n_t, int n_r, const VirtualChannel& channel,
                             double total_power, double noise_power, PowerMode mode,
                             const CodingMethod& method);

}  // namespace pixelcode
