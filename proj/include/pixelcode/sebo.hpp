// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pixelcode/antenna_model.hpp"

namespace pixelcode {

// Objective over binary vectors. May return -infinity for infeasible points;
// NaN is treated as -infinity.
using BinaryObjective = std::function<double(const AntennaCoder&)>;

struct SeboConfig {
  int block_size = 10;
  int max_cycles = 50;
  int flip_rounds = 20;
  int flips_per_round = 1;
  std::uint64_t seed = 0;

  static constexpr int kMaxBlockSize = 20;

  // Throws InvalidConfig.
  void validate(int q) const;
};

struct TraceRecord {
  int cycle = 0;
  double value = 0.0;
};

struct OptimizationTrace {
  std::vector<TraceRecord> improvements;
  AntennaCoder coder;
  double value = 0.0;
  std::uint64_t evaluations = 0;
  int cycles = 0;
};

/// Successive exhaustive Boolean optimization.
///
/// Step 1 sweeps contiguous blocks of `block_size` bits and replaces each by its
/// best assignment (incumbent kept on ties) until a full cycle brings no
/// improvement or `max_cycles` is hit. Step 2 perturbs the best point by
/// random bit flips `flip_rounds` times, re-runs step 1 and keeps any strict
/// improvement. The default starting point is all zeros.
OptimizationTrace sebo_maximize(const BinaryObjective& objective, int q, const SeboConfig& config,
                                const std::optional<AntennaCoder>& init = std::nullopt);

inline constexpr int kExhaustiveLimit = 22;

// Global maximum over all 2^q vectors, ties to the lexicographically smallest.
std::pair<AntennaCoder, double> exhaustive_maximize(const BinaryObjective& objective, int q);

}  // namespace pixelcode
