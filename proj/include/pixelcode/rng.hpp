// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <cstdint>
#include <random>

namespace pixelcode {

using Rng = std::mt19937_64;

// Stream tags keep independent consumers of one base seed apart.
enum class StreamTag : std::uint64_t {
  kTrial = 1,
  kTraining = 2,
  kOptimizer = 3,
  kSynthesis = 4,
  kInit = 5,
};

// Deterministic sub-stream for (seed, tag, index). Trial t of an experiment
// always sees the same generator regardless of which worker runs it.
Rng derive_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0);

// Mixes a seed with an index into a fresh 64-bit seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace pixelcode
