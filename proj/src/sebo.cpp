// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/sebo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "pixelcode/rng.hpp"

namespace pixelcode {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Block {
  int start = 0;
  int length = 0;
};

std::vector<Block> contiguous_blocks(int q, int block_size) {
  std::vector<Block> blocks;
  for (int start = 0; start < q; start += block_size) {
    blocks.push_back({start, std::min(block_size, q - start)});
  }
  return blocks;
}

std::uint64_t read_block(const AntennaCoder& coder, const Block& block) {
  std::uint64_t value = 0;
  for (int i = 0; i < block.length; ++i) value = (value << 1) | coder[block.start + i];
  return value;
}

void write_block(AntennaCoder& coder, const Block& block, std::uint64_t value) {
  for (int i = 0; i < block.length; ++i) {
    coder.set(block.start + i, static_cast<std::uint8_t>((value >> (block.length - 1 - i)) & 1U));
  }
}

class Search {
 public:
  Search(const BinaryObjective& objective, const SeboConfig& config, int q)
      : objective_(objective), config_(config), blocks_(contiguous_blocks(q, config.block_size)) {}

  double evaluate(const AntennaCoder& coder) {
    ++evaluations_;
    const double v = objective_(coder);
    return std::isnan(v) ? kNegInf : v;
  }

  // Block-cyclic exhaustive ascent from (coder, value). Calls on_improve after
  // every accepted block change.
  template <typename OnImprove>
  void ascend(AntennaCoder& coder, double& value, OnImprove&& on_improve) {
    for (int cycle = 0; cycle < config_.max_cycles; ++cycle) {
      ++cycles_;
      bool improved = false;
      for (const Block& block : blocks_) {
        const std::uint64_t incumbent = read_block(coder, block);
        std::uint64_t best = incumbent;
        double best_value = value;
        AntennaCoder candidate = coder;
        const std::uint64_t count = std::uint64_t{1} << block.length;
        for (std::uint64_t a = 0; a < count; ++a) {
          if (a == incumbent) continue;
          write_block(candidate, block, a);
          const double v = evaluate(candidate);
          if (v > best_value) {
            best_value = v;
            best = a;
          }
        }
        if (best != incumbent) {
          write_block(coder, block, best);
          value = best_value;
          improved = true;
          on_improve(cycles_, value);
        }
      }
      // A single block is a full exhaustive search; nothing left to improve.
      if (!improved || blocks_.size() == 1) break;
    }
  }

  bool single_block() const { return blocks_.size() == 1; }
  std::uint64_t evaluations() const { return evaluations_; }
  int cycles() const { return cycles_; }

 private:
  const BinaryObjective& objective_;
  const SeboConfig& config_;
  std::vector<Block> blocks_;
  std::uint64_t evaluations_ = 0;
  int cycles_ = 0;
};

}  // namespace

void SeboConfig::validate(int q) const {
  if (q < 1) throw InvalidConfig("SEBO needs at least one variable");
  if (block_size < 1 || block_size > kMaxBlockSize) {
    throw InvalidConfig("block_size must be in [1, " + std::to_string(kMaxBlockSize) + "]");
  }
  if (max_cycles < 1) throw InvalidConfig("max_cycles must be >= 1");
  if (flip_rounds < 0) throw InvalidConfig("flip_rounds must be >= 0");
  if (flips_per_round < 1) throw InvalidConfig("flips_per_round must be >= 1");
}

OptimizationTrace sebo_maximize(const BinaryObjective& objective, int q, const SeboConfig& config,
                                const std::optional<AntennaCoder>& init) {
  config.validate(q);
  if (init && init->size() != q) {
    throw InvalidConfig("initial coder has " + std::to_string(init->size()) + " bits, expected " +
                        std::to_string(q));
  }

  Search search(objective, config, q);
  OptimizationTrace trace;
  AntennaCoder best = init ? *init : AntennaCoder(q);
  double best_value = search.evaluate(best);
  trace.improvements.push_back({0, best_value});

  search.ascend(best, best_value,
                [&](int cycle, double v) { trace.improvements.push_back({cycle, v}); });

  if (!search.single_block()) {
    Rng rng = derive_stream(config.seed, StreamTag::kOptimizer);
    std::vector<int> order(static_cast<std::size_t>(q));
    const int flips = std::min(config.flips_per_round, q);
    for (int round = 0; round < config.flip_rounds; ++round) {
      std::iota(order.begin(), order.end(), 0);
      AntennaCoder candidate = best;
      for (int f = 0; f < flips; ++f) {
        std::uniform_int_distribution<int> pick(f, q - 1);
        std::swap(order[static_cast<std::size_t>(f)],
                  order[static_cast<std::size_t>(pick(rng))]);
        candidate.flip(order[static_cast<std::size_t>(f)]);
      }
      double value = search.evaluate(candidate);
      search.ascend(candidate, value, [](int, double) {});
      if (value > best_value) {
        best = candidate;
        best_value = value;
        trace.improvements.push_back({search.cycles(), best_value});
      }
    }
  }

  trace.coder = std::move(best);
  trace.value = best_value;
  trace.evaluations = search.evaluations();
  trace.cycles = search.cycles();
  return trace;
}

std::pair<AntennaCoder, double> exhaustive_maximize(const BinaryObjective& objective, int q) {
  if (q < 1) throw InvalidConfig("exhaustive search needs at least one variable");
  if (q > kExhaustiveLimit) {
    throw TooLarge("exhaustive search over 2^" + std::to_string(q) + " coders refused (limit 2^" +
                   std::to_string(kExhaustiveLimit) + ")");
  }
  AntennaCoder best(q);
  double best_value = kNegInf;
  bool first = true;
  const std::uint64_t count = std::uint64_t{1} << q;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    AntennaCoder coder = AntennaCoder::from_index(q, idx);
    double v = objective(coder);
    if (std::isnan(v)) v = kNegInf;
    if (first || v > best_value) {
      best = std::move(coder);
      best_value = v;
      first = false;
    }
  }
  return {best, best_value};
}

}  // namespace pixelcode
