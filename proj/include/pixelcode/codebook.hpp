// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pixelcode/antenna_model.hpp"
#include "pixelcode/beamspace.hpp"
#include "pixelcode/sebo.hpp"

namespace pixelcode {

struct TrainingSet {
  std::vector<VirtualChannel> realizations;
  CVector e_t;
  // Forward fields H_V e_t, used when `realizations` is empty.
  std::vector<CVector> fields;

  std::size_t size() const { return realizations.empty() ? fields.size() : realizations.size(); }
};

// L realizations drawn from one stream, plus the isotropic transmit pattern.
TrainingSet sample_training_set(int k_angles, std::size_t l, Rng& rng);

// Same statistics with only the forward fields stored (2K values per entry).
TrainingSet sample_training_fields(int k_angles, std::size_t l, Rng& rng);

struct TrainingInfo {
  std::uint64_t seed = 0;
  std::size_t l = 0;
  int iterations = 0;
  double final_avg_gain = 0.0;
  // Average selected gain of the codebook after initialization and after
  // every iteration; non-decreasing.
  std::vector<double> objective_history;
};

struct Codebook {
  std::vector<AntennaCoder> coders;
  TrainingInfo training;

  std::size_t size() const { return coders.size(); }
  int q() const { return coders.empty() ? 0 : coders.front().size(); }
};

struct Selection {
  std::size_t index = 0;
  AntennaCoder coder;
  double gain = 0.0;
};

// argmax_m |e(b_m)^H H_V e_t|^2 with ties to the smallest index.
Selection select_coder(const Codebook& codebook, const PixelAntennaModel& model,
                       const VirtualChannel& channel, const CVector& e_t);
Selection select_coder(const std::vector<CoderState>& states, const SisoGainEvaluator& evaluator);

// Nearest-neighbor rule: realization l joins the coder with the largest gain.
std::vector<std::vector<std::size_t>> partition_training_set(
    const std::vector<AntennaCoder>& coders, const PixelAntennaModel& model,
    const TrainingSet& training_set);

// Centroid condition: coder maximizing the summed gain over one partition,
// found by SEBO warm-started from `init` when given.
AntennaCoder centroid_update(const std::vector<std::size_t>& partition,
                             const PixelAntennaModel& model, const TrainingSet& training_set,
                             const SeboConfig& sebo_config,
                             const std::optional<AntennaCoder>& init = std::nullopt);

struct GlaConfig {
  double epsilon = 1e-3;
  int i_max = 30;
  std::uint64_t seed = 0;
};

/// Generalized Lloyd training of an M-entry codebook.
///
/// `initial` seeds the first entries (nested codebooks); the remainder are
/// distinct random feasible coders drawn from `gla.seed`.
Codebook train_codebook(const PixelAntennaModel& model, const TrainingSet& training_set,
                        std::size_t m_size, const GlaConfig& gla, const SeboConfig& sebo,
                        const std::vector<AntennaCoder>& initial = {});

// Mean over the training set of the best codebook gain per realization.
double average_selected_gain(const std::vector<AntennaCoder>& coders,
                             const PixelAntennaModel& model, const TrainingSet& training_set);

std::string save_codebook(const Codebook& codebook);
Codebook load_codebook(std::string_view document);
Codebook read_codebook_file(const std::string& path);
void write_codebook_file(const Codebook& codebook, const std::string& path);

}  // namespace pixelcode
