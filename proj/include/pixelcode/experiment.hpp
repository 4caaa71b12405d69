// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pixelcode/analysis.hpp"
#include "pixelcode/codebook.hpp"
#include "pixelcode/mimo_capacity.hpp"

namespace pixelcode {

enum class ExperimentKind { kSisoGain, kSisoGainCodebook, kMimoCapacity, kEadof, kCorrelation };
enum class Method { kSebo, kCodebook, kExhaustive };

std::string to_string(ExperimentKind kind);
std::string to_string(Method method);
ExperimentKind parse_experiment_kind(const std::string& text);
Method parse_method(const std::string& text);

inline constexpr int kDefaultAngles = 72;

/// Declarative Monte Carlo experiment. Serialized as JSON; CLI flags override
/// individual fields.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSisoGain;

  // Model source: a file, or a synthetic model when no path is given.
  std::string model_path;
  std::string model_r_path;  // MIMO receive side; defaults to model_path
  SynthesisSpec synthesis;

  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::optional<int> k_angles;

  Method method = Method::kSebo;
  SeboConfig sebo;
  GlaConfig gla;
  std::vector<std::size_t> m_sizes = {2, 4, 8, 16};
  std::size_t training_size = 1000;
  // Fixed codebook: a file, or inline coders. Takes precedence over training.
  std::string codebook_path;
  std::string codebook_r_path;
  std::vector<AntennaCoder> codebook;
  // Perfect-CSI reference recorded next to codebook runs ("none" disables).
  std::string reference = "sebo";
  bool record_bound = false;

  std::vector<double> snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
  int n_t = 2;
  int n_r = 2;
  std::vector<PowerMode> modes = {PowerMode::kUniform, PowerMode::kWaterfilling};

  double threshold = kDefaultEadofThreshold;

  std::string output_path;
  std::string format = "csv";

  // Throws ConfigError.
  void validate() const;

  nlohmann::json to_json() const;
  // Missing fields keep their defaults. Throws ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& document);
};

struct TrialRecord {
  std::size_t trial = 0;
  std::optional<double> snr_db;
  double value = 0.0;
  std::string method;
  std::string mode;
  std::size_t m_size = 0;
  std::uint64_t seed = 0;
};

struct Aggregate {
  std::optional<double> snr_db;
  std::string method;
  std::string mode;
  std::size_t m_size = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct ResultSet {
  nlohmann::json config;
  nlohmann::json provenance;
  std::vector<TrialRecord> records;
  std::vector<Aggregate> aggregates;
  nlohmann::json analysis;  // eadof / correlation kinds and codebook metadata
};

// Groups records by (snr_db, method, mode, m_size) in first-appearance order.
std::vector<Aggregate> aggregate_records(const std::vector<TrialRecord>& records);

/// Runs the experiment on `threads` workers (0 = PIXELCODE_THREADS or the
/// hardware concurrency). Output never depends on the worker count.
ResultSet run_experiment(const ExperimentConfig& config, unsigned threads = 0);

unsigned default_thread_count();

std::string results_to_csv(const ResultSet& results);
nlohmann::json results_to_json(const ResultSet& results);
ResultSet results_from_json(const nlohmann::json& document);

// Writes CSV or JSON according to `format`. Throws IoError.
void emit_results(const ResultSet& results, const std::string& format, const std::string& path);

// Deterministic text of a double with 17 significant digits.
std::string format_double(double value);

}  // namespace pixelcode
