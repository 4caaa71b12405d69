// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "pixelcode/experiment.hpp"

using namespace pixelcode;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Q = 10, K = 72 model whose pattern matrix has exactly five nonzero singular values.
SynthesisSpec five_dof_spec() {
  SynthesisSpec s;
  s.q_switches = 10;
  s.k_angles = 72;
  s.seed = 2024;
  s.singular_spectrum = std::vector<double>{1.0, 0.9, 0.8, 0.7, 0.6};
  return s;
}

const Aggregate* find(const ResultSet& rs, const std::string& method, std::size_t m_size) {
  for (const auto& a : rs.aggregates)
    if (a.method == method && a.m_size == m_size) return &a;
  return nullptr;
}

Outcome conventional_baseline() {
  ExperimentConfig c;
  c.kind = ExperimentKind::kSisoGain;
  c.method = Method::kCodebook;
  c.synthesis.q_switches = 10;
  c.synthesis.k_angles = 72;
  c.codebook = {AntennaCoder(10, 1)};
  c.trials = 10000;
  c.seed = 1;
  const ResultSet rs = run_experiment(c);
  const Aggregate& a = rs.aggregates.at(0);
  const bool ok = std::abs(a.mean - 1.0) <= 3.0 * a.std_error;
  return {ok, "mean " + fmt("%.4f", a.mean) + " se " + fmt("%.4f", a.std_error)};
}

Outcome upper_bound_law() {
  const auto model = synthesize_model(five_dof_spec());
  const PatternBasis basis = pattern_svd(model, 0.998);
  if (basis.eadof != 5) return {false, "model has R = " + std::to_string(basis.eadof)};
  const CoderResponse response(model);
  const CVector e_t = isotropic_pattern(72);
  const int trials = 10000;
  double sum = 0.0;
  double worst = -1e300;
  for (int t = 0; t < trials; ++t) {
    Rng rng = derive_stream(2, StreamTag::kTrial, static_cast<std::uint64_t>(t));
    const CVector f = sample_forward_field(e_t, rng);
    const double bound = gain_upper_bound(basis, f);
    sum += bound;
    const SisoGainEvaluator evaluator(response, f);
    const double best = exhaustive_maximize([&](const AntennaCoder& b) { return evaluator.gain(b); }, 10).second;
    worst = std::max(worst, best - bound);
  }
  const double mean = sum / trials;
  const double sigma = std::sqrt(5.0 / trials);
  const bool ok = std::abs(mean - 5.0) <= 3.0 * sigma && worst <= 1e-6;
  return {ok, "mean " + fmt("%.4f", mean) + " (3 sigma " + fmt("%.4f", 3 * sigma) +
                  "), max gain - bound " + fmt("%.2e", worst)};
}

Outcome sebo_vs_exhaustive() {
  const int instances = 50;
  double ratio = 0.0;
  bool exceeded = false;
  for (int n = 0; n < instances; ++n) {
    SynthesisSpec spec;
    spec.q_switches = 10;
    spec.k_angles = 72;
    spec.seed = 3000 + static_cast<std::uint64_t>(n);
    const auto model = synthesize_model(spec);
    const CoderResponse response(model);
    Rng rng = derive_stream(3, StreamTag::kTrial, static_cast<std::uint64_t>(n));
    const VirtualChannel ch = sample_virtual_channel(72, rng);
    const SisoGainEvaluator evaluator(response, ch, isotropic_pattern(72));
    const BinaryObjective f = [&](const AntennaCoder& b) { return evaluator.gain(b); };
    SeboConfig config;
    config.block_size = 5;
    config.seed = static_cast<std::uint64_t>(n);
    const double s = sebo_maximize(f, 10, config).value;
    const double e = exhaustive_maximize(f, 10).second;
    exceeded = exceeded || s > e;
    ratio += s / e;
  }
  ratio /= instances;
  return {ratio >= 0.99 && !exceeded,
          "mean ratio " + fmt("%.5f", ratio) + (exceeded ? ", exceeded optimum" : "")};
}

Outcome open_short_exactness() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const int q = 1 + static_cast<int>(rng() % 10);
    const auto model = fixtures::synthetic(q, 8, 4000 + static_cast<std::uint64_t>(n));
    const auto coder = AntennaCoder::from_index(q, rng() & ((std::uint64_t{1} << q) - 1));
    const CVector i = port_currents(model, coder);
    const oracle::Vec ref = oracle::penalty_currents(model, coder);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      num += std::norm(i(static_cast<Eigen::Index>(k)) - ref[k]);
      den += std::norm(ref[k]);
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {worst <= 1e-6, "max relative error " + fmt("%.2e", worst)};
}

Outcome waterfilling_correctness() {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double oracle_err = 0.0;
  double kkt = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const std::size_t size = 1 + rng() % 8;
    std::vector<double> lambda(size);
    for (auto& l : lambda) l = ex(rng) * std::pow(10.0, u(rng));
    const double p = std::pow(10.0, u(rng));
    const double s2 = std::pow(10.0, 0.5 * u(rng));
    const auto a = waterfill(lambda, p, s2);
    const auto ref = oracle::bisection_waterfill(lambda, p, s2);
    double total = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      oracle_err = std::max(oracle_err, std::abs(a.powers[i] - ref[i]));
      total += a.powers[i];
      const double floor = s2 / lambda[i];
      kkt = std::max(kkt, std::max(0.0, -a.powers[i]));
      if (a.powers[i] > 0.0) {
        kkt = std::max(kkt, std::abs(a.powers[i] + floor - a.water_level));
      } else {
        kkt = std::max(kkt, std::max(0.0, a.water_level - floor));
      }
    }
    kkt = std::max(kkt, std::abs(total - p));
  }
  std::normal_distribution<double> g(0.0, 1.0);
  double worst_gap = 1e300;
  for (int n = 0; n < 1000; ++n) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    const int cols = 1 + static_cast<int>(rng() % 4);
    CMatrix h(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) h(i, j) = Complex(g(rng), g(rng));
    const double p = std::pow(10.0, u(rng));
    const double gap = capacity_waterfilling(h, p, 1.0).capacity - capacity_uniform(h, p, 1.0);
    worst_gap = std::min(worst_gap, gap);
  }
  const bool ok = oracle_err <= 1e-9 && kkt <= 1e-9 && worst_gap >= -1e-9;
  return {ok, "oracle " + fmt("%.2e", oracle_err) + ", KKT " + fmt("%.2e", kkt) + ", min WF-UP " +
                  fmt("%.2e", worst_gap)};
}

Outcome gla_monotonicity_and_limit() {
  bool monotone = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto model = fixtures::synthetic(10, 72, 6000 + seed);
    Rng rng = derive_stream(seed, StreamTag::kTraining);
    const TrainingSet ts = sample_training_fields(72, 300, rng);
    GlaConfig gla;
    gla.seed = seed;
    SeboConfig sebo;
    sebo.block_size = 5;
    sebo.seed = seed;
    const auto book = train_codebook(model, ts, 8, gla, sebo);
    const auto& h = book.training.objective_history;
    for (std::size_t i = 1; i < h.size(); ++i) monotone = monotone && h[i] >= h[i - 1] * (1 - 1e-12);
  }

  const auto model = fixtures::synthetic(8, 72, 6100);
  const CoderResponse response(model);
  std::vector<CoderState> states;
  for (std::uint64_t i = 0; i < 256; ++i) states.push_back(response.evaluate(AntennaCoder::from_index(8, i)));
  int mismatches = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng = derive_stream(6, StreamTag::kTrial, t);
    const SisoGainEvaluator evaluator(response, sample_virtual_channel(72, rng), isotropic_pattern(72));
    const double selected = select_coder(states, evaluator).gain;
    const double best = exhaustive_maximize([&](const AntennaCoder& b) { return evaluator.gain(b); }, 8).second;
    mismatches += selected == best ? 0 : 1;
  }
  return {monotone && mismatches == 0, std::string(monotone ? "monotone" : "NOT monotone") +
                                           ", full-codebook mismatches " + std::to_string(mismatches)};
}

Outcome codebook_size_trend() {
  ExperimentConfig c;
  c.kind = ExperimentKind::kSisoGainCodebook;
  c.synthesis = five_dof_spec();
  c.m_sizes = {2, 4, 8, 16, 256};
  c.training_size = 1000;
  c.reference = "exhaustive";
  c.trials = 2000;
  c.seed = 7;
  c.sebo.block_size = 5;
  const ResultSet rs = run_experiment(c);
  std::string detail;
  bool increasing = true;
  double previous = 0.0;
  for (std::size_t m : {2u, 4u, 8u, 16u}) {
    const Aggregate* a = find(rs, "codebook", m);
    if (!a) return {false, "missing M = " + std::to_string(m)};
    detail += "M=" + std::to_string(m) + " " + fmt("%.3f", a->mean) + ", ";
    increasing = increasing && a->mean > previous;
    previous = a->mean;
  }
  const Aggregate* big = find(rs, "codebook", 256);
  const Aggregate* perfect = find(rs, "exhaustive", 0);
  if (!big || !perfect) return {false, "missing M = 256 or reference"};
  const double ratio = big->mean / perfect->mean;
  const double m2 = find(rs, "codebook", 2)->mean;
  detail += "M=256 " + fmt("%.3f", big->mean) + " vs perfect CSI " + fmt("%.3f", perfect->mean) +
            " (" + fmt("%.1f%%", 100.0 * ratio) + "); M=2 above 1.5: " + (m2 > 1.5 ? "yes" : "no (report only)");
  return {increasing && ratio >= 0.95, detail};
}

Outcome correlation_identity() {
  ExperimentConfig c;
  c.kind = ExperimentKind::kCorrelation;
  c.synthesis.q_switches = 10;
  c.synthesis.k_angles = 72;
  c.synthesis.seed = 8;
  c.m_sizes = {8};
  c.training_size = 1000;
  c.trials = 10000;
  c.seed = 8;
  c.sebo.block_size = 5;
  const ResultSet rs = run_experiment(c);
  const double dev = rs.analysis.at("rho_max_abs_deviation").get<double>();
  return {dev <= 0.05, "max |E[h_i h_j*] - rho_ij| " + fmt("%.4f", dev)};
}

Outcome determinism() {
  std::vector<ExperimentConfig> configs;
  ExperimentConfig base;
  base.synthesis.q_switches = 6;
  base.synthesis.k_angles = 12;
  base.trials = 8;
  base.seed = 9;
  base.sebo.block_size = 3;
  base.sebo.flip_rounds = 2;
  base.m_sizes = {2, 4};
  base.training_size = 40;

  ExperimentConfig c = base;
  c.record_bound = true;
  configs.push_back(c);
  c = base;
  c.kind = ExperimentKind::kSisoGainCodebook;
  configs.push_back(c);
  c = base;
  c.kind = ExperimentKind::kMimoCapacity;
  c.snr_db = {0, 20};
  configs.push_back(c);
  c = base;
  c.kind = ExperimentKind::kEadof;
  configs.push_back(c);
  c = base;
  c.kind = ExperimentKind::kCorrelation;
  configs.push_back(c);

  int differing = 0;
  for (const auto& cfg : configs) {
    const ResultSet ref = run_experiment(cfg, 1);
    const std::string csv = results_to_csv(ref);
    const std::string json = results_to_json(ref).dump();
    for (unsigned threads : {1u, 2u, 4u, 7u}) {
      const ResultSet rs = run_experiment(cfg, threads);
      if (results_to_csv(rs) != csv || results_to_json(rs).dump() != json) ++differing;
    }
  }
  return {differing == 0, std::to_string(configs.size()) + " kinds x 4 thread counts, " +
                              std::to_string(differing) + " differing"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "conventional SISO baseline", 10, conventional_baseline},
      {2, "maximum-ratio upper bound", 60, upper_bound_law},
      {3, "SEBO vs exhaustive", 120, sebo_vs_exhaustive},
      {4, "open/short exactness", 10, open_short_exactness},
      {5, "waterfilling correctness", 30, waterfilling_correctness},
      {6, "GLA monotonicity and full-codebook limit", 300, gla_monotonicity_and_limit},
      {7, "codebook size trend", 600, codebook_size_trend},
      {8, "pattern correlation identity", 120, correlation_identity},
      {9, "determinism across thread counts", 60, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s [%d] %s: %s; %.1f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str(), secs, c.budget_s, in_time ? "" : " over time");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
