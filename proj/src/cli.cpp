// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pixelcode/experiment.hpp"

namespace pixelcode {

namespace {

using nlohmann::json;

// Flags shared by every experiment subcommand. A flag overrides the config
// file only when it appears on the command line.
struct ExperimentFlags {
  CLI::App* app = nullptr;
  std::string config_path;
  std::string model;
  std::string model_r;
  int q = 10;
  int k = kDefaultAngles;
  std::uint64_t model_seed = 0;
  std::vector<double> spectrum;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string method;
  int block_size = 0;
  int max_cycles = 0;
  int flip_rounds = 0;
  std::vector<std::size_t> m_sizes;
  std::size_t training_size = 0;
  double epsilon = 0.0;
  int i_max = 0;
  std::string codebook;
  std::string codebook_r;
  std::vector<std::string> coders;
  std::string reference;
  bool record_bound = false;
  std::vector<double> snr_db;
  int n_t = 0;
  int n_r = 0;
  std::vector<std::string> modes;
  double threshold = kDefaultEadofThreshold;
  std::string output;
  std::string format;
  unsigned threads = 0;

  bool given(const std::string& name) const {
    const CLI::Option* opt = app->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  }
};

void add_model_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--model", f.model, "Model JSON file (synthetic model when omitted)");
  app->add_option("--q", f.q, "Switches of the synthetic model");
  app->add_option("--k", f.k, "Sampled angles per polarization");
  app->add_option("--model-seed", f.model_seed, "Seed of the synthetic model");
  app->add_option("--spectrum", f.spectrum, "Prescribed singular values of the pattern matrix")
      ->delimiter(',');
}

void add_run_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--config", f.config_path, "Experiment config JSON");
  app->add_option("--trials", f.trials, "Monte Carlo trials");
  app->add_option("--seed", f.seed, "Experiment seed");
  app->add_option("--threads", f.threads, "Worker threads (default PIXELCODE_THREADS or all cores)");
  app->add_option("-o,--output", f.output, "Result file (stdout when omitted)");
  app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_sebo_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--block-size", f.block_size, "SEBO block size J");
  app->add_option("--max-cycles", f.max_cycles, "SEBO cycle limit");
  app->add_option("--flip-rounds", f.flip_rounds, "SEBO random-flip restarts");
}

void add_codebook_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--codebook", f.codebook, "Codebook JSON file");
  app->add_option("--coder", f.coders, "Inline codebook entry such as 0101010101");
  app->add_option("--m", f.m_sizes, "Codebook size(s) to train")->delimiter(',');
  app->add_option("--training-size", f.training_size, "Training realizations L");
  app->add_option("--epsilon", f.epsilon, "GLA stopping tolerance");
  app->add_option("--i-max", f.i_max, "GLA iteration limit");
}

ExperimentConfig build_config(const ExperimentFlags& f, ExperimentKind kind) {
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw ConfigError("cannot open config " + f.config_path);
    json document;
    try {
      document = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config " + f.config_path + ": " + e.what());
    }
    c = ExperimentConfig::from_json(document);
  } else {
    c.kind = kind;
  }
  if (f.given("--model")) c.model_path = f.model;
  if (f.given("--model-r")) c.model_r_path = f.model_r;
  if (f.given("--q")) c.synthesis.q_switches = f.q;
  if (f.given("--k")) c.k_angles = f.k;
  if (f.given("--model-seed")) c.synthesis.seed = f.model_seed;
  if (f.given("--spectrum")) c.synthesis.singular_spectrum = f.spectrum;
  if (f.given("--trials")) c.trials = f.trials;
  if (f.given("--seed")) c.seed = f.seed;
  if (f.given("--method")) c.method = parse_method(f.method);
  if (f.given("--block-size")) c.sebo.block_size = f.block_size;
  if (f.given("--max-cycles")) c.sebo.max_cycles = f.max_cycles;
  if (f.given("--flip-rounds")) c.sebo.flip_rounds = f.flip_rounds;
  if (f.given("--m")) c.m_sizes = f.m_sizes;
  if (f.given("--training-size")) c.training_size = f.training_size;
  if (f.given("--epsilon")) c.gla.epsilon = f.epsilon;
  if (f.given("--i-max")) c.gla.i_max = f.i_max;
  if (f.given("--codebook")) c.codebook_path = f.codebook;
  if (f.given("--codebook-r")) c.codebook_r_path = f.codebook_r;
  if (f.given("--coder")) {
    c.codebook.clear();
    for (const auto& text : f.coders) {
      std::vector<int> bits;
      for (char ch : text) {
        if (ch != '0' && ch != '1') throw ConfigError("coder '" + text + "' must contain only 0 and 1");
        bits.push_back(ch - '0');
      }
      c.codebook.emplace_back(bits);
    }
  }
  if ((f.given("--codebook") || f.given("--coder")) && !f.given("--method")) {
    c.method = Method::kCodebook;
  }
  if (f.given("--reference")) c.reference = f.reference;
  if (f.given("--bound")) c.record_bound = f.record_bound;
  if (f.given("--snr")) c.snr_db = f.snr_db;
  if (f.given("--nt")) c.n_t = f.n_t;
  if (f.given("--nr")) c.n_r = f.n_r;
  if (f.given("--modes")) {
    c.modes.clear();
    for (const auto& m : f.modes) c.modes.push_back(parse_power_mode(m));
  }
  if (f.given("--threshold")) c.threshold = f.threshold;
  if (f.given("--output")) c.output_path = f.output;
  if (f.given("--format")) c.format = f.format;
  return c;
}

void print_aggregates(const ResultSet& rs, std::ostream& out) {
  for (const auto& a : rs.aggregates) {
    out << a.method;
    if (!a.mode.empty()) out << " mode=" << a.mode;
    if (a.m_size > 0) out << " M=" << a.m_size;
    if (a.snr_db) out << " snr_db=" << format_double(*a.snr_db);
    out << " n=" << a.count << " mean=" << format_double(a.mean)
        << " se=" << format_double(a.std_error) << '\n';
  }
}

int run_and_emit(const ExperimentConfig& config, unsigned threads, std::ostream& out) {
  const ResultSet rs = run_experiment(config, threads);
  if (config.output_path.empty()) {
    if (config.format == "json") {
      out << results_to_json(rs).dump(2) << '\n';
    } else {
      out << results_to_csv(rs);
    }
  } else {
    emit_results(rs, config.format, config.output_path);
    print_aggregates(rs, out);
  }
  return 0;
}

PixelAntennaModel model_from_flags(const ExperimentFlags& f) {
  if (!f.model.empty()) return read_model_file(f.model);
  SynthesisSpec spec;
  spec.q_switches = f.q;
  spec.k_angles = f.k;
  spec.seed = f.model_seed;
  if (!f.spectrum.empty()) spec.singular_spectrum = f.spectrum;
  return synthesize_model(spec);
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Antenna coding for pixel antennas: models, optimizers, codebooks and experiments",
               "pixelcode"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // gen-model
  SynthesisSpec gen;
  std::vector<double> gen_spectrum;
  std::string gen_output;
  CLI::App* gen_cmd = app.add_subcommand("gen-model", "Synthesize a passive, reciprocal model");
  gen_cmd->add_option("--q", gen.q_switches, "Switches Q");
  gen_cmd->add_option("--k", gen.k_angles, "Sampled angles per polarization");
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--resistance-scale", gen.resistance_scale, "Scale of Re(Z)");
  gen_cmd->add_option("--reactance-scale", gen.reactance_scale, "Scale of Im(Z)");
  gen_cmd->add_option("--frequency", gen.frequency_hz, "Frequency in Hz");
  gen_cmd->add_option("--spectrum", gen_spectrum, "Prescribed singular values of E_oc")->delimiter(',');
  gen_cmd->add_option("-o,--output", gen_output, "Output file (stdout when omitted)");

  // validate
  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a model file");
  validate_cmd->add_option("model,--model", validate_path, "Model JSON file")->required();

  // siso-gain
  ExperimentFlags siso;
  siso.app = app.add_subcommand("siso-gain", "SISO channel gain experiment");
  add_model_flags(siso.app, siso);
  add_run_flags(siso.app, siso);
  add_sebo_flags(siso.app, siso);
  add_codebook_flags(siso.app, siso);
  siso.app->add_option("--method", siso.method, "sebo, exhaustive or codebook")
      ->check(CLI::IsMember({"sebo", "exhaustive", "codebook"}));
  siso.app->add_option("--reference", siso.reference, "Perfect-CSI reference: sebo, exhaustive or none");
  siso.app->add_flag("--bound", siso.record_bound, "Also record the maximum-ratio bound");
  siso.app->add_option("--threshold", siso.threshold, "EADoF threshold for the bound");

  // train-codebook
  ExperimentFlags train;
  train.app = app.add_subcommand("train-codebook", "Train a codebook with the generalized Lloyd algorithm");
  add_model_flags(train.app, train);
  add_sebo_flags(train.app, train);
  train.app->add_option("--m", train.m_sizes, "Codebook size")->required()->expected(1);
  train.app->add_option("--training-size", train.training_size, "Training realizations L");
  train.app->add_option("--epsilon", train.epsilon, "GLA stopping tolerance");
  train.app->add_option("--i-max", train.i_max, "GLA iteration limit");
  train.app->add_option("--seed", train.seed, "Training seed");
  train.app->add_option("-o,--output", train.output, "Codebook file (stdout when omitted)");

  // mimo-capacity
  ExperimentFlags mimo;
  mimo.app = app.add_subcommand("mimo-capacity", "MIMO capacity experiment");
  add_model_flags(mimo.app, mimo);
  add_run_flags(mimo.app, mimo);
  add_sebo_flags(mimo.app, mimo);
  add_codebook_flags(mimo.app, mimo);
  mimo.app->add_option("--model-r", mimo.model_r, "Receive model JSON file");
  mimo.app->add_option("--codebook-r", mimo.codebook_r, "Receive codebook JSON file");
  mimo.app->add_option("--method", mimo.method, "sebo or codebook")
      ->check(CLI::IsMember({"sebo", "codebook"}));
  mimo.app->add_option("--snr", mimo.snr_db, "SNR grid in dB")->delimiter(',');
  mimo.app->add_option("--nt", mimo.n_t, "Transmit antennas");
  mimo.app->add_option("--nr", mimo.n_r, "Receive antennas");
  mimo.app->add_option("--modes", mimo.modes, "uniform and/or waterfilling")->delimiter(',');

  // eadof
  ExperimentFlags eadof;
  eadof.app = app.add_subcommand("eadof", "Effective aerial degrees of freedom of a model");
  add_model_flags(eadof.app, eadof);
  eadof.app->add_option("--threshold", eadof.threshold, "Cumulative energy threshold T");
  eadof.app->add_option("--codebook", eadof.codebook, "Codebook whose combiners are reported");
  eadof.app->add_option("--coder", eadof.coders, "Inline coder whose combiner is reported");
  eadof.app->add_option("-o,--output", eadof.output, "Report JSON file");

  // correlation
  ExperimentFlags corr;
  corr.app = app.add_subcommand("correlation", "Pattern correlation of a codebook");
  add_model_flags(corr.app, corr);
  add_run_flags(corr.app, corr);
  add_sebo_flags(corr.app, corr);
  add_codebook_flags(corr.app, corr);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help("pixelcode"));
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help("pixelcode"));
    return 1;
  }

  try {
    if (gen_cmd->parsed()) {
      if (!gen_spectrum.empty()) gen.singular_spectrum = gen_spectrum;
      const PixelAntennaModel model = synthesize_model(gen);
      if (gen_output.empty()) {
        out << save_model(model);
      } else {
        write_model_file(model, gen_output);
      }
      return 0;
    }

    if (validate_cmd->parsed()) {
      std::ifstream in(validate_path);
      if (!in) throw ModelLoadError("cannot open " + validate_path);
      std::ostringstream text;
      text << in.rdbuf();
      const PixelAntennaModel model = load_model(text.str());
      out << "ok: Q=" << model.q_switches << " K=" << model.k_angles << '\n';
      return 0;
    }

    if (siso.app->parsed()) {
      ExperimentConfig c = build_config(siso, ExperimentKind::kSisoGain);
      const bool fixed = !c.codebook_path.empty() || !c.codebook.empty();
      if (c.kind == ExperimentKind::kSisoGain && c.method == Method::kCodebook && !fixed) {
        c.kind = ExperimentKind::kSisoGainCodebook;
      }
      return run_and_emit(c, siso.threads, out);
    }

    if (train.app->parsed()) {
      const PixelAntennaModel model = model_from_flags(train);
      const std::size_t l = train.given("--training-size") ? train.training_size : 1000;
      GlaConfig gla;
      gla.seed = train.seed;
      if (train.given("--epsilon")) gla.epsilon = train.epsilon;
      if (train.given("--i-max")) gla.i_max = train.i_max;
      SeboConfig sebo;
      sebo.seed = mix_seed(train.seed, 1);
      if (train.given("--block-size")) sebo.block_size = train.block_size;
      if (train.given("--max-cycles")) sebo.max_cycles = train.max_cycles;
      if (train.given("--flip-rounds")) sebo.flip_rounds = train.flip_rounds;
      Rng rng = derive_stream(train.seed, StreamTag::kTraining);
      const TrainingSet ts = sample_training_set(model.k_angles, l, rng);
      const Codebook book = train_codebook(model, ts, train.m_sizes.front(), gla, sebo);
      if (train.output.empty()) {
        out << save_codebook(book);
      } else {
        write_codebook_file(book, train.output);
        out << "M=" << book.size() << " iterations=" << book.training.iterations
            << " avg_gain=" << format_double(book.training.final_avg_gain) << '\n';
      }
      return 0;
    }

    if (mimo.app->parsed()) {
      const ExperimentConfig c = build_config(mimo, ExperimentKind::kMimoCapacity);
      return run_and_emit(c, mimo.threads, out);
    }

    if (eadof.app->parsed()) {
      ExperimentConfig c = build_config(eadof, ExperimentKind::kEadof);
      c.trials = 1;
      c.format = "json";
      const ResultSet rs = run_experiment(c, 1);
      out << "eadof " << rs.analysis.at("eadof").get<int>() << '\n';
      if (!c.output_path.empty()) {
        std::ofstream file(c.output_path);
        if (!file) throw IoError("cannot open " + c.output_path + " for writing");
        file << rs.analysis.dump(2) << '\n';
      }
      return 0;
    }

    if (corr.app->parsed()) {
      const ExperimentConfig c = build_config(corr, ExperimentKind::kCorrelation);
      return run_and_emit(c, corr.threads, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace pixelcode
