// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <Eigen/Core>

#include "pixelcode/rng.hpp"

namespace pixelcode {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Names

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSisoGain: return "siso-gain";
    case ExperimentKind::kSisoGainCodebook: return "siso-gain-codebook";
    case ExperimentKind::kMimoCapacity: return "mimo-capacity";
    case ExperimentKind::kEadof: return "eadof";
    case ExperimentKind::kCorrelation: return "correlation";
  }
  return "unknown";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kSebo: return "sebo";
    case Method::kCodebook: return "codebook";
    case Method::kExhaustive: return "exhaustive";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (auto k : {ExperimentKind::kSisoGain, ExperimentKind::kSisoGainCodebook,
                 ExperimentKind::kMimoCapacity, ExperimentKind::kEadof,
                 ExperimentKind::kCorrelation}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment kind '" + text + "'");
}

Method parse_method(const std::string& text) {
  for (auto m : {Method::kSebo, Method::kCodebook, Method::kExhaustive}) {
    if (text == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + text + "'");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (k_angles && *k_angles < 1) throw ConfigError("k_angles must be >= 1");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw ConfigError("SNR grid must be finite");
  }
  if (kind == ExperimentKind::kMimoCapacity) {
    if (snr_db.empty()) throw ConfigError("SNR grid is empty");
    if (modes.empty()) throw ConfigError("no power allocation mode given");
    if (n_t < 1 || n_r < 1) throw ConfigError("n_t and n_r must be >= 1");
    if (method == Method::kExhaustive) {
      throw ConfigError("exhaustive search is not available for mimo-capacity");
    }
  }
  if (m_sizes.empty()) throw ConfigError("m_sizes is empty");
  for (std::size_t m : m_sizes) {
    if (m < 1) throw ConfigError("codebook sizes must be >= 1");
  }
  if (training_size < 1) throw ConfigError("training_size must be >= 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in (0, 1]");
  if (reference != "none" && reference != "sebo" && reference != "exhaustive") {
    throw ConfigError("reference must be none, sebo or exhaustive");
  }
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  try {
    sebo.validate(1);
  } catch (const InvalidConfig& e) {
    throw ConfigError(e.what());
  }
  if (!(gla.epsilon >= 0.0) || gla.i_max < 1) throw ConfigError("GLA needs epsilon >= 0, i_max >= 1");
  for (const std::string* path : {&model_path, &model_r_path, &codebook_path, &codebook_r_path}) {
    if (!path->empty() && !std::filesystem::exists(*path)) {
      throw ConfigError("file not found: " + *path);
    }
  }
}

json ExperimentConfig::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  j["model"] = model_path;
  j["model_r"] = model_r_path;
  json syn;
  syn["q"] = synthesis.q_switches;
  syn["k"] = synthesis.k_angles;
  syn["resistance_scale"] = synthesis.resistance_scale;
  syn["reactance_scale"] = synthesis.reactance_scale;
  syn["singular_spectrum"] = synthesis.singular_spectrum ? json(*synthesis.singular_spectrum) : json(nullptr);
  syn["seed"] = synthesis.seed;
  syn["frequency_hz"] = synthesis.frequency_hz;
  j["synthesis"] = syn;
  j["trials"] = trials;
  j["seed"] = seed;
  j["k_angles"] = k_angles ? json(*k_angles) : json(nullptr);
  j["method"] = to_string(method);
  j["sebo"] = {{"block_size", sebo.block_size},
               {"max_cycles", sebo.max_cycles},
               {"flip_rounds", sebo.flip_rounds},
               {"flips_per_round", sebo.flips_per_round}};
  j["gla"] = {{"epsilon", gla.epsilon}, {"i_max", gla.i_max}};
  j["m_sizes"] = m_sizes;
  j["training_size"] = training_size;
  j["codebook"] = codebook_path;
  j["codebook_r"] = codebook_r_path;
  json coders = json::array();
  for (const auto& c : codebook) coders.push_back(c.to_string());
  j["codebook_coders"] = coders;
  j["reference"] = reference;
  j["record_bound"] = record_bound;
  j["snr_db"] = snr_db;
  j["n_t"] = n_t;
  j["n_r"] = n_r;
  json mode_names = json::array();
  for (auto m : modes) mode_names.push_back(to_string(m));
  j["modes"] = mode_names;
  j["threshold"] = threshold;
  j["output"] = output_path;
  j["format"] = format;
  return j;
}

namespace {

AntennaCoder coder_from_text(const std::string& text) {
  std::vector<int> bits;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw ConfigError("coder '" + text + "' must contain only 0 and 1");
    bits.push_back(ch - '0');
  }
  if (bits.empty()) throw ConfigError("empty coder");
  return AntennaCoder(bits);
}

template <typename T>
void take(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) out = it->get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& document) {
  if (!document.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    reject_unknown(document,
                   {"kind", "model", "model_r", "synthesis", "trials", "seed", "k_angles", "method",
                    "sebo", "gla", "m_sizes", "training_size", "codebook", "codebook_r",
                    "codebook_coders", "reference", "record_bound", "snr_db", "n_t", "n_r",
                    "modes", "threshold", "output", "format"},
                   "config");
    if (document.contains("kind")) c.kind = parse_experiment_kind(document["kind"].get<std::string>());
    take(document, "model", c.model_path);
    take(document, "model_r", c.model_r_path);
    if (auto it = document.find("synthesis"); it != document.end() && !it->is_null()) {
      reject_unknown(*it,
                     {"q", "k", "resistance_scale", "reactance_scale", "singular_spectrum", "seed",
                      "frequency_hz"},
                     "synthesis");
      take(*it, "q", c.synthesis.q_switches);
      take(*it, "k", c.synthesis.k_angles);
      take(*it, "resistance_scale", c.synthesis.resistance_scale);
      take(*it, "reactance_scale", c.synthesis.reactance_scale);
      if (auto s = it->find("singular_spectrum"); s != it->end() && !s->is_null()) {
        c.synthesis.singular_spectrum = s->get<std::vector<double>>();
      }
      take(*it, "seed", c.synthesis.seed);
      take(*it, "frequency_hz", c.synthesis.frequency_hz);
    }
    take(document, "trials", c.trials);
    take(document, "seed", c.seed);
    if (auto it = document.find("k_angles"); it != document.end() && !it->is_null()) {
      c.k_angles = it->get<int>();
    }
    if (document.contains("method")) c.method = parse_method(document["method"].get<std::string>());
    if (auto it = document.find("sebo"); it != document.end() && !it->is_null()) {
      reject_unknown(*it, {"block_size", "max_cycles", "flip_rounds", "flips_per_round"}, "sebo");
      take(*it, "block_size", c.sebo.block_size);
      take(*it, "max_cycles", c.sebo.max_cycles);
      take(*it, "flip_rounds", c.sebo.flip_rounds);
      take(*it, "flips_per_round", c.sebo.flips_per_round);
    }
    if (auto it = document.find("gla"); it != document.end() && !it->is_null()) {
      reject_unknown(*it, {"epsilon", "i_max"}, "gla");
      take(*it, "epsilon", c.gla.epsilon);
      take(*it, "i_max", c.gla.i_max);
    }
    take(document, "m_sizes", c.m_sizes);
    take(document, "training_size", c.training_size);
    take(document, "codebook", c.codebook_path);
    take(document, "codebook_r", c.codebook_r_path);
    if (auto it = document.find("codebook_coders"); it != document.end() && !it->is_null()) {
      for (const auto& s : *it) c.codebook.push_back(coder_from_text(s.get<std::string>()));
    }
    take(document, "reference", c.reference);
    take(document, "record_bound", c.record_bound);
    take(document, "snr_db", c.snr_db);
    take(document, "n_t", c.n_t);
    take(document, "n_r", c.n_r);
    if (auto it = document.find("modes"); it != document.end() && !it->is_null()) {
      c.modes.clear();
      for (const auto& s : *it) c.modes.push_back(parse_power_mode(s.get<std::string>()));
    }
    take(document, "threshold", c.threshold);
    take(document, "output", c.output_path);
    take(document, "format", c.format);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Aggregation

std::vector<Aggregate> aggregate_records(const std::vector<TrialRecord>& records) {
  using Key = std::tuple<bool, double, std::string, std::string, std::size_t>;
  std::map<Key, std::size_t> index;
  std::vector<Aggregate> out;
  std::vector<std::vector<double>> values;
  for (const auto& r : records) {
    const Key key{r.snr_db.has_value(), r.snr_db.value_or(0.0), r.method, r.mode, r.m_size};
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      Aggregate a;
      a.snr_db = r.snr_db;
      a.method = r.method;
      a.mode = r.mode;
      a.m_size = r.m_size;
      out.push_back(a);
      values.emplace_back();
    }
    values[it->second].push_back(r.value);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    const auto& v = values[g];
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[g].count = v.size();
    out[g].mean = mean;
    out[g].std_error = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Execution

unsigned default_thread_count() {
  if (const char* env = std::getenv("PIXELCODE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

constexpr double kNoisePower = 1.0;

struct Setup {
  std::shared_ptr<const PixelAntennaModel> model;
  std::shared_ptr<const PixelAntennaModel> model_r;
  std::unique_ptr<CoderResponse> response;
  std::unique_ptr<CoderResponse> response_r;
  json model_source;
};

std::shared_ptr<const PixelAntennaModel> load_or_synthesize(const std::string& path,
                                                            const ExperimentConfig& config) {
  if (!path.empty()) {
    auto model = std::make_shared<const PixelAntennaModel>(read_model_file(path));
    if (config.k_angles && *config.k_angles != model->k_angles) {
      throw ConfigError("k_angles " + std::to_string(*config.k_angles) + " does not match the model (" +
                        std::to_string(model->k_angles) + ")");
    }
    return model;
  }
  SynthesisSpec spec = config.synthesis;
  if (config.k_angles) spec.k_angles = *config.k_angles;
  try {
    return std::make_shared<const PixelAntennaModel>(synthesize_model(spec));
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
}

Setup prepare(const ExperimentConfig& config) {
  Setup s;
  s.model = load_or_synthesize(config.model_path, config);
  s.model_source = config.model_path.empty() ? json("synthetic") : json(config.model_path);
  if (config.kind == ExperimentKind::kMimoCapacity && !config.model_r_path.empty()) {
    s.model_r = load_or_synthesize(config.model_r_path, config);
    if (s.model_r->k_angles != s.model->k_angles) {
      throw ConfigError("transmit and receive models use different angle grids");
    }
  } else {
    s.model_r = s.model;
  }
  s.response = std::make_unique<CoderResponse>(s.model);
  s.response_r = s.model_r == s.model ? nullptr : std::make_unique<CoderResponse>(s.model_r);
  return s;
}

Codebook load_fixed_codebook(const std::string& path, const std::vector<AntennaCoder>& inline_coders,
                             int q) {
  Codebook book;
  if (!path.empty()) {
    book = read_codebook_file(path);
  } else {
    book.coders = inline_coders;
  }
  for (const auto& c : book.coders) {
    if (c.size() != q) {
      throw ConfigError("codebook coder " + c.to_string() + " does not match Q = " + std::to_string(q));
    }
  }
  return book;
}

bool has_fixed_codebook(const ExperimentConfig& config) {
  return !config.codebook_path.empty() || !config.codebook.empty();
}

// Trains one codebook per size in m_sizes, ascending, each seeded with the
// entries of the previous one.
std::vector<Codebook> train_codebooks(const ExperimentConfig& config, const PixelAntennaModel& model) {
  std::vector<std::size_t> sizes = config.m_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  Rng rng = derive_stream(config.seed, StreamTag::kTraining);
  const TrainingSet ts = sample_training_fields(model.k_angles, config.training_size, rng);
  std::vector<Codebook> books;
  std::vector<AntennaCoder> previous;
  for (std::size_t m : sizes) {
    GlaConfig gla = config.gla;
    gla.seed = mix_seed(config.seed, m);
    SeboConfig sebo = config.sebo;
    sebo.seed = mix_seed(config.seed, m + 0x5eb0);
    try {
      books.push_back(train_codebook(model, ts, m, gla, sebo, previous));
    } catch (const InvalidConfig& e) {
      throw ConfigError(e.what());
    }
    previous = books.back().coders;
  }
  return books;
}

json codebook_summary(const Codebook& book) {
  json coders = json::array();
  for (const auto& c : book.coders) coders.push_back(c.to_string());
  return {{"m_size", book.size()},
          {"coders", coders},
          {"training",
           {{"seed", book.training.seed},
            {"L", book.training.l},
            {"iterations", book.training.iterations},
            {"final_avg_gain", book.training.final_avg_gain},
            {"objective_history", book.training.objective_history}}}};
}

// Runs `work(t)` for every trial on a bounded pool and returns the per-trial
// outputs in trial order.
template <typename Out, typename Work>
std::vector<Out> parallel_trials(std::size_t trials, unsigned threads, Work work) {
  std::vector<Out> out(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        out[t] = work(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), trials));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double optimize_siso(Method method, const SisoGainEvaluator& evaluator, int q,
                     const SeboConfig& sebo) {
  const BinaryObjective objective = [&](const AntennaCoder& c) { return evaluator.gain(c); };
  double value = 0.0;
  if (method == Method::kExhaustive) {
    value = exhaustive_maximize(objective, q).second;
  } else {
    value = sebo_maximize(objective, q, sebo).value;
  }
  if (std::isinf(value)) throw InfeasibleAll("no feasible coder for this realization");
  return value;
}

TrialRecord make_record(std::size_t t, std::uint64_t seed, double value, std::string method,
                        std::size_t m_size = 0) {
  TrialRecord r;
  r.trial = t;
  r.seed = seed;
  r.value = value;
  r.method = std::move(method);
  r.m_size = m_size;
  return r;
}

void check_codebook_feasible(const std::vector<CoderState>& states) {
  if (std::none_of(states.begin(), states.end(), [](const CoderState& s) { return s.feasible(); })) {
    throw InfeasibleAll("every codebook entry is infeasible");
  }
}

}  // namespace

ResultSet run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  if (threads == 0) threads = default_thread_count();

  Setup setup = prepare(config);
  const PixelAntennaModel& model = *setup.model;
  const CoderResponse& response = *setup.response;
  const CoderResponse& response_r = setup.response_r ? *setup.response_r : response;
  const int q = model.q_switches;
  const int k = model.k_angles;
  if ((config.method == Method::kExhaustive || config.reference == "exhaustive") &&
      (config.kind == ExperimentKind::kSisoGain || config.kind == ExperimentKind::kSisoGainCodebook) &&
      q > kExhaustiveLimit) {
    throw ConfigError("exhaustive search needs Q <= " + std::to_string(kExhaustiveLimit));
  }

  ResultSet rs;
  rs.config = config.to_json();
  rs.provenance = {{"library", "pixelcode"},
                   {"version", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                 "." + std::to_string(EIGEN_MINOR_VERSION)},
                   {"seed", config.seed},
                   {"trials", config.trials},
                   {"trial_seed", "mix_seed(seed, trial)"},
                   {"model_source", setup.model_source},
                   {"q_switches", q},
                   {"k_angles", k},
                   {"noise_power", kNoisePower}};
  rs.analysis = json::object();

  auto trial_seed = [&](std::size_t t) { return mix_seed(config.seed, t); };
  const CVector e_t = isotropic_pattern(k);
  auto trial_channel = [&](std::size_t t) {
    Rng rng = derive_stream(config.seed, StreamTag::kTrial, t);
    return sample_virtual_channel(k, rng);
  };
  auto trial_field = [&](std::size_t t) {
    Rng rng = derive_stream(config.seed, StreamTag::kTrial, t);
    return sample_forward_field(e_t, rng);
  };
  std::optional<PatternBasis> basis;
  if (config.record_bound) basis = pattern_svd(model, config.threshold);

  using Rows = std::vector<TrialRecord>;
  std::vector<Rows> rows;

  switch (config.kind) {
    case ExperimentKind::kSisoGain: {
      std::vector<CoderState> states;
      Codebook book;
      if (config.method == Method::kCodebook) {
        if (!has_fixed_codebook(config)) throw ConfigError("method codebook needs a codebook");
        book = load_fixed_codebook(config.codebook_path, config.codebook, q);
        for (const auto& c : book.coders) states.push_back(response.evaluate(c));
        check_codebook_feasible(states);
      }
      rows = parallel_trials<Rows>(config.trials, threads, [&](std::size_t t) {
        const CVector field = trial_field(t);
        const SisoGainEvaluator evaluator(response, field);
        Rows r;
        if (config.method == Method::kCodebook) {
          r.push_back(make_record(t, trial_seed(t), select_coder(states, evaluator).gain, "codebook",
                                  book.size()));
        } else {
          SeboConfig sebo = config.sebo;
          sebo.seed = trial_seed(t);
          r.push_back(make_record(t, trial_seed(t), optimize_siso(config.method, evaluator, q, sebo),
                                  to_string(config.method)));
        }
        if (basis) r.push_back(make_record(t, trial_seed(t), gain_upper_bound(*basis, field), "bound"));
        return r;
      });
      break;
    }

    case ExperimentKind::kSisoGainCodebook: {
      std::vector<Codebook> books;
      if (has_fixed_codebook(config)) {
        books.push_back(load_fixed_codebook(config.codebook_path, config.codebook, q));
      } else {
        books = train_codebooks(config, model);
      }
      std::vector<std::vector<CoderState>> states(books.size());
      json summaries = json::array();
      for (std::size_t b = 0; b < books.size(); ++b) {
        for (const auto& c : books[b].coders) states[b].push_back(response.evaluate(c));
        check_codebook_feasible(states[b]);
        summaries.push_back(codebook_summary(books[b]));
      }
      rs.analysis["codebooks"] = summaries;
      rs.provenance["training_seed"] = config.seed;
      rows = parallel_trials<Rows>(config.trials, threads, [&](std::size_t t) {
        const CVector field = trial_field(t);
        const SisoGainEvaluator evaluator(response, field);
        Rows r;
        for (std::size_t b = 0; b < books.size(); ++b) {
          r.push_back(make_record(t, trial_seed(t), select_coder(states[b], evaluator).gain,
                                  "codebook", books[b].size()));
        }
        if (config.reference != "none") {
          SeboConfig sebo = config.sebo;
          sebo.seed = trial_seed(t);
          const Method m = config.reference == "exhaustive" ? Method::kExhaustive : Method::kSebo;
          r.push_back(make_record(t, trial_seed(t), optimize_siso(m, evaluator, q, sebo), config.reference));
        }
        if (basis) r.push_back(make_record(t, trial_seed(t), gain_upper_bound(*basis, field), "bound"));
        return r;
      });
      break;
    }

    case ExperimentKind::kMimoCapacity: {
      std::vector<Codebook> books_t;
      std::vector<Codebook> books_r;
      if (config.method == Method::kCodebook) {
        if (has_fixed_codebook(config)) {
          books_t.push_back(load_fixed_codebook(config.codebook_path, config.codebook, q));
          books_r.push_back(config.codebook_r_path.empty()
                                ? books_t.back()
                                : load_fixed_codebook(config.codebook_r_path, {}, setup.model_r->q_switches));
        } else {
          books_t = train_codebooks(config, model);
          books_r = setup.model_r == setup.model ? books_t : train_codebooks(config, *setup.model_r);
        }
        json summaries = json::array();
        for (const auto& b : books_t) summaries.push_back(codebook_summary(b));
        rs.analysis["codebooks"] = summaries;
      }
      rows = parallel_trials<Rows>(config.trials, threads, [&](std::size_t t) {
        const VirtualChannel ch = trial_channel(t);
        Rows r;
        for (double snr : config.snr_db) {
          const double power = std::pow(10.0, snr / 10.0);
          for (PowerMode mode : config.modes) {
            auto push = [&](const CodingDesign& d, std::size_t m_size) {
              TrialRecord rec = make_record(t, trial_seed(t), d.capacity, to_string(config.method), m_size);
              rec.snr_db = snr;
              rec.mode = to_string(mode);
              r.push_back(std::move(rec));
            };
            if (config.method == Method::kCodebook) {
              for (std::size_t b = 0; b < books_t.size(); ++b) {
                const CodebookMethod method{&books_t[b], &books_r[b]};
                push(optimize_coding(response, response_r, config.n_t, config.n_r, ch, power,
                                     kNoisePower, mode, method),
                     books_t[b].size());
              }
            } else {
              SeboConfig sebo = config.sebo;
              sebo.seed = trial_seed(t);
              push(optimize_coding(response, response_r, config.n_t, config.n_r, ch, power,
                                   kNoisePower, mode, SeboMethod{sebo}),
                   0);
            }
          }
        }
        return r;
      });
      break;
    }

    case ExperimentKind::kEadof: {
      const PatternBasis b = pattern_svd(model, config.threshold);
      std::vector<AntennaCoder> coders;
      if (has_fixed_codebook(config)) coders = load_fixed_codebook(config.codebook_path, config.codebook, q).coders;
      rs.analysis = analysis_report(b, model, coders);
      rows.push_back({make_record(0, config.seed, static_cast<double>(b.eadof), "eadof")});
      break;
    }

    case ExperimentKind::kCorrelation: {
      Codebook book;
      if (has_fixed_codebook(config)) {
        book = load_fixed_codebook(config.codebook_path, config.codebook, q);
      } else {
        ExperimentConfig single = config;
        single.m_sizes = {config.m_sizes.front()};
        book = train_codebooks(single, model).front();
      }
      const PatternBasis b = pattern_svd(model, config.threshold);
      rs.analysis = analysis_report(b, model, book.coders);
      rs.analysis["codebook"] = codebook_summary(book);
      std::vector<CoderState> states;
      for (const auto& c : book.coders) {
        states.push_back(response.evaluate(c));
        if (!states.back().feasible()) throw InfeasibleAll("codebook entry " + c.to_string() + " is infeasible");
      }
      const auto m = static_cast<Eigen::Index>(states.size());
      std::vector<CVector> samples(config.trials);
      rows = parallel_trials<Rows>(config.trials, threads, [&](std::size_t t) {
        const CVector field = trial_field(t);
        const SisoGainEvaluator evaluator(response, field);
        CVector h(m);
        Rows r;
        for (Eigen::Index i = 0; i < m; ++i) {
          h(i) = evaluator.channel(states[static_cast<std::size_t>(i)]);
          TrialRecord rec = make_record(t, trial_seed(t), std::norm(h(i)), "codebook", book.size());
          rec.mode = "b" + std::to_string(i);
          r.push_back(std::move(rec));
        }
        samples[t] = h;
        return r;
      });
      CMatrix empirical = CMatrix::Zero(m, m);
      for (const auto& h : samples) empirical += h * h.adjoint();
      empirical /= static_cast<double>(config.trials);
      const CMatrix rho = codebook_correlation(model, book.coders);
      // Sample estimate of E[h_i h_j^*], the (i, j) entry of E[h h^H].
      const CMatrix& estimate = empirical;
      json re = json::array();
      json im = json::array();
      double deviation = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        std::vector<double> row_re;
        std::vector<double> row_im;
        for (Eigen::Index j = 0; j < m; ++j) {
          row_re.push_back(estimate(i, j).real());
          row_im.push_back(estimate(i, j).imag());
          deviation = std::max({deviation, std::abs(estimate(i, j).real() - rho(i, j).real()),
                                std::abs(estimate(i, j).imag() - rho(i, j).imag())});
        }
        re.push_back(row_re);
        im.push_back(row_im);
      }
      rs.analysis["rho_mc_re"] = re;
      rs.analysis["rho_mc_im"] = im;
      rs.analysis["rho_max_abs_deviation"] = deviation;
      break;
    }
  }

  for (auto& r : rows) {
    for (auto& rec : r) rs.records.push_back(std::move(rec));
  }
  rs.aggregates = aggregate_records(rs.records);
  return rs;
}

// ---------------------------------------------------------------------------
// Emission

std::string results_to_csv(const ResultSet& results) {
  std::ostringstream os;
  os << "trial,snr_db,gain_or_capacity,method,mode,m_size,seed\n";
  for (const auto& r : results.records) {
    os << r.trial << ',' << (r.snr_db ? format_double(*r.snr_db) : "") << ','
       << format_double(r.value) << ',' << r.method << ',' << r.mode << ',' << r.m_size << ','
       << r.seed << '\n';
  }
  return os.str();
}

json results_to_json(const ResultSet& results) {
  json records = json::array();
  for (const auto& r : results.records) {
    records.push_back({{"trial", r.trial},
                       {"snr_db", r.snr_db ? json(*r.snr_db) : json(nullptr)},
                       {"value", r.value},
                       {"method", r.method},
                       {"mode", r.mode},
                       {"m_size", r.m_size},
                       {"seed", r.seed}});
  }
  json aggregates = json::array();
  for (const auto& a : results.aggregates) {
    aggregates.push_back({{"snr_db", a.snr_db ? json(*a.snr_db) : json(nullptr)},
                          {"method", a.method},
                          {"mode", a.mode},
                          {"m_size", a.m_size},
                          {"count", a.count},
                          {"mean", a.mean},
                          {"std_error", a.std_error}});
  }
  return {{"config", results.config},
          {"provenance", results.provenance},
          {"records", records},
          {"aggregates", aggregates},
          {"analysis", results.analysis}};
}

ResultSet results_from_json(const json& document) {
  ResultSet rs;
  try {
    rs.config = document.at("config");
    rs.provenance = document.at("provenance");
    rs.analysis = document.value("analysis", json::object());
    for (const auto& r : document.at("records")) {
      TrialRecord rec;
      rec.trial = r.at("trial").get<std::size_t>();
      if (!r.at("snr_db").is_null()) rec.snr_db = r.at("snr_db").get<double>();
      rec.value = r.at("value").get<double>();
      rec.method = r.at("method").get<std::string>();
      rec.mode = r.at("mode").get<std::string>();
      rec.m_size = r.at("m_size").get<std::size_t>();
      rec.seed = r.at("seed").get<std::uint64_t>();
      rs.records.push_back(std::move(rec));
    }
    for (const auto& a : document.at("aggregates")) {
      Aggregate agg;
      if (!a.at("snr_db").is_null()) agg.snr_db = a.at("snr_db").get<double>();
      agg.method = a.at("method").get<std::string>();
      agg.mode = a.at("mode").get<std::string>();
      agg.m_size = a.at("m_size").get<std::size_t>();
      agg.count = a.at("count").get<std::size_t>();
      agg.mean = a.at("mean").get<double>();
      agg.std_error = a.at("std_error").get<double>();
      rs.aggregates.push_back(std::move(agg));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed result set: ") + e.what());
  }
  return rs;
}

void emit_results(const ResultSet& results, const std::string& format, const std::string& path) {
  std::string text;
  if (format == "csv") {
    text = results_to_csv(results);
  } else if (format == "json") {
    text = results_to_json(results).dump(2) + "\n";
  } else {
    throw ConfigError("unknown output format '" + format + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace pixelcode
