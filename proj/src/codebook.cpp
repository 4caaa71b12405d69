// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pixelcode/rng.hpp"

namespace pixelcode {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Training realizations reduced to p_l = E_oc^H H_V^[l] e_t, one column each.
// The gain of coder b on realization l is |unit_currents(b)^H p_l|^2.
class GainTable {
 public:
  GainTable(const CoderResponse& response, const TrainingSet& set) : response_(response) {
    const auto& model = response.model();
    if (set.e_t.size() != model.e_oc.rows()) {
      throw DimensionMismatch("transmit pattern length does not match the model");
    }
    projections_.resize(model.e_oc.cols(), static_cast<Eigen::Index>(set.size()));
    for (std::size_t l = 0; l < set.size(); ++l) {
      if (set.realizations.empty()) {
        if (set.fields[l].size() != model.e_oc.rows()) {
          throw DimensionMismatch("training field " + std::to_string(l) + " does not match the model");
        }
        projections_.col(static_cast<Eigen::Index>(l)) = response.project(set.fields[l]);
        continue;
      }
      const CMatrix& h = set.realizations[l].h_v;
      if (h.rows() != model.e_oc.rows() || h.cols() != set.e_t.size()) {
        throw DimensionMismatch("training realization " + std::to_string(l) +
                                " does not match the model");
      }
      projections_.col(static_cast<Eigen::Index>(l)) = response.project(h * set.e_t);
    }
  }

  const CoderResponse& response() const { return response_; }
  std::size_t size() const { return static_cast<std::size_t>(projections_.cols()); }

  RVector gains(const CoderState& state) const {
    if (!state.feasible()) return RVector::Constant(projections_.cols(), kNegInf);
    return (projections_.adjoint() * state.unit_currents).cwiseAbs2();
  }

  // L x M gain matrix.
  RMatrix gains(const std::vector<CoderState>& states) const {
    RMatrix out(projections_.cols(), static_cast<Eigen::Index>(states.size()));
    for (std::size_t m = 0; m < states.size(); ++m) {
      out.col(static_cast<Eigen::Index>(m)) = gains(states[m]);
    }
    return out;
  }

  // sum_{l in part} p_l p_l^H, so the partition objective is a quadratic form.
  CMatrix partition_moment(const std::vector<std::size_t>& part) const {
    const auto n = projections_.rows();
    CMatrix selected(n, static_cast<Eigen::Index>(part.size()));
    for (std::size_t i = 0; i < part.size(); ++i) {
      selected.col(static_cast<Eigen::Index>(i)) =
          projections_.col(static_cast<Eigen::Index>(part[i]));
    }
    return selected * selected.adjoint();
  }

 private:
  const CoderResponse& response_;
  CMatrix projections_;
};

std::vector<CoderState> states_of(const CoderResponse& response,
                                  const std::vector<AntennaCoder>& coders) {
  std::vector<CoderState> states;
  states.reserve(coders.size());
  for (const auto& c : coders) states.push_back(response.evaluate(c));
  return states;
}

std::vector<std::vector<std::size_t>> nearest_neighbor(const GainTable& table,
                                                       const std::vector<CoderState>& states) {
  std::vector<std::vector<std::size_t>> parts(states.size());
  const RMatrix g = table.gains(states);
  for (Eigen::Index l = 0; l < g.rows(); ++l) {
    Eigen::Index best = 0;
    for (Eigen::Index m = 1; m < g.cols(); ++m) {
      if (g(l, m) > g(l, best)) best = m;
    }
    parts[static_cast<std::size_t>(best)].push_back(static_cast<std::size_t>(l));
  }
  return parts;
}

double mean_selected(const GainTable& table, const std::vector<CoderState>& states) {
  const RMatrix g = table.gains(states);
  double total = 0.0;
  for (Eigen::Index l = 0; l < g.rows(); ++l) total += g.row(l).maxCoeff();
  return total / static_cast<double>(g.rows());
}

BinaryObjective partition_objective(const CoderResponse& response, CMatrix moment,
                                    const std::set<AntennaCoder>* forbidden = nullptr) {
  return [&response, moment = std::move(moment), forbidden](const AntennaCoder& coder) {
    if (forbidden && forbidden->count(coder)) return kNegInf;
    const CoderState s = response.evaluate(coder);
    if (!s.feasible()) return kNegInf;
    return s.unit_currents.dot(moment * s.unit_currents).real();
  };
}

AntennaCoder random_coder(int q, Rng& rng) {
  AntennaCoder coder(q);
  std::bernoulli_distribution bit(0.5);
  for (int i = 0; i < q; ++i) coder.set(i, bit(rng) ? 1 : 0);
  return coder;
}

// Uniformly random feasible coder not in `taken`, or nullopt if none exists.
std::optional<AntennaCoder> draw_distinct(const CoderResponse& response,
                                          const std::set<AntennaCoder>& taken, Rng& rng) {
  const int q = response.q();
  for (int attempt = 0; attempt < 4096; ++attempt) {
    AntennaCoder c = random_coder(q, rng);
    if (!taken.count(c) && response.feasible(c)) return c;
  }
  if (q > kExhaustiveLimit) return std::nullopt;
  std::vector<AntennaCoder> pool;
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << q); ++idx) {
    AntennaCoder c = AntennaCoder::from_index(q, idx);
    if (!taken.count(c) && response.feasible(c)) pool.push_back(std::move(c));
  }
  if (pool.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

std::vector<AntennaCoder> initial_codebook(const CoderResponse& response, std::size_t m_size,
                                           const std::vector<AntennaCoder>& seeds, Rng& rng) {
  const int q = response.q();
  std::vector<AntennaCoder> coders;
  std::set<AntennaCoder> taken;
  for (const auto& c : seeds) {
    if (c.size() != q) throw DimensionMismatch("initial coder length does not match the model");
    if (!taken.insert(c).second) throw InvalidConfig("initial coders must be distinct");
    if (!response.feasible(c)) throw InvalidConfig("initial coder " + c.to_string() + " does not radiate");
    coders.push_back(c);
  }
  if (coders.size() > m_size) throw InvalidConfig("more initial coders than codebook entries");

  if (q <= 62 && static_cast<double>(m_size) > std::ldexp(1.0, q)) {
    throw InvalidConfig("codebook size exceeds the 2^" + std::to_string(q) + " available coders");
  }
  const bool small_space = q <= kExhaustiveLimit && std::ldexp(1.0, q) <= 4.0 * static_cast<double>(m_size);
  if (small_space) {
    std::vector<AntennaCoder> pool;
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << q); ++idx) {
      AntennaCoder c = AntennaCoder::from_index(q, idx);
      if (!taken.count(c) && response.feasible(c)) pool.push_back(std::move(c));
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    for (auto& c : pool) {
      if (coders.size() == m_size) break;
      coders.push_back(std::move(c));
    }
  } else {
    while (coders.size() < m_size) {
      auto c = draw_distinct(response, taken, rng);
      if (!c) break;
      taken.insert(*c);
      coders.push_back(std::move(*c));
    }
  }
  if (coders.empty()) throw InfeasibleAll("no antenna coder of this model radiates");
  if (coders.size() < m_size) {
    throw InvalidConfig("only " + std::to_string(coders.size()) +
                        " feasible coders exist, codebook needs " + std::to_string(m_size));
  }
  return coders;
}

// Best single-bit neighbor of `center` under `objective` that is not taken.
std::optional<AntennaCoder> runner_up(const AntennaCoder& center, const BinaryObjective& objective,
                                      const std::set<AntennaCoder>& taken) {
  std::optional<AntennaCoder> best;
  double best_value = kNegInf;
  for (int q = 0; q < center.size(); ++q) {
    AntennaCoder c = center;
    c.flip(q);
    if (taken.count(c)) continue;
    const double v = objective(c);
    if (v > best_value) {
      best_value = v;
      best = std::move(c);
    }
  }
  return best;
}

double relative_change(const std::vector<AntennaCoder>& now, const std::vector<AntennaCoder>& before) {
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t m = 0; m < now.size(); ++m) {
    diff += std::sqrt(static_cast<double>(now[m].hamming_distance(before[m])));
    norm += std::sqrt(static_cast<double>(now[m].count_ones()));
  }
  if (diff == 0.0) return 0.0;
  return norm > 0.0 ? diff / norm : std::numeric_limits<double>::infinity();
}

}  // namespace

TrainingSet sample_training_set(int k_angles, std::size_t l, Rng& rng) {
  TrainingSet set;
  set.e_t = isotropic_pattern(k_angles);
  set.realizations.reserve(l);
  for (std::size_t i = 0; i < l; ++i) set.realizations.push_back(sample_virtual_channel(k_angles, rng));
  return set;
}

Selection select_coder(const std::vector<CoderState>& states, const SisoGainEvaluator& evaluator) {
  if (states.empty()) throw DimensionMismatch("empty codebook");
  Selection sel;
  sel.gain = kNegInf;
  for (std::size_t m = 0; m < states.size(); ++m) {
    const double g = evaluator.gain(states[m]);
    if (m == 0 || g > sel.gain) {
      sel.index = m;
      sel.gain = g;
    }
  }
  return sel;
}

Selection select_coder(const Codebook& codebook, const PixelAntennaModel& model,
                       const VirtualChannel& channel, const CVector& e_t) {
  if (codebook.coders.empty()) throw DimensionMismatch("empty codebook");
  if (codebook.q() != model.q_switches) {
    throw DimensionMismatch("codebook coders have " + std::to_string(codebook.q()) +
                            " bits, model has " + std::to_string(model.q_switches));
  }
  Selection sel;
  for (std::size_t m = 0; m < codebook.coders.size(); ++m) {
    const CVector e_r = radiation_pattern(model, codebook.coders[m], true);
    const double g = std::norm(siso_channel(e_r, channel, e_t));
    if (m == 0 || g > sel.gain) {
      sel.index = m;
      sel.gain = g;
    }
  }
  sel.coder = codebook.coders[sel.index];
  return sel;
}

TrainingSet sample_training_fields(int k_angles, std::size_t l, Rng& rng) {
  TrainingSet set;
  set.e_t = isotropic_pattern(k_angles);
  set.fields.reserve(l);
  for (std::size_t i = 0; i < l; ++i) set.fields.push_back(sample_forward_field(set.e_t, rng));
  return set;
}

std::vector<std::vector<std::size_t>> partition_training_set(
    const std::vector<AntennaCoder>& coders, const PixelAntennaModel& model,
    const TrainingSet& training_set) {
  if (coders.empty()) throw DimensionMismatch("empty codebook");
  const CoderResponse response(model);
  const GainTable table(response, training_set);
  return nearest_neighbor(table, states_of(response, coders));
}

AntennaCoder centroid_update(const std::vector<std::size_t>& partition,
                             const PixelAntennaModel& model, const TrainingSet& training_set,
                             const SeboConfig& sebo_config,
                             const std::optional<AntennaCoder>& init) {
  if (partition.empty()) throw EmptyPartition("centroid of an empty partition");
  const CoderResponse response(model);
  const GainTable table(response, training_set);
  for (std::size_t l : partition) {
    if (l >= table.size()) throw DimensionMismatch("partition index out of range");
  }
  const auto objective = partition_objective(response, table.partition_moment(partition));
  return sebo_maximize(objective, model.q_switches, sebo_config, init).coder;
}

double average_selected_gain(const std::vector<AntennaCoder>& coders,
                             const PixelAntennaModel& model, const TrainingSet& training_set) {
  const CoderResponse response(model);
  const GainTable table(response, training_set);
  return mean_selected(table, states_of(response, coders));
}

Codebook train_codebook(const PixelAntennaModel& model, const TrainingSet& training_set,
                        std::size_t m_size, const GlaConfig& gla, const SeboConfig& sebo,
                        const std::vector<AntennaCoder>& initial) {
  if (m_size < 1) throw InvalidConfig("codebook size must be >= 1");
  if (training_set.size() < m_size) {
    throw InvalidConfig("training set (L = " + std::to_string(training_set.size()) +
                        ") smaller than the codebook (M = " + std::to_string(m_size) + ")");
  }
  if (!(gla.epsilon >= 0.0) || gla.i_max < 1) throw InvalidConfig("GLA needs epsilon >= 0, i_max >= 1");
  sebo.validate(model.q_switches);

  const CoderResponse response(model);
  const GainTable table(response, training_set);
  Rng rng = derive_stream(gla.seed, StreamTag::kInit);

  std::vector<AntennaCoder> coders = initial_codebook(response, m_size, initial, rng);

  Codebook book;
  book.training.seed = gla.seed;
  book.training.l = training_set.size();
  book.training.objective_history.push_back(mean_selected(table, states_of(response, coders)));

  SeboConfig centroid_sebo = sebo;
  for (int iteration = 1; iteration <= gla.i_max; ++iteration) {
    const std::vector<AntennaCoder> previous = coders;
    const auto parts = nearest_neighbor(table, states_of(response, previous));

    // Centroid condition, warm-started from the previous entries.
    std::vector<BinaryObjective> objectives(m_size);
    for (std::size_t m = 0; m < m_size; ++m) {
      if (parts[m].empty()) continue;
      objectives[m] = partition_objective(response, table.partition_moment(parts[m]));
      centroid_sebo.seed = mix_seed(gla.seed, static_cast<std::uint64_t>(iteration) * m_size + m);
      coders[m] = sebo_maximize(objectives[m], model.q_switches, centroid_sebo, previous[m]).coder;
    }

    // Empty cells take the runner-up coder of the largest cell.
    std::size_t largest = 0;
    for (std::size_t m = 1; m < m_size; ++m) {
      if (parts[m].size() > parts[largest].size()) largest = m;
    }
    for (std::size_t m = 0; m < m_size; ++m) {
      if (!parts[m].empty()) continue;
      std::set<AntennaCoder> taken(coders.begin(), coders.end());
      taken.erase(coders[m]);
      auto split = runner_up(coders[largest], objectives[largest], taken);
      if (split && !std::isinf(objectives[largest](*split))) {
        coders[m] = *split;
      } else if (auto fresh = draw_distinct(response, taken, rng)) {
        coders[m] = *fresh;
      }
    }

    // Duplicate centroids: flip one random bit and re-optimize away from the
    // entries already present.
    for (std::size_t m = 1; m < m_size; ++m) {
      const bool duplicate =
          std::find(coders.begin(), coders.begin() + static_cast<std::ptrdiff_t>(m), coders[m]) !=
          coders.begin() + static_cast<std::ptrdiff_t>(m);
      if (!duplicate) continue;
      std::set<AntennaCoder> taken(coders.begin(), coders.end());
      std::uniform_int_distribution<int> pick(0, model.q_switches - 1);
      AntennaCoder start = coders[m];
      start.flip(pick(rng));
      const CMatrix moment = parts[m].empty() ? table.partition_moment(parts[largest])
                                              : table.partition_moment(parts[m]);
      const auto objective = partition_objective(response, moment, &taken);
      centroid_sebo.seed = mix_seed(gla.seed, ~static_cast<std::uint64_t>(m));
      AntennaCoder moved = sebo_maximize(objective, model.q_switches, centroid_sebo, start).coder;
      if (taken.count(moved) || !response.feasible(moved)) {
        auto fresh = draw_distinct(response, taken, rng);
        if (!fresh) throw InvalidConfig("cannot keep codebook entries distinct");
        moved = *fresh;
      }
      coders[m] = moved;
    }

    book.training.iterations = iteration;
    book.training.objective_history.push_back(mean_selected(table, states_of(response, coders)));
    if (relative_change(coders, previous) <= gla.epsilon) break;
  }

  book.coders = std::move(coders);
  book.training.final_avg_gain = book.training.objective_history.back();
  return book;
}

// ---------------------------------------------------------------------------
// Codebook file

namespace {

using json = nlohmann::ordered_json;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelLoadError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string save_codebook(const Codebook& codebook) {
  json doc;
  doc["version"] = 1;
  doc["q_switches"] = codebook.q();
  doc["m_size"] = codebook.size();
  json coders = json::array();
  for (const auto& c : codebook.coders) {
    json bits = json::array();
    for (std::uint8_t b : c.bits()) bits.push_back(static_cast<int>(b));
    coders.push_back(std::move(bits));
  }
  doc["coders"] = std::move(coders);
  json training;
  training["seed"] = codebook.training.seed;
  training["L"] = codebook.training.l;
  training["iterations"] = codebook.training.iterations;
  training["final_avg_gain"] = codebook.training.final_avg_gain;
  training["objective_history"] = codebook.training.objective_history;
  doc["training"] = std::move(training);
  return doc.dump(2) + "\n";
}

Codebook load_codebook(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("codebook file: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1) throw ParseError("unsupported codebook version");
    const int q = doc.at("q_switches").get<int>();
    const auto m = doc.at("m_size").get<std::size_t>();
    Codebook book;
    std::set<AntennaCoder> seen;
    for (const auto& entry : doc.at("coders")) {
      AntennaCoder c(entry.get<std::vector<int>>());
      if (c.size() != q) {
        throw ParseError("codebook coder " + std::to_string(book.coders.size()) + " has " +
                         std::to_string(c.size()) + " bits, expected " + std::to_string(q));
      }
      if (!seen.insert(c).second) throw ParseError("codebook coders must be distinct");
      book.coders.push_back(std::move(c));
    }
    if (book.coders.size() != m || m == 0) {
      throw ParseError("codebook m_size " + std::to_string(m) + " does not match " +
                       std::to_string(book.coders.size()) + " coders");
    }
    if (doc.contains("training")) {
      const json& t = doc["training"];
      book.training.seed = t.value("seed", std::uint64_t{0});
      book.training.l = t.value("L", std::size_t{0});
      book.training.iterations = t.value("iterations", 0);
      book.training.final_avg_gain = t.value("final_avg_gain", 0.0);
      book.training.objective_history =
          t.value("objective_history", std::vector<double>{});
    }
    return book;
  } catch (const json::exception& e) {
    throw ParseError(std::string("codebook file: ") + e.what());
  } catch (const InvalidConfig& e) {
    throw ParseError(std::string("codebook file: ") + e.what());
  }
}

Codebook read_codebook_file(const std::string& path) { return load_codebook(read_text(path)); }

void write_codebook_file(const Codebook& codebook, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << save_codebook(codebook);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pixelcode
