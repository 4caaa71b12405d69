// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/mimo_capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pixelcode {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_power(double total_power, double noise_power) {
  if (!(std::isfinite(total_power) && total_power > 0.0)) {
    throw InvalidConfig("total power must be positive and finite");
  }
  if (!(std::isfinite(noise_power) && noise_power > 0.0)) {
    throw InvalidConfig("noise power must be positive and finite");
  }
}

double log2_1p(double x) { return std::log1p(x) / std::log(2.0); }

}  // namespace

std::string to_string(PowerMode mode) {
  return mode == PowerMode::kUniform ? "uniform" : "waterfilling";
}

PowerMode parse_power_mode(const std::string& text) {
  if (text == "uniform" || text == "up") return PowerMode::kUniform;
  if (text == "waterfilling" || text == "wf") return PowerMode::kWaterfilling;
  throw ConfigError("unknown power allocation mode '" + text + "'");
}

std::vector<double> gram_eigenvalues(const CMatrix& h) {
  if (!h.allFinite()) throw NonFinite("channel matrix has non-finite entries");
  if (h.size() == 0) return {};
  const CMatrix gram = h.rows() <= h.cols() ? CMatrix(h * h.adjoint()) : CMatrix(h.adjoint() * h);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const RVector& ascending = eig.eigenvalues();
  std::vector<double> out(static_cast<std::size_t>(ascending.size()));
  for (Eigen::Index i = 0; i < ascending.size(); ++i) {
    out[static_cast<std::size_t>(i)] = std::max(0.0, ascending(ascending.size() - 1 - i));
  }
  return out;
}

double capacity_uniform(const CMatrix& h, double total_power, double noise_power) {
  check_power(total_power, noise_power);
  const std::vector<double> lambda = gram_eigenvalues(h);
  const double snr = total_power / (noise_power * static_cast<double>(h.cols()));
  double c = 0.0;
  for (double l : lambda) c += log2_1p(snr * l);
  return c;
}

PowerAllocation waterfill(const std::vector<double>& eigenvalues, double total_power,
                          double noise_power) {
  check_power(total_power, noise_power);
  double largest = 0.0;
  for (double l : eigenvalues) {
    if (!std::isfinite(l)) throw NonFinite("eigenvalue is not finite");
    if (l < 0.0) throw InvalidConfig("eigenvalues must be non-negative");
    largest = std::max(largest, l);
  }
  if (!(largest > 0.0)) throw AllZeroEigenvalues("waterfilling needs a positive eigenvalue");

  PowerAllocation alloc;
  alloc.eigenvalues = eigenvalues;
  alloc.powers.assign(eigenvalues.size(), 0.0);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] > kEigenRankTolerance * largest) {
      active.push_back(i);
    } else {
      alloc.eigenvalues[i] = 0.0;
    }
  }
  std::stable_sort(active.begin(), active.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

  // Largest k such that the water level clears the floor of the k-th
  // strongest channel.
  std::vector<double> floor(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) floor[i] = noise_power / eigenvalues[active[i]];
  std::size_t k = active.size();
  double mu = 0.0;
  for (; k >= 1; --k) {
    const double sum = std::accumulate(floor.begin(), floor.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
    mu = (total_power + sum) / static_cast<double>(k);
    if (mu > floor[k - 1]) break;
  }
  alloc.water_level = mu;
  for (std::size_t i = 0; i < k; ++i) alloc.powers[active[i]] = mu - floor[i];
  return alloc;
}

WaterfillingCapacity capacity_waterfilling(const CMatrix& h, double total_power,
                                           double noise_power) {
  check_power(total_power, noise_power);
  WaterfillingCapacity out;
  out.allocation = waterfill(gram_eigenvalues(h), total_power, noise_power);
  const auto& a = out.allocation;
  for (std::size_t i = 0; i < a.powers.size(); ++i) {
    out.capacity += log2_1p(a.powers[i] * a.eigenvalues[i] / noise_power);
  }
  return out;
}

double capacity(const CMatrix& h, double total_power, double noise_power, PowerMode mode) {
  if (mode == PowerMode::kUniform) return capacity_uniform(h, total_power, noise_power);
  try {
    return capacity_waterfilling(h, total_power, noise_power).capacity;
  } catch (const AllZeroEigenvalues&) {
    return 0.0;
  }
}

// ---------------------------------------------------------------------------
// Joint coding design

namespace {

void check_models(const CoderResponse& transmit, const CoderResponse& receive, int n_t, int n_r,
                  const VirtualChannel& channel) {
  if (n_t < 1 || n_r < 1) throw InvalidConfig("n_t and n_r must be >= 1");
  if (transmit.model().e_oc.rows() != channel.h_v.cols() ||
      receive.model().e_oc.rows() != channel.h_v.rows()) {
    throw DimensionMismatch("model angle count does not match the virtual channel");
  }
}

CodingDesign optimize_sebo(const MimoChannelEvaluator& evaluator, int n_t, int n_r,
                           double total_power, double noise_power, PowerMode mode,
                           const SeboConfig& config) {
  const int q_t = evaluator.transmit().q();
  const int q_r = evaluator.receive().q();
  const int total = q_t * n_t + q_r * n_r;

  auto split = [&](const AntennaCoder& x, std::vector<AntennaCoder>& ct,
                   std::vector<AntennaCoder>& cr) {
    ct.assign(static_cast<std::size_t>(n_t), AntennaCoder(q_t));
    cr.assign(static_cast<std::size_t>(n_r), AntennaCoder(q_r));
    int pos = 0;
    for (auto& c : ct)
      for (int i = 0; i < q_t; ++i) c.set(i, x[pos++]);
    for (auto& c : cr)
      for (int i = 0; i < q_r; ++i) c.set(i, x[pos++]);
  };

  const BinaryObjective objective = [&](const AntennaCoder& x) {
    std::vector<AntennaCoder> ct;
    std::vector<AntennaCoder> cr;
    split(x, ct, cr);
    const auto h = evaluator.channel(ct, cr);
    if (!h) return kNegInf;
    return capacity(*h, total_power, noise_power, mode);
  };

  const OptimizationTrace trace = sebo_maximize(objective, total, config);
  if (std::isinf(trace.value)) throw InfeasibleAll("no feasible coder assignment found");

  CodingDesign design;
  split(trace.coder, design.coders_t, design.coders_r);
  design.capacity = trace.value;
  design.mode = mode;
  design.cycles = trace.cycles;
  design.evaluations = trace.evaluations;
  return design;
}

CodingDesign optimize_codebook(const MimoChannelEvaluator& evaluator, int n_t, int n_r,
                               double total_power, double noise_power, PowerMode mode,
                               const CodebookMethod& method) {
  if (method.transmit == nullptr) throw InvalidConfig("codebook method needs a transmit codebook");
  const Codebook& book_t = *method.transmit;
  const Codebook& book_r = method.receive ? *method.receive : *method.transmit;
  if (book_t.coders.empty() || book_r.coders.empty()) throw InvalidConfig("empty codebook");
  if (book_t.q() != evaluator.transmit().q() || book_r.q() != evaluator.receive().q()) {
    throw DimensionMismatch("codebook coder length does not match the model");
  }

  std::vector<CoderState> states_t;
  std::vector<CoderState> states_r;
  for (const auto& c : book_t.coders) states_t.push_back(evaluator.transmit().evaluate(c));
  for (const auto& c : book_r.coders) states_r.push_back(evaluator.receive().evaluate(c));

  // Antenna n starts on entry n mod M so that co-located antennas do not
  // begin with identical patterns (a rank-one channel).
  const auto antennas = static_cast<std::size_t>(n_t + n_r);
  std::vector<std::size_t> choice(antennas, 0);
  for (int n = 0; n < n_t; ++n) choice[static_cast<std::size_t>(n)] = static_cast<std::size_t>(n) % states_t.size();
  for (int n = 0; n < n_r; ++n) {
    choice[static_cast<std::size_t>(n_t + n)] = static_cast<std::size_t>(n) % states_r.size();
  }
  std::uint64_t evaluations = 0;

  auto evaluate = [&]() {
    ++evaluations;
    std::vector<CoderState> st;
    std::vector<CoderState> sr;
    for (int n = 0; n < n_t; ++n) {
      st.push_back(states_t[choice[static_cast<std::size_t>(n)]]);
      if (!st.back().feasible()) return kNegInf;
    }
    for (int n = 0; n < n_r; ++n) {
      sr.push_back(states_r[choice[static_cast<std::size_t>(n_t + n)]]);
      if (!sr.back().feasible()) return kNegInf;
    }
    return capacity(evaluator.channel(st, sr), total_power, noise_power, mode);
  };

  double value = evaluate();
  int cycles = 0;
  for (bool changed = true; changed;) {
    changed = false;
    ++cycles;
    for (std::size_t a = 0; a < antennas; ++a) {
      const std::size_t size = a < static_cast<std::size_t>(n_t) ? states_t.size() : states_r.size();
      const std::size_t incumbent = choice[a];
      std::size_t best = incumbent;
      double best_value = value;
      for (std::size_t m = 0; m < size; ++m) {
        if (m == incumbent) continue;
        choice[a] = m;
        const double v = evaluate();
        if (v > best_value) {
          best_value = v;
          best = m;
        }
      }
      choice[a] = best;
      if (best != incumbent) {
        value = best_value;
        changed = true;
      }
    }
  }
  if (std::isinf(value)) throw InfeasibleAll("no feasible codebook assignment found");

  CodingDesign design;
  for (int n = 0; n < n_t; ++n) design.coders_t.push_back(book_t.coders[choice[static_cast<std::size_t>(n)]]);
  for (int n = 0; n < n_r; ++n) design.coders_r.push_back(book_r.coders[choice[static_cast<std::size_t>(n_t + n)]]);
  design.capacity = value;
  design.mode = mode;
  design.cycles = cycles;
  design.evaluations = evaluations;
  return design;
}

}  // namespace

CodingDesign optimize_coding(const CoderResponse& transmit, const CoderResponse& receive,
                             int n_t, int n_r, const VirtualChannel& channel,
                             double total_power, double noise_power, PowerMode mode,
                             const CodingMethod& method) {
  check_power(total_power, noise_power);
  check_models(transmit, receive, n_t, n_r, channel);
  const MimoChannelEvaluator evaluator(transmit, receive, channel);
  if (const auto* sebo = std::get_if<SeboMethod>(&method)) {
    return optimize_sebo(evaluator, n_t, n_r, total_power, noise_power, mode, sebo->config);
  }
  return optimize_codebook(evaluator, n_t, n_r, total_power, noise_power, mode,
                           std::get<CodebookMethod>(method));
}

CodingDesign optimize_coding(const PixelAntennaModel& model_t, const PixelAntennaModel& model_r,
                             int n_t, int n_r, const VirtualChannel& channel,
                             double total_power, double noise_power, PowerMode mode,
                             const CodingMethod& method) {
  const CoderResponse transmit(model_t);
  const CoderResponse receive(model_r);
  return optimize_coding(transmit, receive, n_t, n_r, channel, total_power, noise_power, mode,
                         method);
}

}  // namespace pixelcode
