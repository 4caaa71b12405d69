// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/beamspace.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace pixelcode {

VirtualChannel sample_virtual_channel(int k_angles, Rng& rng) {
  if (k_angles < 1) throw DimensionMismatch("k_angles must be >= 1");
  const Eigen::Index n = 2 * static_cast<Eigen::Index>(k_angles);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  VirtualChannel channel{CMatrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      channel.h_v(i, j) = Complex(re, im);
    }
  }
  return channel;
}

CVector sample_forward_field(const CVector& e_t, Rng& rng) {
  if (e_t.size() < 1) throw DimensionMismatch("empty transmit pattern");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5) * e_t.norm());
  CVector field(e_t.size());
  for (Eigen::Index i = 0; i < field.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    field(i) = Complex(re, im);
  }
  return field;
}

CVector isotropic_pattern(int k_angles) {
  if (k_angles < 1) throw DimensionMismatch("k_angles must be >= 1");
  CVector e = CVector::Zero(2 * k_angles);
  e.head(k_angles).setConstant(Complex(1.0 / std::sqrt(static_cast<double>(k_angles)), 0.0));
  return e;
}

Complex siso_channel(const CVector& e_r, const VirtualChannel& channel, const CVector& e_t) {
  const CMatrix& h = channel.h_v;
  if (h.rows() != e_r.size() || h.cols() != e_t.size()) {
    throw DimensionMismatch("pattern length does not match the virtual channel");
  }
  const CVector forward = h * e_t;
  return e_r.dot(forward);  // Eigen's dot conjugates the left operand
}

CMatrix mimo_channel(const PixelAntennaModel& model_t, const std::vector<AntennaCoder>& coders_t,
                     const PixelAntennaModel& model_r, const std::vector<AntennaCoder>& coders_r,
                     const VirtualChannel& channel) {
  const auto n_rows = channel.h_v.rows();
  if (model_t.e_oc.rows() != n_rows || model_r.e_oc.rows() != n_rows) {
    throw DimensionMismatch("model angle count does not match the virtual channel");
  }
  auto patterns = [](const PixelAntennaModel& model, const std::vector<AntennaCoder>& coders,
                     const char* side) {
    CMatrix e(model.e_oc.rows(), static_cast<Eigen::Index>(coders.size()));
    for (std::size_t n = 0; n < coders.size(); ++n) {
      try {
        e.col(static_cast<Eigen::Index>(n)) = radiation_pattern(model, coders[n], true);
      } catch (const ZeroPattern&) {
        throw ZeroPattern(std::string(side) + " coder " + std::to_string(n) + " (" +
                          coders[n].to_string() + ") does not radiate");
      }
    }
    return e;
  };
  const CMatrix e_t = patterns(model_t, coders_t, "transmit");
  const CMatrix e_r = patterns(model_r, coders_r, "receive");
  return e_r.adjoint() * (channel.h_v * e_t);
}

// ---------------------------------------------------------------------------
// CoderResponse

CoderResponse::CoderResponse(const PixelAntennaModel& model)
    : CoderResponse(std::make_shared<const PixelAntennaModel>(model)) {}

CoderResponse::CoderResponse(std::shared_ptr<const PixelAntennaModel> model)
    : model_(std::move(model)) {
  const int q = model_->q_switches;
  if (q <= kTableLimit) {
    const std::uint64_t count = std::uint64_t{1} << q;
    table_.reserve(count);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      table_.push_back(compute(AntennaCoder::from_index(q, idx)));
    }
  }
}

CoderState CoderResponse::compute(const AntennaCoder& coder) const {
  CoderState state;
  CVector currents;
  try {
    currents = port_currents(*model_, coder);
  } catch (const SingularNetwork&) {
    return state;
  }
  const double norm = (model_->e_oc * currents).norm();
  if (!(norm >= kZeroPatternNorm)) return state;
  state.pattern_norm = norm;
  state.unit_currents = currents / norm;
  return state;
}

CoderState CoderResponse::evaluate(const AntennaCoder& coder) const {
  if (coder.size() != model_->q_switches) {
    throw DimensionMismatch("coder has " + std::to_string(coder.size()) + " bits, model has " +
                            std::to_string(model_->q_switches) + " switches");
  }
  if (!table_.empty()) return table_[coder.to_index()];
  return compute(coder);
}

// ---------------------------------------------------------------------------
// Evaluators

SisoGainEvaluator::SisoGainEvaluator(const CoderResponse& response, const VirtualChannel& channel,
                                     const CVector& e_t)
    : response_(response) {
  const auto rows = response.model().e_oc.rows();
  if (channel.h_v.rows() != rows || channel.h_v.cols() != e_t.size()) {
    throw DimensionMismatch("channel dimensions do not match the model");
  }
  projection_ = response.project(channel.h_v * e_t);
}

SisoGainEvaluator::SisoGainEvaluator(const CoderResponse& response, const CVector& forward_field)
    : response_(response) {
  if (forward_field.size() != response.model().e_oc.rows()) {
    throw DimensionMismatch("forward field length does not match the model");
  }
  projection_ = response.project(forward_field);
}

Complex SisoGainEvaluator::channel(const CoderState& state) const {
  return state.unit_currents.dot(projection_);
}

double SisoGainEvaluator::gain(const CoderState& state) const {
  if (!state.feasible()) return -std::numeric_limits<double>::infinity();
  return std::norm(channel(state));
}

double SisoGainEvaluator::gain(const AntennaCoder& coder) const {
  return gain(response_.evaluate(coder));
}

MimoChannelEvaluator::MimoChannelEvaluator(const CoderResponse& transmit,
                                           const CoderResponse& receive,
                                           const VirtualChannel& channel)
    : transmit_(transmit), receive_(receive) {
  const CMatrix& e_t = transmit.model().e_oc;
  const CMatrix& e_r = receive.model().e_oc;
  if (channel.h_v.rows() != e_r.rows() || channel.h_v.cols() != e_t.rows()) {
    throw DimensionMismatch("channel dimensions do not match the models");
  }
  coupling_ = e_r.adjoint() * (channel.h_v * e_t);
}

CMatrix MimoChannelEvaluator::channel(const std::vector<CoderState>& states_t,
                                      const std::vector<CoderState>& states_r) const {
  CMatrix right(coupling_.cols(), static_cast<Eigen::Index>(states_t.size()));
  for (std::size_t n = 0; n < states_t.size(); ++n) {
    right.col(static_cast<Eigen::Index>(n)) = states_t[n].unit_currents;
  }
  CMatrix left(coupling_.rows(), static_cast<Eigen::Index>(states_r.size()));
  for (std::size_t n = 0; n < states_r.size(); ++n) {
    left.col(static_cast<Eigen::Index>(n)) = states_r[n].unit_currents;
  }
  return left.adjoint() * coupling_ * right;
}

std::optional<CMatrix> MimoChannelEvaluator::channel(
    const std::vector<AntennaCoder>& coders_t, const std::vector<AntennaCoder>& coders_r) const {
  std::vector<CoderState> st;
  std::vector<CoderState> sr;
  st.reserve(coders_t.size());
  sr.reserve(coders_r.size());
  for (const auto& c : coders_t) {
    st.push_back(transmit_.evaluate(c));
    if (!st.back().feasible()) return std::nullopt;
  }
  for (const auto& c : coders_r) {
    sr.push_back(receive_.evaluate(c));
    if (!sr.back().feasible()) return std::nullopt;
  }
  return channel(st, sr);
}

}  // namespace pixelcode
