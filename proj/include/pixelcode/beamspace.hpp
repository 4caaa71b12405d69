// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "pixelcode/antenna_model.hpp"
#include "pixelcode/common.hpp"
#include "pixelcode/rng.hpp"

namespace pixelcode {

// 2K x 2K virtual channel, blocks [theta-theta, theta-phi; phi-theta, phi-phi].
struct VirtualChannel {
  CMatrix h_v;

  int k_angles() const { return static_cast<int>(h_v.rows() / 2); }
};

// Entries i.i.d. CN(0,1), filled column by column, real part drawn first.
VirtualChannel sample_virtual_channel(int k_angles, Rng& rng);

// H_V e_t drawn directly: for i.i.d. CN(0,1) H_V it is CN(0, ||e_t||^2 I),
// which costs 2K draws instead of 4K^2. Same draw order as the matrix sampler.
CVector sample_forward_field(const CVector& e_t, Rng& rng);

// Unit-norm theta-polarized pattern with equal magnitude on all K angles.
CVector isotropic_pattern(int k_angles);

// h = e_r^H H_V e_t.
Complex siso_channel(const CVector& e_r, const VirtualChannel& channel, const CVector& e_t);

// H(B_T, B_R) = E_R^H H_V E_T with one normalized pattern per antenna.
CMatrix mimo_channel(const PixelAntennaModel& model_t, const std::vector<AntennaCoder>& coders_t,
                     const PixelAntennaModel& model_r, const std::vector<AntennaCoder>& coders_r,
                     const VirtualChannel& channel);

/// Currents of a coder rescaled so that E_oc * unit_currents has unit norm.
/// An infeasible coder (zero pattern or singular on-switch network) has an
/// empty current vector.
struct CoderState {
  CVector unit_currents;
  double pattern_norm = 0.0;

  bool feasible() const { return unit_currents.size() > 0; }
};

/// Per-model evaluation cache shared by the optimizers.
///
/// Small models (Q <= kTableLimit) precompute every coder once; larger ones
/// solve the reduced network on demand. Immutable after construction and
/// safe to share between threads.
class CoderResponse {
 public:
  static constexpr int kTableLimit = 14;

  explicit CoderResponse(std::shared_ptr<const PixelAntennaModel> model);
  explicit CoderResponse(const PixelAntennaModel& model);

  const PixelAntennaModel& model() const { return *model_; }
  int q() const { return model_->q_switches; }

  CoderState evaluate(const AntennaCoder& coder) const;
  bool feasible(const AntennaCoder& coder) const { return evaluate(coder).feasible(); }

  // E_oc^H x, the projection every gain evaluation starts from.
  CVector project(const CVector& field) const { return model_->e_oc.adjoint() * field; }

 private:
  CoderState compute(const AntennaCoder& coder) const;

  std::shared_ptr<const PixelAntennaModel> model_;
  std::vector<CoderState> table_;
};

/// |h(b)|^2 for one channel realization and fixed transmit pattern, reduced
/// to a (Q+1)-dimensional inner product: h(b) = unit_currents^H E_oc^H H_V e_t.
class SisoGainEvaluator {
 public:
  SisoGainEvaluator(const CoderResponse& response, const VirtualChannel& channel,
                    const CVector& e_t);
  // From the forward field H_V e_t.
  SisoGainEvaluator(const CoderResponse& response, const CVector& forward_field);

  // -inf for infeasible coders.
  double gain(const AntennaCoder& coder) const;
  double gain(const CoderState& state) const;
  Complex channel(const CoderState& state) const;

 private:
  const CoderResponse& response_;
  CVector projection_;
};

/// Assembles H(B_T, B_R) through the coupling matrix E_oc,R^H H_V E_oc,T so
/// each entry costs O(Q^2) instead of a 2K-dimensional product.
class MimoChannelEvaluator {
 public:
  MimoChannelEvaluator(const CoderResponse& transmit, const CoderResponse& receive,
                       const VirtualChannel& channel);

  const CoderResponse& transmit() const { return transmit_; }
  const CoderResponse& receive() const { return receive_; }

  // Empty optional when any coder is infeasible.
  std::optional<CMatrix> channel(const std::vector<AntennaCoder>& coders_t,
                                 const std::vector<AntennaCoder>& coders_r) const;
  CMatrix channel(const std::vector<CoderState>& states_t,
                  const std::vector<CoderState>& states_r) const;

 private:
  const CoderResponse& transmit_;
  const CoderResponse& receive_;
  CMatrix coupling_;
};

}  // namespace pixelcode
