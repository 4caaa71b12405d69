// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "pixelcode/antenna_model.hpp"
#include "pixelcode/beamspace.hpp"

namespace pixelcode {

inline constexpr double kDefaultEadofThreshold = 0.998;

/// Leading-R truncation of the SVD of E_oc, where R is the smallest index at
/// which the cumulative singular energy reaches the threshold.
struct PatternBasis {
  CMatrix u_matrix;                     // 2K x R
  std::vector<double> singular_values;  // R values, non-increasing
  CMatrix v_matrix;                     // (Q+1) x R
  int eadof = 0;
  double threshold = kDefaultEadofThreshold;

  std::vector<double> all_singular_values;
  std::vector<double> cumulative_energy;  // F_i for every singular value
};

PatternBasis pattern_svd(const PixelAntennaModel& model,
                         double threshold = kDefaultEadofThreshold);

struct EquivalentCombiner {
  CVector w;
  // | ||w|| - 1 |, nonzero only through truncation of the basis.
  double norm_residual = 0.0;
};

// w = S V^H i(b), scaled by the factor that normalizes e(b).
EquivalentCombiner equivalent_combiner(const PatternBasis& basis, const PixelAntennaModel& model,
                                       const AntennaCoder& coder);

// U^H H_V e_t.
CVector reduced_channel(const PatternBasis& basis, const VirtualChannel& channel,
                        const CVector& e_t);

// ||U^H H_V e_t||^2, the maximum-ratio bound on any coder's gain.
double gain_upper_bound(const PatternBasis& basis, const VirtualChannel& channel,
                        const CVector& e_t);

// Same bound from the forward field H_V e_t.
double gain_upper_bound(const PatternBasis& basis, const CVector& forward_field);

// rho_ij = e(b_i)^H e(b_j) / (||e(b_i)|| ||e(b_j)||).
CMatrix codebook_correlation(const PixelAntennaModel& model,
                             const std::vector<AntennaCoder>& coders);

// Singular values, F_i, R, per-coder combiner residuals and rho (re/im).
nlohmann::json analysis_report(const PatternBasis& basis, const PixelAntennaModel& model,
                               const std::vector<AntennaCoder>& coders);

}  // namespace pixelcode
