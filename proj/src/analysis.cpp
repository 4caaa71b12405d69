// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/analysis.hpp"

#include <cmath>
#include <string>

namespace pixelcode {

namespace {

// Rounding slack when comparing the cumulative energy against the threshold,
// so that a threshold of 1 selects the numerical rank.
constexpr double kThresholdSlack = 1e-12;

}  // namespace

PatternBasis pattern_svd(const PixelAntennaModel& model, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidConfig("EADoF threshold must lie in (0, 1]");
  }
  const CMatrix& e = model.e_oc;
  if (e.size() == 0 || !e.allFinite()) throw DegenerateModel("pattern matrix is empty or not finite");

  Eigen::JacobiSVD<CMatrix> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double total = s.squaredNorm();
  if (!(total > 0.0)) throw DegenerateModel("open-circuit pattern matrix is zero");

  PatternBasis basis;
  basis.threshold = threshold;
  basis.all_singular_values.assign(s.data(), s.data() + s.size());
  basis.cumulative_energy.reserve(static_cast<std::size_t>(s.size()));
  double running = 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    running += s(i) * s(i);
    const double f = running / total;
    basis.cumulative_energy.push_back(f);
    if (rank == 0 && f + kThresholdSlack >= threshold) rank = static_cast<int>(i + 1);
  }
  if (rank == 0) rank = static_cast<int>(s.size());

  basis.eadof = rank;
  basis.u_matrix = svd.matrixU().leftCols(rank);
  basis.v_matrix = svd.matrixV().leftCols(rank);
  basis.singular_values.assign(s.data(), s.data() + rank);
  return basis;
}

EquivalentCombiner equivalent_combiner(const PatternBasis& basis, const PixelAntennaModel& model,
                                       const AntennaCoder& coder) {
  if (basis.v_matrix.rows() != model.e_oc.cols()) {
    throw DimensionMismatch("basis does not belong to this model");
  }
  const CVector currents = port_currents(model, coder);
  const double norm = (model.e_oc * currents).norm();
  if (!(norm >= kZeroPatternNorm)) {
    throw ZeroPattern("coder " + coder.to_string() + " does not radiate");
  }
  RVector s(static_cast<Eigen::Index>(basis.singular_values.size()));
  for (std::size_t i = 0; i < basis.singular_values.size(); ++i) {
    s(static_cast<Eigen::Index>(i)) = basis.singular_values[i];
  }
  EquivalentCombiner out;
  out.w = s.cast<Complex>().asDiagonal() * (basis.v_matrix.adjoint() * currents) / norm;
  out.norm_residual = std::abs(out.w.norm() - 1.0);
  return out;
}

CVector reduced_channel(const PatternBasis& basis, const VirtualChannel& channel,
                        const CVector& e_t) {
  if (channel.h_v.rows() != basis.u_matrix.rows() || channel.h_v.cols() != e_t.size()) {
    throw DimensionMismatch("channel dimensions do not match the basis");
  }
  return basis.u_matrix.adjoint() * (channel.h_v * e_t);
}

double gain_upper_bound(const PatternBasis& basis, const VirtualChannel& channel,
                        const CVector& e_t) {
  return reduced_channel(basis, channel, e_t).squaredNorm();
}

double gain_upper_bound(const PatternBasis& basis, const CVector& forward_field) {
  if (forward_field.size() != basis.u_matrix.rows()) {
    throw DimensionMismatch("forward field length does not match the basis");
  }
  return (basis.u_matrix.adjoint() * forward_field).squaredNorm();
}

CMatrix codebook_correlation(const PixelAntennaModel& model,
                             const std::vector<AntennaCoder>& coders) {
  const auto m = static_cast<Eigen::Index>(coders.size());
  CMatrix patterns(model.e_oc.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    patterns.col(i) = radiation_pattern(model, coders[static_cast<std::size_t>(i)], true);
  }
  CMatrix rho(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    rho(i, i) = Complex(patterns.col(i).squaredNorm(), 0.0);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      rho(i, j) = patterns.col(i).dot(patterns.col(j));
      rho(j, i) = std::conj(rho(i, j));
    }
  }
  return rho;
}

nlohmann::json analysis_report(const PatternBasis& basis, const PixelAntennaModel& model,
                               const std::vector<AntennaCoder>& coders) {
  nlohmann::json report;
  report["q_switches"] = model.q_switches;
  report["k_angles"] = model.k_angles;
  report["threshold"] = basis.threshold;
  report["eadof"] = basis.eadof;
  report["singular_values"] = basis.all_singular_values;
  report["cumulative_energy"] = basis.cumulative_energy;
  if (!coders.empty()) {
    nlohmann::json residuals = nlohmann::json::array();
    for (const auto& c : coders) {
      nlohmann::json entry;
      entry["coder"] = c.to_string();
      entry["w_norm_residual"] = equivalent_combiner(basis, model, c).norm_residual;
      residuals.push_back(std::move(entry));
    }
    report["combiner_residuals"] = std::move(residuals);

    const CMatrix rho = codebook_correlation(model, coders);
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      std::vector<double> row_re;
      std::vector<double> row_im;
      for (Eigen::Index j = 0; j < rho.cols(); ++j) {
        row_re.push_back(rho(i, j).real());
        row_im.push_back(rho(i, j).imag());
      }
      re.push_back(row_re);
      im.push_back(row_im);
    }
    report["rho_re"] = std::move(re);
    report["rho_im"] = std::move(im);
  }
  return report;
}

}  // namespace pixelcode
