// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pixelcode/antenna_model.hpp"

namespace fixtures {

using pixelcode::CMatrix;
using pixelcode::PixelAntennaModel;

inline PixelAntennaModel hand_model(const CMatrix& z, const CMatrix& e_oc) {
  PixelAntennaModel m;
  m.q_switches = static_cast<int>(z.rows()) - 1;
  m.k_angles = static_cast<int>(e_oc.rows() / 2);
  m.z_matrix = z;
  m.e_oc = e_oc;
  return m;
}

inline PixelAntennaModel synthetic(int q, int k, std::uint64_t seed,
                                   std::optional<std::vector<double>> spectrum = std::nullopt) {
  pixelcode::SynthesisSpec spec;
  spec.q_switches = q;
  spec.k_angles = k;
  spec.seed = seed;
  spec.singular_spectrum = std::move(spectrum);
  return pixelcode::synthesize_model(spec);
}

}  // namespace fixtures
