// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pixelcode {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Every failure raised by the library derives from Error so callers (the CLI in
// particular) can map whole families onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input or configuration problems: bad files, bad flags, invalid models.
class UsageError : public Error {
 public:
  using Error::Error;
};

#define PIXELCODE_ERROR(Name, Base)          \
  class Name : public Base {                 \
   public:                                   \
    using Base::Base;                        \
  }

PIXELCODE_ERROR(DimensionMismatch, Error);
PIXELCODE_ERROR(SingularNetwork, Error);
PIXELCODE_ERROR(ZeroPattern, Error);
PIXELCODE_ERROR(InfeasibleAll, Error);
PIXELCODE_ERROR(EmptyPartition, Error);
PIXELCODE_ERROR(NonFinite, Error);
PIXELCODE_ERROR(AllZeroEigenvalues, Error);
PIXELCODE_ERROR(DegenerateModel, Error);
PIXELCODE_ERROR(TooLarge, Error);
PIXELCODE_ERROR(IoError, Error);

PIXELCODE_ERROR(InvalidSpec, UsageError);
PIXELCODE_ERROR(InvalidConfig, UsageError);
PIXELCODE_ERROR(ParseError, UsageError);
PIXELCODE_ERROR(ValidationFailed, UsageError);
PIXELCODE_ERROR(ConfigError, UsageError);
PIXELCODE_ERROR(ModelLoadError, UsageError);

#undef PIXELCODE_ERROR

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pixelcode
