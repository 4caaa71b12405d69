// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/antenna_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pixelcode/rng.hpp"

namespace pixelcode {

namespace {

constexpr double kReciprocityTolerance = 1e-9;
constexpr double kPassivityTolerance = 1e-9;

bool same_matrix(const CMatrix& a, const CMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

// ---------------------------------------------------------------------------
// AntennaCoder

AntennaCoder::AntennaCoder(int length, std::uint8_t fill)
    : bits_(static_cast<std::size_t>(std::max(length, 0)), fill) {
  if (length < 0) throw DimensionMismatch("coder length must be non-negative");
  if (fill > 1) throw InvalidConfig("coder bits must be 0 or 1");
}

AntennaCoder::AntennaCoder(std::initializer_list<int> bits)
    : AntennaCoder(std::vector<int>(bits)) {}

AntennaCoder::AntennaCoder(const std::vector<int>& bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw InvalidConfig("coder bits must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

AntennaCoder AntennaCoder::from_index(int length, std::uint64_t index) {
  if (length > 64) throw TooLarge("coder index only covers up to 64 bits");
  AntennaCoder coder(length);
  for (int q = 0; q < length; ++q) {
    coder.bits_[static_cast<std::size_t>(q)] =
        static_cast<std::uint8_t>((index >> (length - 1 - q)) & 1U);
  }
  return coder;
}

std::uint64_t AntennaCoder::to_index() const {
  if (size() > 64) throw TooLarge("coder index only covers up to 64 bits");
  std::uint64_t index = 0;
  for (std::uint8_t b : bits_) index = (index << 1) | b;
  return index;
}

void AntennaCoder::set(int q, std::uint8_t value) {
  if (value > 1) throw InvalidConfig("coder bits must be 0 or 1");
  bits_.at(static_cast<std::size_t>(q)) = value;
}

int AntennaCoder::count_ones() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

int AntennaCoder::hamming_distance(const AntennaCoder& other) const {
  if (other.size() != size()) throw DimensionMismatch("coders of different length");
  int d = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != other.bits_[i];
  return d;
}

std::string AntennaCoder::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (std::uint8_t b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

// ---------------------------------------------------------------------------
// Model validation

bool operator==(const PixelAntennaModel& a, const PixelAntennaModel& b) {
  return a.q_switches == b.q_switches && a.k_angles == b.k_angles &&
         a.frequency_hz == b.frequency_hz && same_matrix(a.z_matrix, b.z_matrix) &&
         same_matrix(a.e_oc, b.e_oc);
}

bool ValidationReport::mentions(std::string_view keyword) const {
  return std::any_of(violations.begin(), violations.end(), [&](const std::string& v) {
    return v.find(keyword) != std::string::npos;
  });
}

std::string ValidationReport::summary() const {
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += v;
  }
  return s;
}

ValidationReport validate_model(const PixelAntennaModel& model) {
  ValidationReport report;
  auto& out = report.violations;
  const int q = model.q_switches;
  const int k = model.k_angles;

  if (q < 1) out.push_back("dimensions: q_switches must be >= 1");
  if (k < 1) out.push_back("dimensions: k_angles must be >= 1");
  if (!(std::isfinite(model.frequency_hz) && model.frequency_hz > 0)) {
    out.push_back("frequency: frequency_hz must be positive and finite");
  }

  const bool z_shape = q >= 1 && model.z_matrix.rows() == q + 1 && model.z_matrix.cols() == q + 1;
  if (q >= 1 && !z_shape) {
    out.push_back("dimensions: z_matrix must be " + std::to_string(q + 1) + "x" +
                  std::to_string(q + 1));
  }
  if (q >= 1 && k >= 1 && (model.e_oc.rows() != 2 * k || model.e_oc.cols() != q + 1)) {
    out.push_back("dimensions: e_oc must be " + std::to_string(2 * k) + "x" +
                  std::to_string(q + 1));
  }
  if (!model.z_matrix.allFinite()) out.push_back("finite: z_matrix has non-finite entries");
  if (!model.e_oc.allFinite()) out.push_back("finite: e_oc has non-finite entries");

  if (z_shape && model.z_matrix.allFinite()) {
    const CMatrix& z = model.z_matrix;
    const double scale = z.cwiseAbs().maxCoeff();
    const double asym = (z - z.transpose()).cwiseAbs().maxCoeff();
    if (asym > kReciprocityTolerance * scale) {
      out.push_back("reciprocity: Z differs from its transpose (max |Z - Z^T| = " +
                    std::to_string(asym) + ")");
    }
    const RMatrix re = z.real();
    const RMatrix sym = 0.5 * (re + re.transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(sym, Eigen::EigenvaluesOnly);
    const RVector& lambda = eig.eigenvalues();
    const double largest = lambda.cwiseAbs().maxCoeff();
    if (lambda.minCoeff() < -kPassivityTolerance * largest) {
      out.push_back("passivity: Re(Z) has a negative eigenvalue " +
                    std::to_string(lambda.minCoeff()));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Currents and patterns

CVector port_currents(const PixelAntennaModel& model, const AntennaCoder& coder,
                      Complex antenna_current) {
  const int q = model.q_switches;
  if (coder.size() != q) {
    throw DimensionMismatch("coder has " + std::to_string(coder.size()) +
                            " bits, model has " + std::to_string(q) + " switches");
  }
  CVector currents = CVector::Zero(q + 1);
  currents(0) = antenna_current;

  std::vector<int> on;
  on.reserve(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    if (coder[i] == 0) on.push_back(i);
  }
  if (on.empty()) return currents;

  const auto n = static_cast<Eigen::Index>(on.size());
  CMatrix reduced(n, n);
  CVector rhs(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    rhs(a) = -model.z_matrix(on[a] + 1, 0) * antenna_current;
    for (Eigen::Index b = 0; b < n; ++b) reduced(a, b) = model.z_matrix(on[a] + 1, on[b] + 1);
  }
  Eigen::PartialPivLU<CMatrix> lu(reduced);
  const double rcond = lu.rcond();
  if (!(rcond >= kSingularTolerance)) {
    throw SingularNetwork("on-switch impedance subsystem is singular (rcond " +
                          std::to_string(rcond) + ")");
  }
  const CVector solved = lu.solve(rhs);
  for (Eigen::Index a = 0; a < n; ++a) currents(on[a] + 1) = solved(a);
  return currents;
}

CVector radiation_pattern(const PixelAntennaModel& model, const AntennaCoder& coder,
                          bool normalize) {
  CVector pattern = model.e_oc * port_currents(model, coder);
  if (normalize) {
    const double norm = pattern.norm();
    if (!(norm >= kZeroPatternNorm)) {
      throw ZeroPattern("coder " + coder.to_string() + " does not radiate");
    }
    pattern /= norm;
  }
  return pattern;
}

// ---------------------------------------------------------------------------
// Synthesis

PixelAntennaModel synthesize_model(const SynthesisSpec& spec) {
  if (spec.q_switches < 1 || spec.k_angles < 1) {
    throw InvalidSpec("q_switches and k_angles must be >= 1");
  }
  if (!(std::isfinite(spec.resistance_scale) && spec.resistance_scale > 0)) {
    throw InvalidSpec("resistance_scale must be positive and finite");
  }
  if (!std::isfinite(spec.reactance_scale)) throw InvalidSpec("reactance_scale must be finite");
  if (!(std::isfinite(spec.frequency_hz) && spec.frequency_hz > 0)) {
    throw InvalidSpec("frequency_hz must be positive and finite");
  }

  const int ports = spec.q_switches + 1;
  const int rows = 2 * spec.k_angles;
  const int rank = std::min(rows, ports);

  if (spec.singular_spectrum) {
    const auto& s = *spec.singular_spectrum;
    if (static_cast<int>(s.size()) > rank) {
      throw InvalidSpec("singular_spectrum has " + std::to_string(s.size()) +
                        " values, at most " + std::to_string(rank) + " allowed");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!std::isfinite(s[i]) || s[i] < 0) {
        throw InvalidSpec("singular_spectrum values must be finite and non-negative");
      }
      if (i > 0 && s[i] > s[i - 1]) {
        throw InvalidSpec("singular_spectrum must be sorted non-increasing");
      }
    }
  }

  Rng rng = derive_stream(spec.seed, StreamTag::kSynthesis);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double half = std::sqrt(0.5);

  RMatrix a(ports, ports);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = normal(rng);
  RMatrix b(ports, ports);
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < b.rows(); ++i) b(i, j) = normal(rng);

  const RMatrix resistance = spec.resistance_scale * (a * a.transpose());
  const RMatrix reactance = spec.reactance_scale * 0.5 * (b + b.transpose());

  PixelAntennaModel model;
  model.q_switches = spec.q_switches;
  model.k_angles = spec.k_angles;
  model.frequency_hz = spec.frequency_hz;
  model.z_matrix = resistance.cast<Complex>() + Complex(0.0, 1.0) * reactance.cast<Complex>();
  // Exact symmetry; the Gram product can differ from its transpose in the last ulp.
  model.z_matrix = (0.5 * (model.z_matrix + model.z_matrix.transpose())).eval();

  model.e_oc.resize(rows, ports);
  for (Eigen::Index j = 0; j < model.e_oc.cols(); ++j) {
    for (Eigen::Index i = 0; i < model.e_oc.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      model.e_oc(i, j) = Complex(half * re, half * im);
    }
  }

  if (spec.singular_spectrum) {
    Eigen::JacobiSVD<CMatrix> svd(model.e_oc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    RVector s = RVector::Zero(rank);
    for (std::size_t i = 0; i < spec.singular_spectrum->size(); ++i) {
      s(static_cast<Eigen::Index>(i)) = (*spec.singular_spectrum)[i];
    }
    model.e_oc = svd.matrixU() * s.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
  }
  return model;
}

// ---------------------------------------------------------------------------
// Model file

namespace {

using json = nlohmann::ordered_json;

json flatten(const RMatrix& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw ParseError(std::string("missing field '") + field + "'");
  return *it;
}

long long require_integer(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_number_integer()) throw ParseError(std::string("field '") + field + "' must be an integer");
  return v.get<long long>();
}

std::vector<double> require_numbers(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_array()) throw ParseError(std::string("field '") + field + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ParseError(std::string("field '") + field + "' entry " + std::to_string(i) +
                       " is not a number");
    }
    const double x = v[i].get<double>();
    if (!std::isfinite(x)) {
      throw ParseError(std::string("field '") + field + "' entry " + std::to_string(i) +
                       " is not finite");
    }
    out.push_back(x);
  }
  return out;
}

CMatrix assemble(const std::vector<double>& re, const std::vector<double>& im, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const auto idx = static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                       static_cast<std::size_t>(j);
      m(i, j) = Complex(re[idx], im[idx]);
    }
  return m;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelLoadError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string save_model(const PixelAntennaModel& model) {
  json doc;
  doc["version"] = 1;
  doc["frequency_hz"] = model.frequency_hz;
  doc["q_switches"] = model.q_switches;
  doc["k_angles"] = model.k_angles;
  doc["z_re"] = flatten(model.z_matrix.real());
  doc["z_im"] = flatten(model.z_matrix.imag());
  doc["e_oc_re"] = flatten(model.e_oc.real());
  doc["e_oc_im"] = flatten(model.e_oc.imag());
  return doc.dump() + "\n";
}

PixelAntennaModel load_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model file: top level must be an object");

  if (require_integer(doc, "version") != 1) throw ParseError("unsupported model version");
  const json& freq = require(doc, "frequency_hz");
  if (!freq.is_number()) throw ParseError("field 'frequency_hz' must be a number");

  const long long q = require_integer(doc, "q_switches");
  const long long k = require_integer(doc, "k_angles");
  if (q < 1 || q > 4096) throw ParseError("q_switches out of range");
  if (k < 1 || k > 1 << 20) throw ParseError("k_angles out of range");

  const auto ports = static_cast<std::size_t>(q + 1);
  const auto rows = static_cast<std::size_t>(2 * k);

  const auto z_re = require_numbers(doc, "z_re");
  const auto z_im = require_numbers(doc, "z_im");
  for (const auto* z : {&z_re, &z_im}) {
    if (z->size() != ports * ports) {
      throw ParseError("z matrix: expected " + std::to_string(ports * ports) +
                       " entries, found " + std::to_string(z->size()));
    }
  }
  const auto e_re = require_numbers(doc, "e_oc_re");
  const auto e_im = require_numbers(doc, "e_oc_im");
  for (const auto* e : {&e_re, &e_im}) {
    if (e->size() != rows * ports) {
      if (e->size() % rows == 0) {
        throw ParseError("e_oc columns: expected " + std::to_string(ports) + ", found " +
                         std::to_string(e->size() / rows));
      }
      throw ParseError("e_oc size: expected " + std::to_string(rows * ports) +
                       " entries, found " + std::to_string(e->size()));
    }
  }

  PixelAntennaModel model;
  model.q_switches = static_cast<int>(q);
  model.k_angles = static_cast<int>(k);
  model.frequency_hz = freq.get<double>();
  model.z_matrix = assemble(z_re, z_im, static_cast<int>(ports), static_cast<int>(ports));
  model.e_oc = assemble(e_re, e_im, static_cast<int>(rows), static_cast<int>(ports));

  const ValidationReport report = validate_model(model);
  if (!report.ok()) throw ValidationFailed("invalid model: " + report.summary());
  return model;
}

PixelAntennaModel read_model_file(const std::string& path) {
  return load_model(read_text(path));
}

void write_model_file(const PixelAntennaModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << save_model(model);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pixelcode
