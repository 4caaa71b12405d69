// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pixelcode/cli.hpp"
#include "pixelcode/experiment.hpp"

namespace py = pybind11;
using namespace pixelcode;

namespace {

AntennaCoder to_coder(const std::vector<int>& bits) { return AntennaCoder(bits); }

std::vector<int> to_bits(const AntennaCoder& coder) {
  return std::vector<int>(coder.bits().begin(), coder.bits().end());
}

SeboConfig make_sebo(int block_size, int max_cycles, int flip_rounds, int flips_per_round,
                     std::uint64_t seed) {
  SeboConfig c;
  c.block_size = block_size;
  c.max_cycles = max_cycles;
  c.flip_rounds = flip_rounds;
  c.flips_per_round = flips_per_round;
  c.seed = seed;
  return c;
}

py::dict trace_dict(const OptimizationTrace& t) {
  py::list improvements;
  for (const auto& r : t.improvements) improvements.append(py::make_tuple(r.cycle, r.value));
  py::dict d;
  d["coder"] = to_bits(t.coder);
  d["value"] = t.value;
  d["evaluations"] = t.evaluations;
  d["cycles"] = t.cycles;
  d["improvements"] = improvements;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Antenna coding for pixel antennas";
  m.attr("__version__") = kVersion;

  // Translators run newest first, so the derived type is registered last.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  py::class_<PixelAntennaModel>(m, "PixelAntennaModel")
      .def(py::init([](const CMatrix& z, const CMatrix& e_oc, double frequency_hz) {
             PixelAntennaModel model;
             model.q_switches = static_cast<int>(z.rows()) - 1;
             model.k_angles = static_cast<int>(e_oc.rows() / 2);
             model.z_matrix = z;
             model.e_oc = e_oc;
             model.frequency_hz = frequency_hz;
             return model;
           }),
           py::arg("z_matrix"), py::arg("e_oc"), py::arg("frequency_hz") = 2.4e9)
      .def_readonly("q_switches", &PixelAntennaModel::q_switches)
      .def_readonly("k_angles", &PixelAntennaModel::k_angles)
      .def_readonly("z_matrix", &PixelAntennaModel::z_matrix)
      .def_readonly("e_oc", &PixelAntennaModel::e_oc)
      .def_readonly("frequency_hz", &PixelAntennaModel::frequency_hz)
      .def("__eq__", [](const PixelAntennaModel& a, const PixelAntennaModel& b) { return a == b; });

  m.def(
      "synthesize_model",
      [](int q, int k, std::uint64_t seed, std::optional<std::vector<double>> spectrum,
         double resistance_scale, double reactance_scale) {
        SynthesisSpec spec;
        spec.q_switches = q;
        spec.k_angles = k;
        spec.seed = seed;
        spec.singular_spectrum = std::move(spectrum);
        spec.resistance_scale = resistance_scale;
        spec.reactance_scale = reactance_scale;
        return synthesize_model(spec);
      },
      py::arg("q") = 10, py::arg("k") = kDefaultAngles, py::arg("seed") = 0,
      py::arg("spectrum") = py::none(), py::arg("resistance_scale") = 1.0,
      py::arg("reactance_scale") = 1.0);
  m.def("validate_model", [](const PixelAntennaModel& model) { return validate_model(model).violations; });
  m.def("save_model", &save_model);
  m.def("load_model", [](const std::string& text) { return load_model(text); });
  m.def("read_model_file", &read_model_file);
  m.def("write_model_file", &write_model_file);

  m.def(
      "port_currents",
      [](const PixelAntennaModel& model, const std::vector<int>& bits) {
        return port_currents(model, to_coder(bits));
      },
      py::arg("model"), py::arg("coder"));
  m.def(
      "radiation_pattern",
      [](const PixelAntennaModel& model, const std::vector<int>& bits, bool normalize) {
        return radiation_pattern(model, to_coder(bits), normalize);
      },
      py::arg("model"), py::arg("coder"), py::arg("normalize") = false);

  m.def(
      "sample_virtual_channel",
      [](int k, std::uint64_t seed, std::uint64_t index) {
        Rng rng = derive_stream(seed, StreamTag::kTrial, index);
        return sample_virtual_channel(k, rng).h_v;
      },
      py::arg("k"), py::arg("seed") = 0, py::arg("index") = 0);
  m.def("isotropic_pattern", &isotropic_pattern);
  m.def("siso_channel", [](const CVector& e_r, const CMatrix& h_v, const CVector& e_t) {
    return siso_channel(e_r, VirtualChannel{h_v}, e_t);
  });
  m.def(
      "mimo_channel",
      [](const PixelAntennaModel& model_t, const std::vector<std::vector<int>>& coders_t,
         const PixelAntennaModel& model_r, const std::vector<std::vector<int>>& coders_r,
         const CMatrix& h_v) {
        std::vector<AntennaCoder> ct;
        std::vector<AntennaCoder> cr;
        for (const auto& b : coders_t) ct.push_back(to_coder(b));
        for (const auto& b : coders_r) cr.push_back(to_coder(b));
        return mimo_channel(model_t, ct, model_r, cr, VirtualChannel{h_v});
      });

  m.def(
      "sebo_maximize",
      [](const std::function<double(std::vector<int>)>& objective, int q, int block_size,
         int max_cycles, int flip_rounds, int flips_per_round, std::uint64_t seed,
         std::optional<std::vector<int>> init) {
        std::optional<AntennaCoder> start;
        if (init) start = to_coder(*init);
        const BinaryObjective wrapped = [&](const AntennaCoder& c) { return objective(to_bits(c)); };
        return trace_dict(sebo_maximize(wrapped, q, make_sebo(block_size, max_cycles, flip_rounds,
                                                              flips_per_round, seed),
                                        start));
      },
      py::arg("objective"), py::arg("q"), py::arg("block_size") = 10, py::arg("max_cycles") = 50,
      py::arg("flip_rounds") = 20, py::arg("flips_per_round") = 1, py::arg("seed") = 0,
      py::arg("init") = py::none());
  m.def(
      "exhaustive_maximize",
      [](const std::function<double(std::vector<int>)>& objective, int q) {
        const auto [coder, value] =
            exhaustive_maximize([&](const AntennaCoder& c) { return objective(to_bits(c)); }, q);
        return py::make_tuple(to_bits(coder), value);
      },
      py::arg("objective"), py::arg("q"));
  m.def(
      "optimize_siso_gain",
      [](const PixelAntennaModel& model, const CMatrix& h_v, const CVector& e_t, int block_size,
         std::uint64_t seed) {
        const CoderResponse response(model);
        const SisoGainEvaluator evaluator(response, VirtualChannel{h_v}, e_t);
        SeboConfig config;
        config.block_size = block_size;
        config.seed = seed;
        return trace_dict(sebo_maximize([&](const AntennaCoder& c) { return evaluator.gain(c); },
                                        model.q_switches, config));
      },
      py::arg("model"), py::arg("h_v"), py::arg("e_t"), py::arg("block_size") = 10,
      py::arg("seed") = 0);

  m.def(
      "train_codebook",
      [](const PixelAntennaModel& model, std::size_t m_size, std::size_t training_size,
         std::uint64_t seed, double epsilon, int i_max, int block_size) {
        Rng rng = derive_stream(seed, StreamTag::kTraining);
        const TrainingSet ts = sample_training_fields(model.k_angles, training_size, rng);
        GlaConfig gla;
        gla.seed = seed;
        gla.epsilon = epsilon;
        gla.i_max = i_max;
        SeboConfig sebo;
        sebo.block_size = block_size;
        sebo.seed = mix_seed(seed, 1);
        return save_codebook(train_codebook(model, ts, m_size, gla, sebo));
      },
      py::arg("model"), py::arg("m"), py::arg("training_size") = 1000, py::arg("seed") = 0,
      py::arg("epsilon") = 1e-3, py::arg("i_max") = 30, py::arg("block_size") = 10,
      "Returns the trained codebook as a JSON document.");
  m.def(
      "codebook_coders",
      [](const std::string& document) {
        std::vector<std::vector<int>> out;
        for (const auto& c : load_codebook(document).coders) out.push_back(to_bits(c));
        return out;
      },
      py::arg("document"));

  m.def("capacity_uniform", &capacity_uniform, py::arg("h"), py::arg("total_power"),
        py::arg("noise_power") = 1.0);
  m.def(
      "capacity_waterfilling",
      [](const CMatrix& h, double p, double sigma2) {
        const auto r = capacity_waterfilling(h, p, sigma2);
        return py::make_tuple(r.capacity, r.allocation.powers, r.allocation.water_level);
      },
      py::arg("h"), py::arg("total_power"), py::arg("noise_power") = 1.0);
  m.def(
      "waterfill",
      [](const std::vector<double>& eigenvalues, double p, double sigma2) {
        const auto a = waterfill(eigenvalues, p, sigma2);
        return py::make_tuple(a.powers, a.water_level);
      },
      py::arg("eigenvalues"), py::arg("total_power"), py::arg("noise_power") = 1.0);

  m.def(
      "pattern_svd",
      [](const PixelAntennaModel& model, double threshold) {
        const PatternBasis b = pattern_svd(model, threshold);
        py::dict d;
        d["eadof"] = b.eadof;
        d["singular_values"] = b.all_singular_values;
        d["cumulative_energy"] = b.cumulative_energy;
        d["u"] = b.u_matrix;
        d["v"] = b.v_matrix;
        return d;
      },
      py::arg("model"), py::arg("threshold") = kDefaultEadofThreshold);
  m.def("codebook_correlation",
        [](const PixelAntennaModel& model, const std::vector<std::vector<int>>& coders) {
          std::vector<AntennaCoder> cs;
          for (const auto& b : coders) cs.push_back(to_coder(b));
          return codebook_correlation(model, cs);
        });

  m.def(
      "run_experiment",
      [](const std::string& config_json, unsigned threads) {
        const auto config = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        ResultSet rs;
        {
          py::gil_scoped_release release;
          rs = run_experiment(config, threads);
        }
        return results_to_json(rs).dump();
      },
      py::arg("config_json"), py::arg("threads") = 0,
      "Runs an experiment described by a JSON config and returns the result set as JSON.");
  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_dispatch(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
