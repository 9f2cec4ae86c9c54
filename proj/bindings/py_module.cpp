// Copyright 2026 the lsdd-doa authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS-IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lsdd/estimators.hpp"
#include "lsdd/eval.hpp"
#include "lsdd/geometry.hpp"
#include "lsdd/report_io.hpp"
#include "lsdd/scene.hpp"
#include "lsdd/similarity.hpp"
#include "lsdd/steering.hpp"
#include "lsdd/stft.hpp"
#include "lsdd/wav.hpp"

namespace py = pybind11;
using namespace lsdd;

namespace {

MultichannelAudio audio_from_numpy(const py::array_t<double>& samples, double sample_rate_hz) {
  const auto buffer = samples.unchecked<2>();
  MultichannelAudio audio;
  audio.sample_rate_hz = sample_rate_hz;
  audio.channels.resize(static_cast<std::size_t>(buffer.shape(0)));
  for (py::ssize_t m = 0; m < buffer.shape(0); ++m) {
    auto& channel = audio.channels[static_cast<std::size_t>(m)];
    channel.resize(static_cast<std::size_t>(buffer.shape(1)));
    for (py::ssize_t n = 0; n < buffer.shape(1); ++n) {
      channel[static_cast<std::size_t>(n)] = buffer(m, n);
    }
  }
  return audio;
}

py::array_t<double> audio_to_numpy(const MultichannelAudio& audio) {
  py::array_t<double> samples({audio.num_channels(), audio.num_samples()});
  auto buffer = samples.mutable_unchecked<2>();
  for (std::size_t m = 0; m < audio.num_channels(); ++m) {
    for (std::size_t n = 0; n < audio.num_samples(); ++n) {
      buffer(static_cast<py::ssize_t>(m), static_cast<py::ssize_t>(n)) = audio.channels[m][n];
    }
  }
  return samples;
}

py::array_t<std::complex<double>> grid_to_numpy(const TFGrid& grid) {
  py::array_t<std::complex<double>> data(
      {grid.num_channels(), grid.num_frames(), grid.num_bins()});
  auto buffer = data.mutable_unchecked<3>();
  for (std::size_t m = 0; m < grid.num_channels(); ++m) {
    for (std::size_t k = 0; k < grid.num_frames(); ++k) {
      for (std::size_t b = 0; b < grid.num_bins(); ++b) {
        buffer(static_cast<py::ssize_t>(m), static_cast<py::ssize_t>(k),
               static_cast<py::ssize_t>(b)) = grid.at(m, k, b);
      }
    }
  }
  return data;
}

AnalyzeOptions make_options(const std::vector<std::string>& algorithms,
                            const std::string& similarity, int smoothing_radius, double f_low,
                            double f_high) {
  AnalyzeOptions options;
  options.algorithms.clear();
  for (const std::string& name : algorithms) {
    options.algorithms.push_back(algorithm_from_string(name));
  }
  options.kind = similarity_kind_from_string(similarity);
  options.smoothing_radius = smoothing_radius;
  options.f_low_hz = f_low;
  options.f_high_hz = f_high;
  return options;
}

py::dict result_to_dict(const AnalyzeResult& result) {
  py::dict by_algorithm;
  for (std::size_t a = 0; a < result.algorithms.size(); ++a) {
    by_algorithm[py::str(to_string(result.algorithms[a]))] = result.records[a];
  }
  return by_algorithm;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Direction-of-arrival estimation for wearable microphone arrays: "
            "LSDD/LSDDe/dSDD/dSDDe estimators, DPD-test evaluation, scene simulator.";

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("z"))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z);

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def(py::init([](const std::vector<std::array<double, 3>>& positions, double c) {
             std::vector<Vec3> mics;
             for (const auto& p : positions) mics.push_back({p[0], p[1], p[2]});
             return ArrayGeometry(std::move(mics), c);
           }),
           py::arg("mic_positions_m"), py::arg("speed_of_sound_mps") = 343.0)
      .def_static("load", &ArrayGeometry::load, py::arg("file"))
      .def("save", &ArrayGeometry::save, py::arg("file"))
      .def_property_readonly("num_mics", &ArrayGeometry::num_mics)
      .def_property_readonly("speed_of_sound", &ArrayGeometry::speed_of_sound)
      .def_property_readonly("mic_positions", [](const ArrayGeometry& g) {
        std::vector<std::array<double, 3>> out;
        for (const Vec3& p : g.mics()) out.push_back({p.x, p.y, p.z});
        return out;
      });

  py::class_<DoaGrid>(m, "DoaGrid")
      .def(py::init<std::vector<double>>(), py::arg("azimuths_deg"))
      .def_static("uniform", &DoaGrid::uniform, py::arg("spacing_deg") = 6.0)
      .def("__len__", &DoaGrid::size)
      .def_property_readonly("azimuths", &DoaGrid::azimuths)
      .def("nearest_index", &DoaGrid::nearest_index, py::arg("azimuth_deg"));

  m.def("steering_vector", &steering_vector, py::arg("geometry"), py::arg("freq_hz"),
        py::arg("azimuth_deg"),
        "Free-field array response to a unit plane wave from the given azimuth.");

  py::class_<SteeringSet>(m, "SteeringSet")
      .def(py::init<const ArrayGeometry&, DoaGrid, std::vector<double>>(), py::arg("geometry"),
           py::arg("grid"), py::arg("frequencies_hz"))
      .def_static("load", &SteeringSet::load, py::arg("file"))
      .def("save", &SteeringSet::save, py::arg("file"))
      .def_property_readonly("frequencies", &SteeringSet::frequencies)
      .def_property_readonly("num_mics", &SteeringSet::num_mics)
      .def_property_readonly("grid", &SteeringSet::grid)
      .def("vector_at", [](const SteeringSet& set, std::size_t fi, std::size_t l) {
        const auto v = set.vector_at(fi, l);
        return ComplexVector(v.begin(), v.end());
      }, py::arg("freq_index"), py::arg("dir_index"));

  m.def("ideal_spectrum", [](const SteeringSet& steering, double freq_hz) {
    const IdealSpectrumMatrix w = build_ideal_spectrum(steering, freq_hz);
    py::array_t<double> out({w.size(), w.size()});
    auto buffer = out.mutable_unchecked<2>();
    for (std::size_t l = 0; l < w.size(); ++l) {
      for (std::size_t h = 0; h < w.size(); ++h) {
        buffer(static_cast<py::ssize_t>(l), static_cast<py::ssize_t>(h)) = w.at(l, h);
      }
    }
    return out;
  }, py::arg("steering"), py::arg("freq_hz"),
     "Steering self-similarity matrix W at one frequency, shape (L, L).");

  m.def("band_similarity_map", [](const SteeringSet& steering, double reference_azimuth_deg) {
    const BandSimilarityMap map = band_similarity_map(steering, reference_azimuth_deg);
    const std::size_t rows = map.frequencies_hz.size();
    const std::size_t cols = map.azimuths_deg.size();
    py::array_t<double> values({rows, cols});
    auto buffer = values.mutable_unchecked<2>();
    for (std::size_t fi = 0; fi < rows; ++fi) {
      for (std::size_t l = 0; l < cols; ++l) {
        buffer(static_cast<py::ssize_t>(fi), static_cast<py::ssize_t>(l)) = map.at(fi, l);
      }
    }
    return py::make_tuple(map.frequencies_hz, map.azimuths_deg, values);
  }, py::arg("steering"), py::arg("reference_azimuth_deg"),
     "Returns (frequencies_hz, azimuths_deg, values[f, az]).");

  m.def("similarity", [](const ComplexVector& a, const ComplexVector& b, const std::string& kind) {
    return similarity(a, b, similarity_kind_from_string(kind));
  }, py::arg("a"), py::arg("b"), py::arg("kind") = "cosine");

  m.def("energy_weight", [](const ComplexVector& x) { return energy_weight(x); }, py::arg("x"),
        "Median per-channel energy of a bin snapshot.");

  py::class_<TFGrid>(m, "TFGrid")
      .def_property_readonly("num_channels", &TFGrid::num_channels)
      .def_property_readonly("num_frames", &TFGrid::num_frames)
      .def_property_readonly("num_bins", &TFGrid::num_bins)
      .def_property_readonly("sample_rate_hz", &TFGrid::sample_rate_hz)
      .def("bin_frequency", &TFGrid::bin_frequency, py::arg("bin"))
      .def("frame_time", &TFGrid::frame_time, py::arg("frame"))
      .def_property_readonly("frame_times", &TFGrid::frame_times)
      .def_property_readonly("bin_frequencies", &TFGrid::bin_frequencies)
      .def("snapshot", &TFGrid::snapshot, py::arg("frame"), py::arg("bin"))
      .def("to_numpy", &grid_to_numpy, "Complex array of shape (channels, frames, bins).");

  m.def("stft", [](const py::array_t<double>& samples, double sample_rate_hz,
                   std::size_t window_size, std::size_t hop) {
    return stft(audio_from_numpy(samples, sample_rate_hz), window_size, hop);
  }, py::arg("samples"), py::arg("sample_rate_hz"), py::arg("window_size") = 1024,
     py::arg("hop") = 512,
     "Hann-window STFT of samples shaped (channels, samples).");

  py::class_<BinRecord>(m, "BinRecord")
      .def_readonly("frame", &BinRecord::frame)
      .def_readonly("bin", &BinRecord::bin)
      .def_readonly("time_s", &BinRecord::time_s)
      .def_readonly("freq_hz", &BinRecord::freq_hz)
      .def_readonly("theta_deg", &BinRecord::theta_deg)
      .def_readonly("chi", &BinRecord::chi)
      .def("__repr__", [](const BinRecord& r) {
        return "BinRecord(t=" + std::to_string(r.time_s) + ", f=" + std::to_string(r.freq_hz) +
               ", theta=" + std::to_string(r.theta_deg) + ", chi=" + std::to_string(r.chi) + ")";
      });

  m.def("analyze", [](const py::array_t<double>& samples, double sample_rate_hz,
                      const ArrayGeometry& geometry, const std::vector<std::string>& algorithms,
                      const std::string& similarity, int smoothing_radius, double f_low,
                      double f_high, std::size_t window_size, std::size_t hop,
                      double grid_spacing) {
    const TFGrid grid = stft(audio_from_numpy(samples, sample_rate_hz), window_size, hop);
    const AnalyzeResult result =
        analyze(grid, geometry, DoaGrid::uniform(grid_spacing),
                make_options(algorithms, similarity, smoothing_radius, f_low, f_high));
    return result_to_dict(result);
  }, py::arg("samples"), py::arg("sample_rate_hz"), py::arg("geometry"),
     py::arg("algorithms") = std::vector<std::string>{"lsdd", "lsdde", "dsdd", "dsdde"},
     py::arg("similarity") = "cosine", py::arg("smoothing_radius") = 0,
     py::arg("f_low_hz") = 1100.0, py::arg("f_high_hz") = 2000.0, py::arg("window_size") = 1024,
     py::arg("hop") = 512, py::arg("grid_spacing_deg") = 6.0,
     "Per-bin DOA/DPD estimates, as {algorithm: [BinRecord, ...]}.");

  py::class_<Speaker>(m, "Speaker")
      .def_readwrite("id", &Speaker::id)
      .def_readwrite("azimuth_deg_room", &Speaker::azimuth_deg_room);

  py::class_<TruthFrame>(m, "TruthFrame")
      .def_readwrite("frame_time_s", &TruthFrame::frame_time_s)
      .def_readwrite("array_yaw_deg", &TruthFrame::array_yaw_deg)
      .def_readwrite("vad", &TruthFrame::vad)
      .def_readwrite("speakers", &TruthFrame::speakers);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def(py::init<>())
      .def_static("load", &GroundTruth::load, py::arg("file"))
      .def("save", &GroundTruth::save, py::arg("file"))
      .def_readwrite("frames", &GroundTruth::frames);

  py::class_<EvalConfig>(m, "EvalConfig")
      .def(py::init<>())
      .def_readwrite("f_low_hz", &EvalConfig::f_low_hz)
      .def_readwrite("f_high_hz", &EvalConfig::f_high_hz)
      .def_readwrite("delta_t_s", &EvalConfig::delta_t_s)
      .def_readwrite("percentile_p", &EvalConfig::percentile_p)
      .def_readwrite("hit_threshold_deg", &EvalConfig::hit_threshold_deg);

  py::class_<BlockReport>(m, "BlockReport")
      .def_readonly("block_center_s", &BlockReport::block_center_s)
      .def_readonly("valid_bin_count", &BlockReport::valid_bin_count)
      .def_readonly("mean_error_deg", &BlockReport::mean_error_deg)
      .def_readonly("hit_ratio", &BlockReport::hit_ratio);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("has_data", &RunReport::has_data)
      .def_readonly("e_bar_deg", &RunReport::e_bar_deg)
      .def_readonly("h_bar_ratio", &RunReport::h_bar_ratio)
      .def_readonly("total_valid_bins", &RunReport::total_valid_bins)
      .def_readonly("blocks", &RunReport::blocks);

  m.def("evaluate_run", &evaluate_run, py::arg("estimates"), py::arg("truth"), py::arg("config"),
        "Block-based E/H evaluation of per-bin estimates against ground truth.");
  m.def("to_room_frame", &to_room_frame, py::arg("theta_deg_array"), py::arg("yaw_deg"));
  m.def("circular_error", &circular_error, py::arg("psi_deg"), py::arg("theta_deg"));
  m.def("percentile_threshold", &percentile_threshold, py::arg("chis"), py::arg("p"));

  py::class_<SceneSpec>(m, "SceneSpec")
      .def_static("load", &SceneSpec::load, py::arg("file"))
      .def("save", &SceneSpec::save, py::arg("file"))
      .def_readwrite("duration_s", &SceneSpec::duration_s)
      .def_readwrite("sample_rate_hz", &SceneSpec::sample_rate_hz)
      .def_readwrite("seed", &SceneSpec::seed)
      .def_readwrite("noise_level", &SceneSpec::noise_level)
      .def("validate", &SceneSpec::validate, py::arg("num_mics") = 0);

  m.def("synthesize", [](const SceneSpec& spec, const ArrayGeometry& geometry) {
    SceneRender render = synthesize(spec, geometry);
    return py::make_tuple(audio_to_numpy(render.audio), render.audio.sample_rate_hz,
                          render.truth);
  }, py::arg("spec"), py::arg("geometry"),
     "Renders a scene; returns (samples[channels, n], sample_rate_hz, truth).");

  m.def("snr_at_mics", &snr_at_mics, py::arg("spec"), py::arg("geometry"),
        "Expected per-microphone SNR in dB (inf where the noise level is zero).");

  m.def("read_wav", [](const std::filesystem::path& file) {
    const MultichannelAudio audio = read_wav(file);
    return py::make_tuple(audio_to_numpy(audio), audio.sample_rate_hz);
  }, py::arg("file"), "Reads a WAV file; returns (samples[channels, n], sample_rate_hz).");

  m.def("write_wav", [](const std::filesystem::path& file, const py::array_t<double>& samples,
                        double sample_rate_hz) {
    write_wav_float32(file, audio_from_numpy(samples, sample_rate_hz));
  }, py::arg("file"), py::arg("samples"), py::arg("sample_rate_hz"),
     "Writes samples shaped (channels, n) as 32-bit float WAV.");

  m.attr("__version__") = "0.1.0";
}
