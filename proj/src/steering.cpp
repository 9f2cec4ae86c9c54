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

#include "lsdd/steering.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "lsdd/similarity.hpp"

namespace lsdd {

namespace {

constexpr const char* kSteeringFormat = "lsdd-steering-v1";

// Matching tolerance for frequency lookups: bin frequencies are recomputed
// identically on both sides, so only rounding noise has to be absorbed.
bool freq_matches(double stored, double wanted) {
  return std::abs(stored - wanted) <= 1e-6 * std::max(1.0, std::abs(wanted));
}

}  // namespace

ComplexVector steering_vector(const ArrayGeometry& geometry, double freq_hz, double azimuth_deg) {
  if (freq_hz < 0.0) throw std::invalid_argument("steering_vector: frequency must be >= 0");
  const double az_rad = azimuth_deg * std::numbers::pi / 180.0;
  // Unit vector from the array toward the source; a wavefront reaches the
  // microphones with delay -(r . dir)/c relative to the centroid.
  const Vec3 dir{std::cos(az_rad), std::sin(az_rad), 0.0};
  const Vec3 origin = geometry.centroid();
  ComplexVector v;
  v.reserve(geometry.num_mics());
  for (const Vec3& mic : geometry.mics()) {
    const double delay_s = -dot(mic - origin, dir) / geometry.speed_of_sound();
    const double phase = -2.0 * std::numbers::pi * freq_hz * delay_s;
    v.emplace_back(std::cos(phase), std::sin(phase));
  }
  return v;
}

SteeringSet::SteeringSet(const ArrayGeometry& geometry, DoaGrid grid,
                         std::vector<double> frequencies_hz)
    : grid_(std::move(grid)), frequencies_(std::move(frequencies_hz)),
      num_mics_(geometry.num_mics()) {
  if (frequencies_.empty()) throw std::invalid_argument("SteeringSet: no frequencies given");
  vectors_.reserve(frequencies_.size() * grid_.size() * num_mics_);
  for (double f : frequencies_) {
    for (std::size_t l = 0; l < grid_.size(); ++l) {
      ComplexVector v = steering_vector(geometry, f, grid_.azimuth(l));
      vectors_.insert(vectors_.end(), v.begin(), v.end());
    }
  }
  validate();
}

SteeringSet::SteeringSet(DoaGrid grid, std::vector<double> frequencies_hz, std::size_t num_mics,
                         ComplexVector vectors)
    : grid_(std::move(grid)), frequencies_(std::move(frequencies_hz)), num_mics_(num_mics),
      vectors_(std::move(vectors)) {
  if (frequencies_.empty()) throw std::invalid_argument("SteeringSet: no frequencies given");
  if (vectors_.size() != frequencies_.size() * grid_.size() * num_mics_) {
    throw std::invalid_argument("SteeringSet: expected one vector per (frequency, direction)");
  }
  validate();
}

void SteeringSet::validate() const {
  for (std::size_t fi = 0; fi < frequencies_.size(); ++fi) {
    for (std::size_t l = 0; l < grid_.size(); ++l) {
      std::span<const Complex> v = vector_at(fi, l);
      double n = 0.0;
      for (const Complex& c : v) n += std::norm(c);
      if (n <= 0.0) {
        throw std::invalid_argument("SteeringSet: zero-norm vector at f=" +
                                    std::to_string(frequencies_[fi]) + " Hz, azimuth " +
                                    std::to_string(grid_.azimuth(l)) + " deg");
      }
    }
  }
}

std::size_t SteeringSet::frequency_index(double freq_hz) const {
  for (std::size_t fi = 0; fi < frequencies_.size(); ++fi) {
    if (freq_matches(frequencies_[fi], freq_hz)) return fi;
  }
  throw std::out_of_range("SteeringSet: frequency " + std::to_string(freq_hz) +
                          " Hz was not precomputed in this set");
}

bool SteeringSet::has_frequency(double freq_hz) const {
  for (double f : frequencies_) {
    if (freq_matches(f, freq_hz)) return true;
  }
  return false;
}

std::span<const Complex> SteeringSet::vector_at(std::size_t freq_index,
                                                std::size_t dir_index) const {
  if (freq_index >= frequencies_.size() || dir_index >= grid_.size()) {
    throw std::out_of_range("SteeringSet: index out of range");
  }
  const std::size_t offset = (freq_index * grid_.size() + dir_index) * num_mics_;
  return {vectors_.data() + offset, num_mics_};
}

SteeringSet SteeringSet::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open steering file: " + file.string());
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != kSteeringFormat) {
    throw std::runtime_error("steering file " + file.string() + ": expected format '" +
                             kSteeringFormat + "'");
  }
  std::vector<double> freqs = j.at("frequencies_hz").get<std::vector<double>>();
  DoaGrid grid(j.at("azimuths_deg").get<std::vector<double>>());
  const std::size_t num_mics = j.at("num_mics").get<std::size_t>();
  const auto& table = j.at("vectors");
  if (table.size() != freqs.size()) {
    throw std::runtime_error("steering file " + file.string() + ": one row per frequency expected");
  }
  ComplexVector vectors;
  vectors.reserve(freqs.size() * grid.size() * num_mics);
  for (const auto& per_freq : table) {
    if (per_freq.size() != grid.size()) {
      throw std::runtime_error("steering file " + file.string() +
                               ": one entry per grid direction expected");
    }
    for (const auto& per_dir : per_freq) {
      if (per_dir.size() != num_mics) {
        throw std::runtime_error("steering file " + file.string() +
                                 ": expected " + std::to_string(num_mics) + " complex pairs");
      }
      for (const auto& pair : per_dir) {
        vectors.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
      }
    }
  }
  return SteeringSet(std::move(grid), std::move(freqs), num_mics, std::move(vectors));
}

void SteeringSet::save(const std::filesystem::path& file) const {
  nlohmann::json j;
  j["format"] = kSteeringFormat;
  j["frequencies_hz"] = frequencies_;
  j["azimuths_deg"] = grid_.azimuths();
  j["num_mics"] = num_mics_;
  auto& table = j["vectors"] = nlohmann::json::array();
  for (std::size_t fi = 0; fi < frequencies_.size(); ++fi) {
    nlohmann::json per_freq = nlohmann::json::array();
    for (std::size_t l = 0; l < grid_.size(); ++l) {
      nlohmann::json per_dir = nlohmann::json::array();
      for (const Complex& c : vector_at(fi, l)) per_dir.push_back({c.real(), c.imag()});
      per_freq.push_back(std::move(per_dir));
    }
    table.push_back(std::move(per_freq));
  }
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write steering file: " + file.string());
  out << j.dump() << "\n";
}

IdealSpectrumMatrix::IdealSpectrumMatrix(double freq_hz, std::size_t size,
                                         std::vector<double> values)
    : freq_hz_(freq_hz), size_(size), values_(std::move(values)) {
  if (values_.size() != size_ * size_) {
    throw std::invalid_argument("IdealSpectrumMatrix: value count does not match size");
  }
}

std::span<const double> IdealSpectrumMatrix::column(std::size_t h) const {
  if (h >= size_) throw std::out_of_range("IdealSpectrumMatrix: column out of range");
  return {values_.data() + h * size_, size_};
}

IdealSpectrumMatrix build_ideal_spectrum_at(const SteeringSet& steering, std::size_t freq_index) {
  const std::size_t L = steering.grid().size();
  std::vector<double> w(L * L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    w[l * L + l] = 1.0;
    for (std::size_t h = l + 1; h < L; ++h) {
      double c = cosine_similarity(steering.vector_at(freq_index, l),
                                   steering.vector_at(freq_index, h));
      w[l * L + h] = c;
      w[h * L + l] = c;
    }
  }
  return IdealSpectrumMatrix(steering.frequencies()[freq_index], L, std::move(w));
}

IdealSpectrumMatrix build_ideal_spectrum(const SteeringSet& steering, double freq_hz) {
  return build_ideal_spectrum_at(steering, steering.frequency_index(freq_hz));
}

BandSimilarityMap band_similarity_map(const SteeringSet& steering, double reference_azimuth_deg) {
  const auto ref = steering.grid().index_of(reference_azimuth_deg);
  if (!ref) {
    throw std::invalid_argument("band_similarity_map: reference azimuth " +
                                std::to_string(reference_azimuth_deg) + " deg is not on the grid");
  }
  BandSimilarityMap map;
  map.frequencies_hz = steering.frequencies();
  map.azimuths_deg = steering.grid().azimuths();
  const std::size_t L = steering.grid().size();
  map.values.resize(map.frequencies_hz.size() * L);
  for (std::size_t fi = 0; fi < map.frequencies_hz.size(); ++fi) {
    std::span<const Complex> v_ref = steering.vector_at(fi, *ref);
    for (std::size_t l = 0; l < L; ++l) {
      map.values[fi * L + l] = cosine_similarity(v_ref, steering.vector_at(fi, l));
    }
  }
  return map;
}

}  // namespace lsdd
