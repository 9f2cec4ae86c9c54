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

#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "lsdd/geometry.hpp"

namespace lsdd {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Free-field array response to a unit-amplitude horizontal plane wave
/// arriving from the given azimuth: element m is exp(-j*2*pi*f*tau_m) with
/// tau_m the far-field propagation delay at microphone m relative to the
/// array centroid. Every element has magnitude 1.
ComplexVector steering_vector(const ArrayGeometry& geometry, double freq_hz, double azimuth_deg);

/// Precomputed steering vectors for every (frequency, grid direction) pair.
/// Built free-field from a geometry, or loaded from a measured-response file.
class SteeringSet {
 public:
  SteeringSet(const ArrayGeometry& geometry, DoaGrid grid, std::vector<double> frequencies_hz);

  // Takes ownership of externally produced vectors, flat [freq][dir][mic].
  SteeringSet(DoaGrid grid, std::vector<double> frequencies_hz, std::size_t num_mics,
              ComplexVector vectors);

  static SteeringSet load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  std::size_t num_mics() const { return num_mics_; }
  const DoaGrid& grid() const { return grid_; }
  const std::vector<double>& frequencies() const { return frequencies_; }

  // Index of a frequency known to the set; throws std::out_of_range with a
  // message pointing at the missing precomputation otherwise.
  std::size_t frequency_index(double freq_hz) const;
  bool has_frequency(double freq_hz) const;

  std::span<const Complex> vector_at(std::size_t freq_index, std::size_t dir_index) const;

 private:
  void validate() const;

  DoaGrid grid_;
  std::vector<double> frequencies_;
  std::size_t num_mics_ = 0;
  ComplexVector vectors_;  // [freq][dir][mic]
};

/// Steering-vector self-similarity matrix at one frequency: entry (l,h) is
/// the cosine similarity between grid directions l and h. Symmetric with a
/// unit diagonal; the columns are the noiseless single-source directional
/// spectra the correlation estimators match against.
class IdealSpectrumMatrix {
 public:
  IdealSpectrumMatrix(double freq_hz, std::size_t size, std::vector<double> values);

  double freq_hz() const { return freq_hz_; }
  std::size_t size() const { return size_; }
  double at(std::size_t l, std::size_t h) const { return values_.at(l * size_ + h); }

  // Column h as a contiguous span (the matrix is symmetric, so row h equals
  // column h).
  std::span<const double> column(std::size_t h) const;

 private:
  double freq_hz_ = 0.0;
  std::size_t size_ = 0;
  std::vector<double> values_;  // row-major, size*size
};

IdealSpectrumMatrix build_ideal_spectrum(const SteeringSet& steering, double freq_hz);
IdealSpectrumMatrix build_ideal_spectrum_at(const SteeringSet& steering, std::size_t freq_index);

/// Similarity of one reference steering vector to the whole grid across
/// frequency; a diagnostic map of the usable operating band.
struct BandSimilarityMap {
  std::vector<double> frequencies_hz;
  std::vector<double> azimuths_deg;
  std::vector<double> values;  // row-major [frequency][azimuth]

  double at(std::size_t fi, std::size_t l) const { return values.at(fi * azimuths_deg.size() + l); }
};

// Reference azimuth must lie on the set's grid; off-grid values are an error.
BandSimilarityMap band_similarity_map(const SteeringSet& steering, double reference_azimuth_deg);

}  // namespace lsdd
