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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace lsdd {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& v);

// Wraps an angle in degrees into [0, 360).
double normalize_azimuth(double deg);

/// Microphone positions (meters, array-fixed frame) and the speed of sound.
/// Azimuth convention throughout: degrees counterclockwise from +x in the
/// horizontal (xy) plane, so 0 deg is straight ahead and 90 deg is to the left.
class ArrayGeometry {
 public:
  ArrayGeometry(std::vector<Vec3> mic_positions, double speed_of_sound_mps);

  static ArrayGeometry load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  std::size_t num_mics() const { return mics_.size(); }
  const std::vector<Vec3>& mics() const { return mics_; }
  double speed_of_sound() const { return speed_of_sound_; }

  // Centroid of the microphone positions; propagation delays are referenced
  // to this point.
  Vec3 centroid() const { return centroid_; }

 private:
  std::vector<Vec3> mics_;
  double speed_of_sound_ = 0.0;
  Vec3 centroid_;
};

/// Uniform azimuth search grid in degrees, strictly increasing in [0, 360).
class DoaGrid {
 public:
  explicit DoaGrid(std::vector<double> azimuths_deg);

  // The default grid: 0, spacing, 2*spacing, ... below 360.
  static DoaGrid uniform(double spacing_deg = 6.0);

  std::size_t size() const { return azimuths_.size(); }
  double azimuth(std::size_t l) const { return azimuths_.at(l); }
  const std::vector<double>& azimuths() const { return azimuths_; }
  double spacing() const { return spacing_; }

  // Grid index whose azimuth matches within tol, or nullopt if off-grid.
  std::optional<std::size_t> index_of(double azimuth_deg, double tol = 1e-9) const;

  // Index of the grid point circularly closest to the given azimuth.
  std::size_t nearest_index(double azimuth_deg) const;

 private:
  std::vector<double> azimuths_;
  double spacing_ = 0.0;
};

}  // namespace lsdd
