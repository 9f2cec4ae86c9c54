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

#include "lsdd/geometry.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace lsdd {

namespace {
constexpr const char* kGeometryFormat = "lsdd-geometry-v1";
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

double normalize_azimuth(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a < 0.0) a += 360.0;
  // fmod can return 360.0 after the correction when deg is a tiny negative.
  if (a >= 360.0) a -= 360.0;
  return a;
}

ArrayGeometry::ArrayGeometry(std::vector<Vec3> mic_positions, double speed_of_sound_mps)
    : mics_(std::move(mic_positions)), speed_of_sound_(speed_of_sound_mps) {
  if (mics_.size() < 2) {
    throw std::invalid_argument("ArrayGeometry: need at least 2 microphones, got " +
                                std::to_string(mics_.size()));
  }
  if (!(speed_of_sound_ > 0.0)) {
    throw std::invalid_argument("ArrayGeometry: speed_of_sound must be > 0");
  }
  for (std::size_t i = 0; i < mics_.size(); ++i) {
    for (std::size_t j = i + 1; j < mics_.size(); ++j) {
      if (norm(mics_[i] - mics_[j]) < 1e-9) {
        throw std::invalid_argument("ArrayGeometry: microphones " + std::to_string(i) + " and " +
                                    std::to_string(j) + " are coincident");
      }
    }
  }
  Vec3 c;
  for (const Vec3& m : mics_) c = c + m;
  centroid_ = (1.0 / static_cast<double>(mics_.size())) * c;
}

ArrayGeometry ArrayGeometry::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open geometry file: " + file.string());
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != kGeometryFormat) {
    throw std::runtime_error("geometry file " + file.string() + ": expected format '" +
                             kGeometryFormat + "'");
  }
  std::vector<Vec3> mics;
  for (const auto& p : j.at("mic_positions_m")) {
    if (!p.is_array() || p.size() != 3) {
      throw std::runtime_error("geometry file " + file.string() +
                               ": mic_positions_m entries must be [x,y,z] triples");
    }
    mics.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  return ArrayGeometry(std::move(mics), j.at("speed_of_sound_mps").get<double>());
}

void ArrayGeometry::save(const std::filesystem::path& file) const {
  nlohmann::json j;
  j["format"] = kGeometryFormat;
  j["speed_of_sound_mps"] = speed_of_sound_;
  auto& arr = j["mic_positions_m"] = nlohmann::json::array();
  for (const Vec3& m : mics_) arr.push_back({m.x, m.y, m.z});
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write geometry file: " + file.string());
  out << j.dump(2) << "\n";
}

DoaGrid::DoaGrid(std::vector<double> azimuths_deg) : azimuths_(std::move(azimuths_deg)) {
  if (azimuths_.size() < 2) {
    throw std::invalid_argument("DoaGrid: need at least 2 grid directions");
  }
  spacing_ = azimuths_[1] - azimuths_[0];
  for (std::size_t l = 0; l < azimuths_.size(); ++l) {
    if (azimuths_[l] < 0.0 || azimuths_[l] >= 360.0) {
      throw std::invalid_argument("DoaGrid: azimuths must lie in [0, 360)");
    }
    if (l > 0) {
      double step = azimuths_[l] - azimuths_[l - 1];
      if (step <= 0.0) throw std::invalid_argument("DoaGrid: azimuths must be strictly increasing");
      if (std::abs(step - spacing_) > 1e-9) {
        throw std::invalid_argument("DoaGrid: azimuths must be uniformly spaced");
      }
    }
  }
}

DoaGrid DoaGrid::uniform(double spacing_deg) {
  if (!(spacing_deg > 0.0) || spacing_deg > 180.0) {
    throw std::invalid_argument("DoaGrid: spacing must be in (0, 180]");
  }
  std::vector<double> az;
  for (double a = 0.0; a < 360.0 - 1e-9; a += spacing_deg) az.push_back(a);
  return DoaGrid(std::move(az));
}

std::optional<std::size_t> DoaGrid::index_of(double azimuth_deg, double tol) const {
  double a = normalize_azimuth(azimuth_deg);
  for (std::size_t l = 0; l < azimuths_.size(); ++l) {
    double diff = std::abs(azimuths_[l] - a);
    if (std::min(diff, 360.0 - diff) <= tol) return l;
  }
  return std::nullopt;
}

std::size_t DoaGrid::nearest_index(double azimuth_deg) const {
  double a = normalize_azimuth(azimuth_deg);
  std::size_t best = 0;
  double best_diff = 360.0;
  for (std::size_t l = 0; l < azimuths_.size(); ++l) {
    double diff = std::abs(azimuths_[l] - a);
    diff = std::min(diff, 360.0 - diff);
    if (diff < best_diff) {
      best_diff = diff;
      best = l;
    }
  }
  return best;
}

}  // namespace lsdd
