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
#include <random>
#include <vector>

#include "lsdd/geometry.hpp"
#include "lsdd/steering.hpp"

namespace lsdd::test {

inline std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(LSDD_DATA_DIR) / relative;
}

inline ArrayGeometry glasses_fixture() {
  return ArrayGeometry::load(data_path("geometry/glasses6.json"));
}

inline ComplexVector random_complex_vector(std::mt19937_64& rng, std::size_t size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(size);
  for (auto& c : v) c = {normal(rng), normal(rng)};
  return v;
}

inline std::vector<double> random_positive_vector(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> v(size);
  for (auto& x : v) x = uniform(rng);
  return v;
}

// Straightforward reimplementation of the cosine measure, kept separate from
// the library path on purpose.
inline double oracle_cosine(const ComplexVector& a, const ComplexVector& b) {
  std::complex<double> inner(0.0, 0.0);
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inner += a[i] * std::conj(b[i]);
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  return std::abs(inner) / std::sqrt(na * nb);
}

}  // namespace lsdd::test
