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

#include "lsdd/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsdd {

std::string to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::kCosine:
      return "cosine";
    case SimilarityKind::kInverseResidual:
      return "inverse_residual";
  }
  return "unknown";
}

SimilarityKind similarity_kind_from_string(const std::string& name) {
  if (name == "cosine") return SimilarityKind::kCosine;
  if (name == "inverse_residual") return SimilarityKind::kInverseResidual;
  throw std::invalid_argument("unknown similarity kind '" + name +
                              "' (expected cosine or inverse_residual)");
}

double cosine_similarity(std::span<const std::complex<double>> a,
                         std::span<const std::complex<double>> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: size mismatch");
  std::complex<double> inner(0.0, 0.0);
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inner += a[i] * std::conj(b[i]);
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine_similarity: zero vector");
  }
  double c = std::abs(inner) / std::sqrt(na * nb);
  // Rounding can push the ratio marginally outside [0,1].
  return std::clamp(c, 0.0, 1.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: size mismatch");
  double inner = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inner += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine_similarity: zero vector");
  }
  double c = std::abs(inner) / std::sqrt(na * nb);
  return std::clamp(c, 0.0, 1.0);
}

double similarity_from_cosine(double c, SimilarityKind kind) {
  if (kind == SimilarityKind::kCosine) return c;
  double residual_sq = 1.0 - c * c;
  if (residual_sq <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(residual_sq);
}

double similarity(std::span<const std::complex<double>> a,
                  std::span<const std::complex<double>> b, SimilarityKind kind) {
  return similarity_from_cosine(cosine_similarity(a, b), kind);
}

double similarity(std::span<const double> a, std::span<const double> b, SimilarityKind kind) {
  return similarity_from_cosine(cosine_similarity(a, b), kind);
}

}  // namespace lsdd
