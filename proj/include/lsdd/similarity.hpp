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
#include <span>
#include <string>

namespace lsdd {

/// The two vector similarity measures the estimators can run on:
///   kCosine          |<a,b>| / (||a|| ||b||), in [0,1]
///   kInverseResidual reciprocal of the scale-minimized normalized residual
///                    min_beta ||a - beta*b|| / ||a||, in [1, inf)
enum class SimilarityKind { kCosine, kInverseResidual };

std::string to_string(SimilarityKind kind);
SimilarityKind similarity_kind_from_string(const std::string& name);

// Cosine similarity magnitude, clamped into [0,1]. Both vectors must be
// nonzero and of equal length.
double cosine_similarity(std::span<const std::complex<double>> a,
                         std::span<const std::complex<double>> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Maps a cosine value onto the requested measure. The least-squares optimum
// beta = <a,b>/||b||^2 leaves residual ||a||*sqrt(1-c^2), so the inverse
// residual is 1/sqrt(1-c^2); c == 1 yields +infinity, the documented
// sentinel for an exact match.
double similarity_from_cosine(double c, SimilarityKind kind);

double similarity(std::span<const std::complex<double>> a,
                  std::span<const std::complex<double>> b, SimilarityKind kind);
double similarity(std::span<const double> a, std::span<const double> b, SimilarityKind kind);

}  // namespace lsdd
