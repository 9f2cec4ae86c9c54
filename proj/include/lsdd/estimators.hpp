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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsdd/similarity.hpp"
#include "lsdd/steering.hpp"
#include "lsdd/stft.hpp"

namespace lsdd {

/// The four joint DOA/DPD estimators. The "e" variants weight the DPD
/// measure by the median per-microphone bin energy; their DOA estimates are
/// identical to the unweighted ones.
enum class Algorithm { kLsdd, kLsdde, kDsdd, kDsdde };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);
std::vector<Algorithm> all_algorithms();

/// Per-bin similarity of the observed snapshot to every grid direction,
/// optionally frequency smoothed.
struct DirectionalSpectrum {
  std::vector<double> values;
  int smoothing_radius = 0;

  bool smoothed() const { return smoothing_radius > 0; }
};

// S_l = d(x, v(f, theta_l)) over the whole grid. A zero snapshot carries no
// directional information; the bin is flagged invalid (nullopt) instead of
// raising.
std::optional<DirectionalSpectrum> directional_spectrum(std::span<const Complex> x,
                                                        const SteeringSet& steering,
                                                        std::size_t freq_index,
                                                        SimilarityKind kind);

// Moving average of length 2R+1 across consecutive frequency bins, per grid
// direction. At the ends of the bin range the window shrinks to the
// available bins and renormalizes by the actual count. Bins flagged invalid
// stay invalid and are skipped as neighbors.
std::vector<std::optional<DirectionalSpectrum>> smooth_spectra(
    const std::vector<std::optional<DirectionalSpectrum>>& per_bin, int radius);

// Direct smoothing of one direction's values across bins; the reference
// route used by smooth_spectra's tests.
std::vector<double> moving_average(const std::vector<double>& values, int radius);

/// argmax direction plus the DPD measure chi at that bin.
struct PeakEstimate {
  std::size_t dir_index = 0;
  double chi = 0.0;
};

// DOA = argmax_l S_l, chi = max_l S_l. Ties resolve to the lowest index.
PeakEstimate lsdd_estimate(std::span<const double> spectrum);

// Median of per-channel energies |x_m|^2; an even channel count takes the
// mean of the two middle values.
double energy_weight(std::span<const Complex> x);

// Same DOA as lsdd_estimate, chi additionally weighted by the bin energy.
PeakEstimate lsdde_estimate(std::span<const double> spectrum, std::span<const Complex> x);

// DOA = argmax_h d(S, W_h) over the ideal-spectrum columns, chi = that
// maximum. S and W are nonnegative real vectors; d defaults to cosine.
PeakEstimate dsdd_estimate(std::span<const double> spectrum, const IdealSpectrumMatrix& w,
                           SimilarityKind kind = SimilarityKind::kCosine);

PeakEstimate dsdde_estimate(std::span<const double> spectrum, const IdealSpectrumMatrix& w,
                            std::span<const Complex> x,
                            SimilarityKind kind = SimilarityKind::kCosine);

/// One per-bin DOA/DPD record, in the array-fixed frame.
struct BinRecord {
  std::size_t frame = 0;
  std::size_t bin = 0;
  double time_s = 0.0;
  double freq_hz = 0.0;
  double theta_deg = 0.0;
  double chi = 0.0;
};

struct AnalyzeOptions {
  std::vector<Algorithm> algorithms = all_algorithms();
  SimilarityKind kind = SimilarityKind::kCosine;
  int smoothing_radius = 0;  // R; the moving-average filter has 2R+1 taps
  double f_low_hz = 1100.0;
  double f_high_hz = 2000.0;
};

struct AnalyzeResult {
  std::vector<Algorithm> algorithms;
  std::vector<std::vector<BinRecord>> records;  // parallel to algorithms

  const std::vector<BinRecord>& records_for(Algorithm algorithm) const;
};

// Bin frequencies a steering set needs to cover for the given band plus
// margin_bins extra bins on each side (smoothing support).
std::vector<double> band_bin_frequencies(const TFGrid& grid, double f_low_hz, double f_high_hz,
                                         int margin_bins);

/// Runs the per-bin estimators over every in-band (frame, bin) of the grid.
/// The steering set must cover the band's bin frequencies plus
/// smoothing_radius margin bins; the geometry overload builds one.
AnalyzeResult analyze(const TFGrid& grid, const SteeringSet& steering,
                      const AnalyzeOptions& options);
AnalyzeResult analyze(const TFGrid& grid, const ArrayGeometry& geometry, const DoaGrid& doa_grid,
                      const AnalyzeOptions& options);

}  // namespace lsdd
