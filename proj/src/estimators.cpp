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

#include "lsdd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lsdd {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kLsdd:
      return "LSDD";
    case Algorithm::kLsdde:
      return "LSDDe";
    case Algorithm::kDsdd:
      return "dSDD";
    case Algorithm::kDsdde:
      return "dSDDe";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "lsdd") return Algorithm::kLsdd;
  if (lower == "lsdde") return Algorithm::kLsdde;
  if (lower == "dsdd") return Algorithm::kDsdd;
  if (lower == "dsdde") return Algorithm::kDsdde;
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected lsdd, lsdde, dsdd or dsdde)");
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::kLsdd, Algorithm::kLsdde, Algorithm::kDsdd, Algorithm::kDsdde};
}

std::optional<DirectionalSpectrum> directional_spectrum(std::span<const Complex> x,
                                                        const SteeringSet& steering,
                                                        std::size_t freq_index,
                                                        SimilarityKind kind) {
  double energy = 0.0;
  for (const Complex& c : x) energy += std::norm(c);
  if (energy == 0.0) return std::nullopt;

  DirectionalSpectrum s;
  s.values.resize(steering.grid().size());
  for (std::size_t l = 0; l < s.values.size(); ++l) {
    s.values[l] = similarity(x, steering.vector_at(freq_index, l), kind);
  }
  return s;
}

std::vector<double> moving_average(const std::vector<double>& values, int radius) {
  if (radius < 0) throw std::invalid_argument("moving_average: radius must be >= 0");
  if (radius == 0) return values;
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - radius);
    const int hi = std::min(n - 1, i + radius);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += values[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<std::optional<DirectionalSpectrum>> smooth_spectra(
    const std::vector<std::optional<DirectionalSpectrum>>& per_bin, int radius) {
  if (radius < 0) throw std::invalid_argument("smooth_spectra: radius must be >= 0");
  if (radius == 0 || per_bin.empty()) return per_bin;

  const int n = static_cast<int>(per_bin.size());
  std::size_t L = 0;
  for (const auto& s : per_bin) {
    if (s) {
      L = s->values.size();
      break;
    }
  }
  std::vector<std::optional<DirectionalSpectrum>> out(per_bin.size());
  for (int i = 0; i < n; ++i) {
    if (!per_bin[i]) continue;  // invalid bins stay invalid
    DirectionalSpectrum smoothed;
    smoothed.smoothing_radius = radius;
    smoothed.values.assign(L, 0.0);
    int count = 0;
    for (int j = std::max(0, i - radius); j <= std::min(n - 1, i + radius); ++j) {
      if (!per_bin[j]) continue;
      for (std::size_t l = 0; l < L; ++l) smoothed.values[l] += per_bin[j]->values[l];
      ++count;
    }
    for (double& v : smoothed.values) v /= static_cast<double>(count);
    out[i] = std::move(smoothed);
  }
  return out;
}

PeakEstimate lsdd_estimate(std::span<const double> spectrum) {
  if (spectrum.empty()) throw std::invalid_argument("lsdd_estimate: empty spectrum");
  PeakEstimate best{0, spectrum[0]};
  for (std::size_t l = 1; l < spectrum.size(); ++l) {
    if (spectrum[l] > best.chi) {
      best.chi = spectrum[l];
      best.dir_index = l;
    }
  }
  return best;
}

double energy_weight(std::span<const Complex> x) {
  if (x.empty()) throw std::invalid_argument("energy_weight: empty snapshot");
  std::vector<double> energies(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) energies[m] = std::norm(x[m]);
  std::sort(energies.begin(), energies.end());
  const std::size_t m = energies.size();
  if (m % 2 == 1) return energies[m / 2];
  return 0.5 * (energies[m / 2 - 1] + energies[m / 2]);
}

PeakEstimate lsdde_estimate(std::span<const double> spectrum, std::span<const Complex> x) {
  PeakEstimate peak = lsdd_estimate(spectrum);
  peak.chi *= energy_weight(x);
  return peak;
}

PeakEstimate dsdd_estimate(std::span<const double> spectrum, const IdealSpectrumMatrix& w,
                           SimilarityKind kind) {
  if (spectrum.size() != w.size()) {
    throw std::invalid_argument("dsdd_estimate: spectrum length does not match W");
  }
  PeakEstimate best{0, -1.0};
  for (std::size_t h = 0; h < w.size(); ++h) {
    const double d = similarity(spectrum, w.column(h), kind);
    if (d > best.chi) {
      best.chi = d;
      best.dir_index = h;
    }
  }
  return best;
}

PeakEstimate dsdde_estimate(std::span<const double> spectrum, const IdealSpectrumMatrix& w,
                            std::span<const Complex> x, SimilarityKind kind) {
  PeakEstimate peak = dsdd_estimate(spectrum, w, kind);
  peak.chi *= energy_weight(x);
  return peak;
}

const std::vector<BinRecord>& AnalyzeResult::records_for(Algorithm algorithm) const {
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    if (algorithms[i] == algorithm) return records[i];
  }
  throw std::out_of_range("AnalyzeResult: algorithm " + to_string(algorithm) + " not present");
}

std::vector<double> band_bin_frequencies(const TFGrid& grid, double f_low_hz, double f_high_hz,
                                         int margin_bins) {
  if (!(f_low_hz < f_high_hz) || f_low_hz < 0.0) {
    throw std::invalid_argument("band_bin_frequencies: need 0 <= f_low < f_high");
  }
  const double width = grid.sample_rate_hz() / static_cast<double>(grid.window_size());
  const auto first_in_band =
      static_cast<long>(std::ceil(f_low_hz / width - 1e-9));
  const long last_in_band = static_cast<long>(grid.bin_below(f_high_hz));
  if (first_in_band > last_in_band) {
    throw std::invalid_argument("band_bin_frequencies: band contains no STFT bins");
  }
  const long lo = std::max<long>(0, first_in_band - margin_bins);
  const long hi = std::min<long>(static_cast<long>(grid.num_bins()) - 1,
                                 last_in_band + margin_bins);
  std::vector<double> freqs;
  for (long b = lo; b <= hi; ++b) freqs.push_back(grid.bin_frequency(static_cast<std::size_t>(b)));
  return freqs;
}

AnalyzeResult analyze(const TFGrid& grid, const SteeringSet& steering,
                      const AnalyzeOptions& options) {
  if (options.algorithms.empty()) throw std::invalid_argument("analyze: no algorithms requested");
  if (options.smoothing_radius < 0) {
    throw std::invalid_argument("analyze: smoothing_radius must be >= 0");
  }
  if (grid.num_channels() != steering.num_mics()) {
    throw std::invalid_argument("analyze: channel count " + std::to_string(grid.num_channels()) +
                                " does not match steering set with " +
                                std::to_string(steering.num_mics()) + " microphones");
  }

  // Bin range to compute: the band itself plus R margin bins per side, so
  // that in-band bins see full smoothing windows whenever the spectrum
  // allows it.
  const std::vector<double> needed =
      band_bin_frequencies(grid, options.f_low_hz, options.f_high_hz, options.smoothing_radius);
  std::vector<std::size_t> bins;          // TFGrid bin index per computed slot
  std::vector<std::size_t> freq_indices;  // steering index per computed slot
  bins.reserve(needed.size());
  for (double f : needed) {
    bins.push_back(grid.bin_below(f));
    freq_indices.push_back(steering.frequency_index(f));
  }

  const bool wants_dsdd =
      std::any_of(options.algorithms.begin(), options.algorithms.end(), [](Algorithm a) {
        return a == Algorithm::kDsdd || a == Algorithm::kDsdde;
      });
  std::vector<IdealSpectrumMatrix> w_matrices;
  if (wants_dsdd) {
    w_matrices.reserve(bins.size());
    for (std::size_t fi : freq_indices) w_matrices.push_back(build_ideal_spectrum_at(steering, fi));
  }

  AnalyzeResult result;
  result.algorithms = options.algorithms;
  result.records.resize(options.algorithms.size());

  // The peak estimators run on the spectrum of the selected kind; the
  // correlation estimators always consume the cosine spectrum (their input
  // must look like a W column, nonnegative and bounded) and apply the kind
  // to the column comparison instead. Both placements are monotone in the
  // underlying cosine, so the four DOA estimates stay kind-invariant.
  const bool needs_mapped = options.kind != SimilarityKind::kCosine;

  const DoaGrid& doa_grid = steering.grid();
  std::vector<std::optional<DirectionalSpectrum>> cos_spectra(bins.size());
  std::vector<std::optional<DirectionalSpectrum>> mapped_spectra(bins.size());
  std::vector<ComplexVector> snapshots(bins.size());

  for (std::size_t frame = 0; frame < grid.num_frames(); ++frame) {
    for (std::size_t i = 0; i < bins.size(); ++i) {
      snapshots[i] = grid.snapshot(frame, bins[i]);
      cos_spectra[i] =
          directional_spectrum(snapshots[i], steering, freq_indices[i], SimilarityKind::kCosine);
      if (needs_mapped) {
        mapped_spectra[i] = cos_spectra[i];
        if (mapped_spectra[i]) {
          for (double& v : mapped_spectra[i]->values) {
            v = similarity_from_cosine(v, options.kind);
          }
        }
      }
    }
    const auto& peak_input = needs_mapped ? mapped_spectra : cos_spectra;
    const auto smoothed_peak = options.smoothing_radius > 0
                                   ? smooth_spectra(peak_input, options.smoothing_radius)
                                   : peak_input;
    const auto smoothed_cos = options.smoothing_radius > 0
                                  ? smooth_spectra(cos_spectra, options.smoothing_radius)
                                  : cos_spectra;

    for (std::size_t i = 0; i < bins.size(); ++i) {
      const double f = grid.bin_frequency(bins[i]);
      if (f < options.f_low_hz - 1e-9 || f > options.f_high_hz + 1e-9) continue;  // margin bin
      if (!smoothed_cos[i]) continue;  // silent bin, no estimate
      const std::vector<double>& s_peak = smoothed_peak[i]->values;
      const std::vector<double>& s_cos = smoothed_cos[i]->values;
      const ComplexVector& x = snapshots[i];

      for (std::size_t a = 0; a < options.algorithms.size(); ++a) {
        PeakEstimate peak;
        switch (options.algorithms[a]) {
          case Algorithm::kLsdd:
            peak = lsdd_estimate(s_peak);
            break;
          case Algorithm::kLsdde:
            peak = lsdde_estimate(s_peak, x);
            break;
          case Algorithm::kDsdd:
            peak = dsdd_estimate(s_cos, w_matrices[i], options.kind);
            break;
          case Algorithm::kDsdde:
            peak = dsdde_estimate(s_cos, w_matrices[i], x, options.kind);
            break;
        }
        result.records[a].push_back(BinRecord{frame, bins[i], grid.frame_time(frame), f,
                                              doa_grid.azimuth(peak.dir_index), peak.chi});
      }
    }
  }
  return result;
}

AnalyzeResult analyze(const TFGrid& grid, const ArrayGeometry& geometry, const DoaGrid& doa_grid,
                      const AnalyzeOptions& options) {
  SteeringSet steering(
      geometry, doa_grid,
      band_bin_frequencies(grid, options.f_low_hz, options.f_high_hz, options.smoothing_radius));
  return analyze(grid, steering, options);
}

}  // namespace lsdd
