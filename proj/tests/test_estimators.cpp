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

#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace lsdd;

namespace {

SteeringSet fixture_set(double freq_hz = 1500.0) {
  return SteeringSet(test::glasses_fixture(), DoaGrid::uniform(6.0), {freq_hz});
}

std::size_t circular_distance_steps(std::size_t a, std::size_t b, std::size_t modulus) {
  const std::size_t d = a > b ? a - b : b - a;
  return std::min(d, modulus - d);
}

}  // namespace

TEST_CASE("directional spectrum of a pure steering vector peaks at 1") {
  SteeringSet set = fixture_set();
  const std::size_t l_star = 12;
  ComplexVector x(set.vector_at(0, l_star).begin(), set.vector_at(0, l_star).end());
  const auto s = directional_spectrum(x, set, 0, SimilarityKind::kCosine);
  REQUIRE(s.has_value());
  CHECK(s->values[l_star] == doctest::Approx(1.0).epsilon(1e-12));
  const PeakEstimate peak = lsdd_estimate(s->values);
  CHECK(peak.dir_index == l_star);
  for (double v : s->values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("zero-frequency snapshot is directionless") {
  SteeringSet set(test::glasses_fixture(), DoaGrid::uniform(6.0), {0.0});
  ComplexVector ones(set.num_mics(), Complex(1.0, 0.0));
  const auto s = directional_spectrum(ones, set, 0, SimilarityKind::kCosine);
  REQUIRE(s.has_value());
  for (double v : s->values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("silent bins are flagged invalid") {
  SteeringSet set = fixture_set();
  ComplexVector zero(set.num_mics(), Complex(0.0, 0.0));
  CHECK_FALSE(directional_spectrum(zero, set, 0, SimilarityKind::kCosine).has_value());
}

TEST_CASE("two-wave bin matches an exhaustive evaluation and peaks at the stronger wave") {
  SteeringSet set = fixture_set(1500.0);
  const DoaGrid& grid = set.grid();

  // A coherent interferer at 0.3 gain can tilt the peak by at most one grid
  // step on this array; at 72/162 degrees the recovery is exact.
  for (std::size_t la = 0; la < grid.size(); ++la) {
    const std::size_t lb = (la + 15) % grid.size();  // 90 degrees apart
    ComplexVector x(set.num_mics());
    for (std::size_t m = 0; m < x.size(); ++m) {
      x[m] = set.vector_at(0, la)[m] + 0.3 * set.vector_at(0, lb)[m];
    }
    const auto s = directional_spectrum(x, set, 0, SimilarityKind::kCosine);
    REQUIRE(s.has_value());

    // Independent exhaustive route over the grid.
    std::size_t oracle_argmax = 0;
    double oracle_best = -1.0;
    for (std::size_t l = 0; l < grid.size(); ++l) {
      ComplexVector v(set.vector_at(0, l).begin(), set.vector_at(0, l).end());
      const double c = test::oracle_cosine(x, v);
      CHECK(std::abs(c - s->values[l]) <= 1e-9 * std::max(1.0, c));
      if (c > oracle_best) {
        oracle_best = c;
        oracle_argmax = l;
      }
    }
    const PeakEstimate peak = lsdd_estimate(s->values);
    CHECK(peak.dir_index == oracle_argmax);
    CHECK(circular_distance_steps(peak.dir_index, la, grid.size()) <= 1);
    if (grid.azimuth(la) == 72.0) CHECK(peak.dir_index == la);
  }
}

TEST_CASE("smoothing basics") {
  DirectionalSpectrum a{{0.2, 0.2}, 0};
  DirectionalSpectrum b{{0.5, 0.5}, 0};
  DirectionalSpectrum c{{0.8, 0.8}, 0};
  std::vector<std::optional<DirectionalSpectrum>> bins = {a, b, c};

  SUBCASE("radius zero is the identity") {
    const auto out = smooth_spectra(bins, 0);
    CHECK(out[1]->values[0] == 0.5);
    CHECK(out[1]->smoothing_radius == 0);
  }
  SUBCASE("interior bin becomes the mean") {
    const auto out = smooth_spectra(bins, 1);
    CHECK(out[1]->values[0] == doctest::Approx(0.5));
    CHECK(out[1]->smoothing_radius == 1);
    // edges shrink to the available bins and renormalize
    CHECK(out[0]->values[0] == doctest::Approx((0.2 + 0.5) / 2.0));
    CHECK(out[2]->values[0] == doctest::Approx((0.5 + 0.8) / 2.0));
  }
  SUBCASE("constant spectra are unchanged for any radius") {
    std::vector<std::optional<DirectionalSpectrum>> flat(
        7, DirectionalSpectrum{{0.4, 0.4}, 0});
    for (int radius : {1, 2, 4}) {
      const auto out = smooth_spectra(flat, radius);
      for (const auto& s : out) CHECK(s->values[0] == doctest::Approx(0.4));
    }
  }
  SUBCASE("invalid bins stay invalid and are skipped as neighbors") {
    bins[1] = std::nullopt;
    const auto out = smooth_spectra(bins, 1);
    CHECK_FALSE(out[1].has_value());
    CHECK(out[0]->values[0] == doctest::Approx(0.2));
    CHECK(out[2]->values[0] == doctest::Approx(0.8));
  }
}

TEST_CASE("smoothing matches the direct windowed mean") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> len(1, 24), rad(0, 5);
    const int n = len(rng);
    const int radius = rad(rng);
    std::vector<double> values = test::random_positive_vector(rng, n);

    std::vector<std::optional<DirectionalSpectrum>> bins;
    for (double v : values) bins.push_back(DirectionalSpectrum{{v}, 0});
    const auto smoothed = smooth_spectra(bins, radius);
    const std::vector<double> reference = moving_average(values, radius);
    for (int i = 0; i < n; ++i) {
      CHECK(smoothed[i]->values[0] == doctest::Approx(reference[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("lsdd argmax with tie break at the lowest index") {
  CHECK(lsdd_estimate(std::vector<double>{0.2, 0.9, 0.4}).dir_index == 1);
  CHECK(lsdd_estimate(std::vector<double>{0.5, 0.5, 0.5}).dir_index == 0);
  CHECK(lsdd_estimate(std::vector<double>{0.1, 0.7, 0.7}).dir_index == 1);
}

TEST_CASE("energy weight is the median per-mic energy") {
  ComplexVector zero(4, Complex(0.0, 0.0));
  CHECK(energy_weight(zero) == 0.0);

  ComplexVector odd = {{1, 0}, {2, 0}, {3, 0}};  // energies 1, 4, 9
  CHECK(energy_weight(odd) == doctest::Approx(4.0));

  ComplexVector even(6);
  for (int m = 0; m < 6; ++m) even[m] = Complex(std::sqrt(m + 1.0), 0.0);  // energies 1..6
  CHECK(energy_weight(even) == doctest::Approx(3.5));
}

TEST_CASE("lsdde weights chi but keeps the estimate") {
  std::mt19937_64 rng(7);
  const std::vector<double> spectrum = test::random_positive_vector(rng, 60);

  ComplexVector unit(5);
  for (auto& c : unit) c = Complex(1.0, 0.0);  // median energy 1
  const PeakEstimate plain = lsdd_estimate(spectrum);
  const PeakEstimate weighted = lsdde_estimate(spectrum, unit);
  CHECK(weighted.dir_index == plain.dir_index);
  CHECK(weighted.chi == doctest::Approx(plain.chi));

  ComplexVector x = test::random_complex_vector(rng, 5);
  ComplexVector doubled(x);
  for (auto& c : doubled) c *= 2.0;
  const PeakEstimate base = lsdde_estimate(spectrum, x);
  const PeakEstimate scaled = lsdde_estimate(spectrum, doubled);
  CHECK(scaled.dir_index == base.dir_index);
  CHECK(scaled.chi == doctest::Approx(4.0 * base.chi));
}

TEST_CASE("lsdde equals the direct elementwise-product form") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> spectrum = test::random_positive_vector(rng, 60);
    const ComplexVector x = test::random_complex_vector(rng, 6);

    // max_l of S_l * MED[...] computed literally.
    std::vector<double> energies;
    for (const Complex& c : x) energies.push_back(std::norm(c));
    std::sort(energies.begin(), energies.end());
    const double med = 0.5 * (energies[2] + energies[3]);
    double direct = -1.0;
    for (double s : spectrum) direct = std::max(direct, s * med);

    const PeakEstimate peak = lsdde_estimate(spectrum, x);
    CHECK(peak.chi == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("dsdd recovers a column of W exactly") {
  SteeringSet set = fixture_set();
  IdealSpectrumMatrix w = build_ideal_spectrum(set, 1500.0);
  const std::size_t h_star = 23;
  std::vector<double> s(w.column(h_star).begin(), w.column(h_star).end());
  const PeakEstimate peak = dsdd_estimate(s, w);
  CHECK(peak.dir_index == h_star);
  CHECK(peak.chi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dsdd equals lsdd for a noiseless grid-direction plane wave") {
  SteeringSet set = fixture_set();
  IdealSpectrumMatrix w = build_ideal_spectrum(set, 1500.0);
  for (std::size_t l_star = 0; l_star < set.grid().size(); ++l_star) {
    ComplexVector x(set.vector_at(0, l_star).begin(), set.vector_at(0, l_star).end());
    const auto s = directional_spectrum(x, set, 0, SimilarityKind::kCosine);
    REQUIRE(s.has_value());
    const PeakEstimate lsdd = lsdd_estimate(s->values);
    const PeakEstimate dsdd = dsdd_estimate(s->values, w);
    CHECK(lsdd.dir_index == l_star);
    CHECK(dsdd.dir_index == l_star);
  }
}

TEST_CASE("dsdd matches the exhaustive column-by-column evaluation") {
  SteeringSet set = fixture_set();
  IdealSpectrumMatrix w = build_ideal_spectrum(set, 1500.0);
  const DoaGrid& grid = set.grid();
  const std::size_t la = grid.index_of(48.0).value();
  const std::size_t lb = grid.index_of(138.0).value();
  ComplexVector x(set.num_mics());
  for (std::size_t m = 0; m < x.size(); ++m) {
    x[m] = set.vector_at(0, la)[m] + 0.3 * set.vector_at(0, lb)[m];
  }
  const auto s = directional_spectrum(x, set, 0, SimilarityKind::kCosine);
  REQUIRE(s.has_value());

  double best = -1.0;
  std::size_t best_h = 0;
  double norm_s = 0.0;
  for (double v : s->values) norm_s += v * v;
  norm_s = std::sqrt(norm_s);
  for (std::size_t h = 0; h < grid.size(); ++h) {
    double inner = 0.0, norm_w = 0.0;
    for (std::size_t l = 0; l < grid.size(); ++l) {
      inner += s->values[l] * w.at(l, h);
      norm_w += w.at(l, h) * w.at(l, h);
    }
    const double c = inner / (norm_s * std::sqrt(norm_w));
    if (c > best) {
      best = c;
      best_h = h;
    }
  }
  const PeakEstimate peak = dsdd_estimate(s->values, w);
  CHECK(peak.dir_index == best_h);
  CHECK(peak.chi == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("dsdde weights the dsdd measure") {
  SteeringSet set = fixture_set();
  IdealSpectrumMatrix w = build_ideal_spectrum(set, 1500.0);
  std::mt19937_64 rng(77);
  const std::vector<double> s = test::random_positive_vector(rng, 60);
  const ComplexVector x = test::random_complex_vector(rng, 6);

  const PeakEstimate plain = dsdd_estimate(s, w);
  const PeakEstimate weighted = dsdde_estimate(s, w, x);
  CHECK(weighted.dir_index == plain.dir_index);
  CHECK(weighted.chi == doctest::Approx(plain.chi * energy_weight(x)).epsilon(1e-12));

  ComplexVector scaled(x);
  for (auto& c : scaled) c *= 3.0;
  const PeakEstimate scaled_est = dsdde_estimate(s, w, scaled);
  CHECK(scaled_est.dir_index == plain.dir_index);
  CHECK(scaled_est.chi == doctest::Approx(9.0 * weighted.chi).epsilon(1e-12));
}

TEST_CASE("argmax invariances across weighting and similarity kind") {
  SteeringSet set = fixture_set();
  IdealSpectrumMatrix w = build_ideal_spectrum(set, 1500.0);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const ComplexVector x = test::random_complex_vector(rng, 6);
    const auto cos_s = directional_spectrum(x, set, 0, SimilarityKind::kCosine);
    const auto res_s = directional_spectrum(x, set, 0, SimilarityKind::kInverseResidual);
    REQUIRE(cos_s.has_value());
    REQUIRE(res_s.has_value());

    // LSDD vs LSDDe, dSDD vs dSDDe
    CHECK(lsdd_estimate(cos_s->values).dir_index ==
          lsdde_estimate(cos_s->values, x).dir_index);
    CHECK(dsdd_estimate(cos_s->values, w).dir_index ==
          dsdde_estimate(cos_s->values, w, x).dir_index);
    // cosine vs inverse residual (both monotone in the underlying cosine)
    CHECK(lsdd_estimate(cos_s->values).dir_index == lsdd_estimate(res_s->values).dir_index);
  }
}

TEST_CASE("scale invariance of the estimates") {
  SteeringSet set = fixture_set();
  IdealSpectrumMatrix w = build_ideal_spectrum(set, 1500.0);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> mag(0.2, 4.0), phase(0.0, 6.28);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexVector x = test::random_complex_vector(rng, 6);
    ComplexVector y(x);
    const Complex lambda = std::polar(mag(rng), phase(rng));
    for (auto& c : y) c *= lambda;

    const auto sx = directional_spectrum(x, set, 0, SimilarityKind::kCosine);
    const auto sy = directional_spectrum(y, set, 0, SimilarityKind::kCosine);
    REQUIRE(sx.has_value());
    REQUIRE(sy.has_value());
    CHECK(lsdd_estimate(sx->values).dir_index == lsdd_estimate(sy->values).dir_index);
    CHECK(lsdd_estimate(sx->values).chi ==
          doctest::Approx(lsdd_estimate(sy->values).chi).epsilon(1e-9));
    CHECK(dsdd_estimate(sx->values, w).dir_index == dsdd_estimate(sy->values, w).dir_index);
    CHECK(dsdd_estimate(sx->values, w).chi ==
          doctest::Approx(dsdd_estimate(sy->values, w).chi).epsilon(1e-9));
    CHECK(lsdde_estimate(sx->values, x).dir_index == lsdde_estimate(sy->values, y).dir_index);
    CHECK(dsdde_estimate(sx->values, w, x).dir_index ==
          dsdde_estimate(sy->values, w, y).dir_index);
  }
}

TEST_CASE("algorithm name round trip") {
  for (Algorithm a : all_algorithms()) CHECK(algorithm_from_string(to_string(a)) == a);
  CHECK(algorithm_from_string("dsdde") == Algorithm::kDsdde);
  CHECK_THROWS_AS(algorithm_from_string("music"), std::invalid_argument);
}

TEST_CASE("analyze validates channel count and band") {
  ArrayGeometry geom = test::glasses_fixture();
  MultichannelAudio audio;
  audio.sample_rate_hz = 48000.0;
  audio.channels.assign(2, std::vector<double>(4096, 0.1));  // 2 != 6 mics
  TFGrid grid = stft(audio);
  AnalyzeOptions options;
  CHECK_THROWS_AS(analyze(grid, geom, DoaGrid::uniform(6.0), options), std::invalid_argument);

  AnalyzeOptions bad_band;
  bad_band.f_low_hz = 2000.0;
  bad_band.f_high_hz = 1100.0;
  audio.channels.assign(6, std::vector<double>(4096, 0.1));
  TFGrid grid6 = stft(audio);
  CHECK_THROWS_AS(analyze(grid6, geom, DoaGrid::uniform(6.0), bad_band), std::invalid_argument);
}

TEST_CASE("analyze emits one in-band record per algorithm per live bin") {
  ArrayGeometry geom = test::glasses_fixture();
  std::mt19937_64 rng(3);
  MultichannelAudio audio;
  audio.sample_rate_hz = 48000.0;
  std::normal_distribution<double> normal(0.0, 0.2);
  audio.channels.assign(6, std::vector<double>(3 * 1024));
  for (auto& ch : audio.channels) {
    for (double& v : ch) v = normal(rng);
  }
  TFGrid grid = stft(audio);

  AnalyzeOptions options;
  options.algorithms = {Algorithm::kLsdd, Algorithm::kLsdde};
  const AnalyzeResult result = analyze(grid, geom, DoaGrid::uniform(6.0), options);
  REQUIRE(result.algorithms.size() == 2);

  const std::size_t in_band_bins = 42 - 24 + 1;  // 1100..2000 Hz at 46.875 Hz spacing
  CHECK(result.records_for(Algorithm::kLsdd).size() == grid.num_frames() * in_band_bins);

  // The estimate column matches, only chi differs by the energy weight.
  const auto& lsdd = result.records_for(Algorithm::kLsdd);
  const auto& lsdde = result.records_for(Algorithm::kLsdde);
  REQUIRE(lsdd.size() == lsdde.size());
  for (std::size_t i = 0; i < lsdd.size(); ++i) {
    CHECK(lsdd[i].theta_deg == lsdde[i].theta_deg);
    CHECK(lsdd[i].freq_hz >= 1100.0);
    CHECK(lsdd[i].freq_hz <= 2000.0);
  }
}
