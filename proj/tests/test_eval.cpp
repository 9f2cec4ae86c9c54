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

#include "lsdd/eval.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace lsdd;

namespace {

// A synthetic run: frames every 10 ms, bins at a few in-band frequencies.
struct SyntheticRun {
  std::vector<BinRecord> estimates;
  GroundTruth truth;
};

SyntheticRun make_run(unsigned seed, std::size_t num_frames = 60, bool vad_everywhere = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 360.0);
  std::uniform_real_distribution<double> chi(0.0, 1.0);
  std::bernoulli_distribution vad_coin(0.8);

  SyntheticRun run;
  const std::vector<double> freqs = {1125.0, 1500.0, 1875.0};
  for (std::size_t k = 0; k < num_frames; ++k) {
    TruthFrame frame;
    frame.frame_time_s = 0.01 + 0.01 * static_cast<double>(k);
    frame.array_yaw_deg = 0.0;
    frame.vad = vad_everywhere || vad_coin(rng);
    frame.speakers = {{0, angle(rng)}};
    run.truth.frames.push_back(frame);
    for (std::size_t b = 0; b < freqs.size(); ++b) {
      BinRecord rec;
      rec.frame = k;
      rec.bin = 24 + b;
      rec.time_s = frame.frame_time_s;
      rec.freq_hz = freqs[b];
      rec.theta_deg = 6.0 * static_cast<double>(rng() % 60);
      rec.chi = chi(rng);
      run.estimates.push_back(rec);
    }
  }
  return run;
}

}  // namespace

TEST_CASE("room frame transform") {
  CHECK(to_room_frame(123.0, 0.0) == doctest::Approx(123.0));
  CHECK(to_room_frame(350.0, 20.0) == doctest::Approx(10.0));
  CHECK(to_room_frame(0.0, -90.0) == doctest::Approx(270.0));
}

TEST_CASE("circular error") {
  CHECK(circular_error(90.0, 90.0) == 0.0);
  CHECK(circular_error(2.0, 358.0) == doctest::Approx(4.0));
  CHECK(circular_error(0.0, 180.0) == doctest::Approx(180.0));
  CHECK(circular_error(-10.0, 10.0) == doctest::Approx(20.0));
}

TEST_CASE("percentile threshold") {
  SUBCASE("p = 100 keeps everything") {
    const std::vector<double> chis = {0.3, 0.9, 0.1, 0.5};
    CHECK(percentile_threshold(chis, 100.0) == doctest::Approx(0.1));
  }
  SUBCASE("top 10 percent of 1..100") {
    std::vector<double> chis;
    for (int i = 1; i <= 100; ++i) chis.push_back(i);
    const double lambda = percentile_threshold(chis, 10.0);
    CHECK(lambda == doctest::Approx(91.0));
    CHECK(std::count_if(chis.begin(), chis.end(), [&](double c) { return c >= lambda; }) == 10);
  }
  SUBCASE("ties at lambda all pass") {
    const std::vector<double> chis(25, 0.7);
    const double lambda = percentile_threshold(chis, 1.0);
    CHECK(lambda == doctest::Approx(0.7));
    CHECK(std::count_if(chis.begin(), chis.end(), [&](double c) { return c >= lambda; }) == 25);
  }
  SUBCASE("matches a full-sort oracle") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    std::uniform_real_distribution<double> pct(0.01, 100.0);
    std::uniform_int_distribution<int> count(1, 400);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = count(rng);
      std::vector<double> chis(n);
      for (double& c : chis) c = value(rng);
      const double p = pct(rng);

      std::vector<double> sorted(chis);
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      auto k = static_cast<std::size_t>(
          std::ceil(p * static_cast<double>(n) / 100.0 - 1e-9));
      k = std::clamp<std::size_t>(k, 1, sorted.size());
      CHECK(percentile_threshold(chis, p) == sorted[k - 1]);
    }
  }
  SUBCASE("rejects bad input") {
    CHECK_THROWS_AS(percentile_threshold({}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(percentile_threshold({1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(percentile_threshold({1.0}, 101.0), std::invalid_argument);
  }
}

TEST_CASE("nearest truth error") {
  TruthFrame frame;
  frame.speakers = {{0, 10.0}};
  CHECK(nearest_truth_error(15.0, frame) == doctest::Approx(5.0));

  frame.speakers = {{0, 10.0}, {1, 200.0}};
  CHECK(nearest_truth_error(15.0, frame) == doctest::Approx(5.0));
  CHECK(nearest_truth_error(190.0, frame) == doctest::Approx(10.0));

  frame.speakers.clear();
  CHECK_THROWS_AS(nearest_truth_error(0.0, frame), std::invalid_argument);
}

TEST_CASE("select_valid_bins") {
  SUBCASE("all-false VAD yields nothing") {
    SyntheticRun run = make_run(5);
    for (auto& frame : run.truth.frames) frame.vad = false;
    EvalConfig config;
    config.delta_t_s = 0.2;
    CHECK(select_valid_bins(run.estimates, run.truth, config, 0.1).empty());
  }
  SUBCASE("p = 100 with VAD true keeps every in-band bin in the block") {
    SyntheticRun run = make_run(6);
    EvalConfig config;
    config.delta_t_s = 0.2;
    config.percentile_p = 100.0;
    const auto valid = select_valid_bins(run.estimates, run.truth, config, 0.1);
    std::size_t expected = 0;
    for (const BinRecord& rec : run.estimates) {
      if (rec.time_s >= 0.0 && rec.time_s < 0.2) ++expected;
    }
    CHECK(valid.size() == expected);
  }
  SUBCASE("matches a brute-force filter") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> pct(1.0, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
      SyntheticRun run = make_run(100 + trial, 40, false);
      EvalConfig config;
      config.delta_t_s = 0.15;
      config.percentile_p = pct(rng);
      const double center = 0.15 * 1.5;

      const auto valid = select_valid_bins(run.estimates, run.truth, config, center);

      // Independent route: filter, sort, cut.
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i < run.estimates.size(); ++i) {
        const BinRecord& rec = run.estimates[i];
        if (rec.time_s < center - 0.075 || rec.time_s >= center + 0.075) continue;
        if (rec.freq_hz < config.f_low_hz || rec.freq_hz > config.f_high_hz) continue;
        const auto& frame = run.truth.frames[rec.frame];
        if (!frame.vad || frame.speakers.empty()) continue;
        candidates.push_back(i);
      }
      std::vector<std::size_t> expected;
      if (!candidates.empty()) {
        std::vector<double> chis;
        for (std::size_t i : candidates) chis.push_back(run.estimates[i].chi);
        std::vector<double> sorted(chis);
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        auto k = static_cast<std::size_t>(std::ceil(
            config.percentile_p * static_cast<double>(chis.size()) / 100.0 - 1e-9));
        k = std::clamp<std::size_t>(k, 1, sorted.size());
        const double lambda = sorted[k - 1];
        for (std::size_t i : candidates) {
          if (run.estimates[i].chi >= lambda) expected.push_back(i);
        }
      }
      CHECK(valid == expected);
    }
  }
}

TEST_CASE("evaluate_run on a perfect run") {
  SyntheticRun run = make_run(9);
  for (BinRecord& rec : run.estimates) {
    rec.theta_deg = run.truth.frames[rec.frame].speakers[0].azimuth_deg_room;
  }
  EvalConfig config;
  config.delta_t_s = 0.2;
  config.percentile_p = 50.0;
  const RunReport report = evaluate_run(run.estimates, run.truth, config);
  REQUIRE(report.has_data);
  CHECK(report.e_bar_deg == doctest::Approx(0.0));
  CHECK(report.h_bar_ratio == doctest::Approx(1.0));
}

TEST_CASE("evaluate_run single-block arithmetic") {
  GroundTruth truth;
  TruthFrame frame;
  frame.frame_time_s = 0.05;
  frame.vad = true;
  frame.speakers = {{0, 0.0}};
  truth.frames.push_back(frame);

  std::vector<BinRecord> estimates(2);
  estimates[0] = {0, 24, 0.05, 1500.0, 5.0, 0.9};   // error 5
  estimates[1] = {0, 25, 0.05, 1600.0, 345.0, 0.8}; // error 15
  EvalConfig config;
  config.delta_t_s = 0.2;
  config.percentile_p = 100.0;
  const RunReport report = evaluate_run(estimates, truth, config);
  REQUIRE(report.has_data);
  REQUIRE(report.blocks.size() == 1);
  CHECK(report.blocks[0].valid_bin_count == 2);
  CHECK(report.e_bar_deg == doctest::Approx(10.0));
  CHECK(report.h_bar_ratio == doctest::Approx(0.5));
}

TEST_CASE("evaluate_run reports no valid data when nothing passes") {
  SyntheticRun run = make_run(10);
  for (auto& frame : run.truth.frames) frame.vad = false;
  EvalConfig config;
  const RunReport report = evaluate_run(run.estimates, run.truth, config);
  CHECK_FALSE(report.has_data);
  CHECK(report.blocks.empty());
  CHECK(evaluate_run({}, run.truth, config).has_data == false);
}

TEST_CASE("harness invariants over randomized runs") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pct(0.5, 100.0);
  std::uniform_real_distribution<double> dt(0.05, 0.7);
  for (int trial = 0; trial < 60; ++trial) {
    SyntheticRun run = make_run(1000 + trial, 80, false);
    EvalConfig config;
    config.delta_t_s = dt(rng);
    config.percentile_p = pct(rng);
    const RunReport report = evaluate_run(run.estimates, run.truth, config);
    if (!report.has_data) continue;
    CHECK(report.e_bar_deg >= 0.0);
    CHECK(report.e_bar_deg <= 180.0);
    CHECK(report.h_bar_ratio >= 0.0);
    CHECK(report.h_bar_ratio <= 1.0);
    for (const BlockReport& block : report.blocks) {
      CHECK(block.valid_bin_count > 0);
      CHECK(block.hit_ratio >= 0.0);
      CHECK(block.hit_ratio <= 1.0);
    }
  }
}

TEST_CASE("valid bin count is monotone in p") {
  SyntheticRun run = make_run(33, 120, false);
  EvalConfig config;
  config.delta_t_s = 0.25;
  std::size_t previous = 0;
  for (double p : {1.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
    config.percentile_p = p;
    const RunReport report = evaluate_run(run.estimates, run.truth, config);
    CHECK(report.total_valid_bins >= previous);
    previous = report.total_valid_bins;
  }
}

TEST_CASE("block partition covers every estimate exactly once") {
  SyntheticRun run = make_run(44, 100);
  const double delta_t = 0.17;
  std::map<long, int> counts;
  for (const BinRecord& rec : run.estimates) {
    counts[static_cast<long>(std::floor(rec.time_s / delta_t))]++;
  }
  std::size_t total = 0;
  for (const auto& [block, n] : counts) total += n;
  CHECK(total == run.estimates.size());
}

TEST_CASE("evaluation is deterministic") {
  SyntheticRun run = make_run(55, 90, false);
  EvalConfig config;
  config.percentile_p = 7.0;
  config.delta_t_s = 0.21;
  const RunReport a = evaluate_run(run.estimates, run.truth, config);
  const RunReport b = evaluate_run(run.estimates, run.truth, config);
  CHECK(a.e_bar_deg == b.e_bar_deg);
  CHECK(a.h_bar_ratio == b.h_bar_ratio);
  CHECK(a.total_valid_bins == b.total_valid_bins);
}

TEST_CASE("timeline mismatch is reported with the covered range") {
  SyntheticRun run = make_run(66, 10);
  BinRecord far = run.estimates.front();
  far.time_s = 99.0;
  run.estimates.push_back(far);
  EvalConfig config;
  CHECK_THROWS_WITH_AS(evaluate_run(run.estimates, run.truth, config),
                       doctest::Contains("timeline mismatch"), std::runtime_error);
}

TEST_CASE("ground truth file round trip") {
  SyntheticRun run = make_run(77, 12);
  const auto tmp = std::filesystem::temp_directory_path() / "lsdd_truth_rt.json";
  run.truth.save(tmp);
  GroundTruth loaded = GroundTruth::load(tmp);
  REQUIRE(loaded.frames.size() == run.truth.frames.size());
  for (std::size_t k = 0; k < loaded.frames.size(); ++k) {
    CHECK(loaded.frames[k].frame_time_s ==
          doctest::Approx(run.truth.frames[k].frame_time_s));
    CHECK(loaded.frames[k].vad == run.truth.frames[k].vad);
    REQUIRE(loaded.frames[k].speakers.size() == run.truth.frames[k].speakers.size());
    CHECK(loaded.frames[k].speakers[0].azimuth_deg_room ==
          doctest::Approx(run.truth.frames[k].speakers[0].azimuth_deg_room));
  }
  std::filesystem::remove(tmp);
}

TEST_CASE("eval config validation") {
  EvalConfig config;
  config.f_low_hz = 2000.0;
  config.f_high_hz = 1100.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = EvalConfig{};
  config.delta_t_s = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = EvalConfig{};
  config.percentile_p = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
