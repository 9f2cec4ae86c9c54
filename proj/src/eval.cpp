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
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "lsdd/geometry.hpp"

namespace lsdd {

namespace {
constexpr const char* kTruthFormat = "lsdd-truth-v1";
}

GroundTruth GroundTruth::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open ground-truth file: " + file.string());
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != kTruthFormat) {
    throw std::runtime_error("ground-truth file " + file.string() + ": expected format '" +
                             kTruthFormat + "'");
  }
  GroundTruth truth;
  for (const auto& rec : j.at("frames")) {
    TruthFrame frame;
    frame.frame_time_s = rec.at("frame_time_s").get<double>();
    frame.array_yaw_deg = rec.at("array_yaw_deg").get<double>();
    frame.vad = rec.at("vad").get<int>() != 0;
    if (rec.contains("speakers")) {
      for (const auto& sp : rec.at("speakers")) {
        frame.speakers.push_back(
            {sp.at("id").get<int>(), sp.at("azimuth_deg_room").get<double>()});
      }
    }
    truth.frames.push_back(std::move(frame));
  }
  for (std::size_t i = 1; i < truth.frames.size(); ++i) {
    if (truth.frames[i].frame_time_s <= truth.frames[i - 1].frame_time_s) {
      throw std::runtime_error("ground-truth file " + file.string() +
                               ": frame times must be strictly increasing");
    }
  }
  return truth;
}

void GroundTruth::save(const std::filesystem::path& file) const {
  nlohmann::json j;
  j["format"] = kTruthFormat;
  auto& arr = j["frames"] = nlohmann::json::array();
  for (const TruthFrame& frame : frames) {
    nlohmann::json rec;
    rec["frame_time_s"] = frame.frame_time_s;
    rec["array_yaw_deg"] = frame.array_yaw_deg;
    rec["vad"] = frame.vad ? 1 : 0;
    auto& speakers = rec["speakers"] = nlohmann::json::array();
    for (const Speaker& sp : frame.speakers) {
      speakers.push_back({{"id", sp.id}, {"azimuth_deg_room", sp.azimuth_deg_room}});
    }
    arr.push_back(std::move(rec));
  }
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write ground-truth file: " + file.string());
  out << j.dump() << "\n";
}

std::size_t GroundTruth::frame_index_at(double time_s, double tol_s) const {
  if (frames.empty()) throw std::runtime_error("ground truth has no frames");
  // frames are kept sorted by time
  const auto it = std::lower_bound(
      frames.begin(), frames.end(), time_s,
      [](const TruthFrame& f, double t) { return f.frame_time_s < t; });
  std::size_t best;
  if (it == frames.begin()) {
    best = 0;
  } else if (it == frames.end()) {
    best = frames.size() - 1;
  } else {
    const std::size_t hi = static_cast<std::size_t>(it - frames.begin());
    best = (std::abs(frames[hi].frame_time_s - time_s) <
            std::abs(frames[hi - 1].frame_time_s - time_s))
               ? hi
               : hi - 1;
  }
  if (std::abs(frames[best].frame_time_s - time_s) > tol_s) {
    throw std::runtime_error(
        "timeline mismatch: estimate at t=" + std::to_string(time_s) +
        " s has no ground-truth record within " + std::to_string(tol_s) +
        " s (truth covers [" + std::to_string(frames.front().frame_time_s) + ", " +
        std::to_string(frames.back().frame_time_s) + "] s)");
  }
  return best;
}

void EvalConfig::validate() const {
  if (!(f_low_hz > 0.0) || !(f_low_hz < f_high_hz)) {
    throw std::invalid_argument("EvalConfig: need 0 < f_low < f_high");
  }
  if (!(delta_t_s > 0.0)) throw std::invalid_argument("EvalConfig: delta_t must be > 0");
  if (!(percentile_p > 0.0) || percentile_p > 100.0) {
    throw std::invalid_argument("EvalConfig: percentile p must lie in (0, 100]");
  }
  if (!(hit_threshold_deg >= 0.0)) {
    throw std::invalid_argument("EvalConfig: hit threshold must be >= 0");
  }
}

double to_room_frame(double theta_deg_array, double yaw_deg) {
  return normalize_azimuth(theta_deg_array + yaw_deg);
}

double circular_error(double psi_deg, double theta_deg) {
  double diff = std::abs(normalize_azimuth(psi_deg) - normalize_azimuth(theta_deg));
  return std::min(diff, 360.0 - diff);
}

double percentile_threshold(const std::vector<double>& chis, double p) {
  if (chis.empty()) throw std::invalid_argument("percentile_threshold: empty chi list");
  if (!(p > 0.0) || p > 100.0) {
    throw std::invalid_argument("percentile_threshold: p must lie in (0, 100]");
  }
  const auto n = static_cast<double>(chis.size());
  // ceil(p/100 * n), guarded against floating-point wobble at exact integers
  auto k = static_cast<std::size_t>(std::ceil(p * n / 100.0 - 1e-9));
  k = std::clamp<std::size_t>(k, 1, chis.size());
  std::vector<double> sorted(chis);
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end(), std::greater<>());
  return sorted[k - 1];
}

double nearest_truth_error(double theta_room_deg, const TruthFrame& truth) {
  if (truth.speakers.empty()) {
    throw std::invalid_argument("nearest_truth_error: no active speaker at t=" +
                                std::to_string(truth.frame_time_s));
  }
  double best = 180.0;
  for (const Speaker& sp : truth.speakers) {
    best = std::min(best, circular_error(sp.azimuth_deg_room, theta_room_deg));
  }
  return best;
}

namespace {

// Alignment tolerance: half the smallest spacing between truth records.
double alignment_tolerance(const GroundTruth& truth) {
  double min_spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < truth.frames.size(); ++i) {
    min_spacing =
        std::min(min_spacing, truth.frames[i].frame_time_s - truth.frames[i - 1].frame_time_s);
  }
  if (!std::isfinite(min_spacing)) return 1e-3;
  return 0.5 * min_spacing + 1e-9;
}

bool candidate_bin(const BinRecord& rec, const TruthFrame& truth, const EvalConfig& config) {
  if (rec.freq_hz < config.f_low_hz - 1e-9 || rec.freq_hz > config.f_high_hz + 1e-9) return false;
  return truth.vad && !truth.speakers.empty();
}

}  // namespace

std::vector<std::size_t> select_valid_bins(const std::vector<BinRecord>& estimates,
                                           const GroundTruth& truth, const EvalConfig& config,
                                           double block_center_s) {
  config.validate();
  const double tol = alignment_tolerance(truth);
  const double t_lo = block_center_s - config.delta_t_s / 2.0;
  const double t_hi = block_center_s + config.delta_t_s / 2.0;

  std::vector<std::size_t> candidates;
  std::vector<double> chis;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const BinRecord& rec = estimates[i];
    if (rec.time_s < t_lo || rec.time_s >= t_hi) continue;
    const TruthFrame& frame = truth.frames[truth.frame_index_at(rec.time_s, tol)];
    if (!candidate_bin(rec, frame, config)) continue;
    candidates.push_back(i);
    chis.push_back(rec.chi);
  }
  if (candidates.empty()) return {};

  const double lambda = percentile_threshold(chis, config.percentile_p);
  std::vector<std::size_t> valid;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (chis[j] >= lambda) valid.push_back(candidates[j]);
  }
  return valid;
}

RunReport evaluate_run(const std::vector<BinRecord>& estimates, const GroundTruth& truth,
                       const EvalConfig& config) {
  config.validate();
  RunReport report;
  report.config = config;
  if (estimates.empty()) return report;

  const double tol = alignment_tolerance(truth);

  // Bucket candidate bins by block; blocks tile [0, inf) in steps of delta_t.
  std::map<long, std::vector<std::size_t>> block_candidates;
  std::vector<std::size_t> truth_index(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const BinRecord& rec = estimates[i];
    truth_index[i] = truth.frame_index_at(rec.time_s, tol);
    if (!candidate_bin(rec, truth.frames[truth_index[i]], config)) continue;
    const auto block = static_cast<long>(std::floor(rec.time_s / config.delta_t_s));
    block_candidates[block].push_back(i);
  }

  double e_sum = 0.0, h_sum = 0.0;
  for (const auto& [block, candidates] : block_candidates) {
    std::vector<double> chis;
    chis.reserve(candidates.size());
    for (std::size_t i : candidates) chis.push_back(estimates[i].chi);
    const double lambda = percentile_threshold(chis, config.percentile_p);

    BlockReport block_report;
    block_report.block_center_s = (static_cast<double>(block) + 0.5) * config.delta_t_s;
    double err_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i : candidates) {
      if (estimates[i].chi < lambda) continue;
      const TruthFrame& frame = truth.frames[truth_index[i]];
      const double theta_room = to_room_frame(estimates[i].theta_deg, frame.array_yaw_deg);
      const double err = nearest_truth_error(theta_room, frame);
      err_sum += err;
      if (err <= config.hit_threshold_deg) ++hits;
      ++block_report.valid_bin_count;
    }
    if (block_report.valid_bin_count == 0) continue;
    block_report.mean_error_deg = err_sum / static_cast<double>(block_report.valid_bin_count);
    block_report.hit_ratio =
        static_cast<double>(hits) / static_cast<double>(block_report.valid_bin_count);
    e_sum += block_report.mean_error_deg;
    h_sum += block_report.hit_ratio;
    report.total_valid_bins += block_report.valid_bin_count;
    report.blocks.push_back(block_report);
  }

  if (!report.blocks.empty()) {
    report.has_data = true;
    report.e_bar_deg = e_sum / static_cast<double>(report.blocks.size());
    report.h_bar_ratio = h_sum / static_cast<double>(report.blocks.size());
  }
  return report;
}

}  // namespace lsdd
