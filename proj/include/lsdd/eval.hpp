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
#include <vector>

#include "lsdd/estimators.hpp"

namespace lsdd {

struct Speaker {
  int id = 0;
  double azimuth_deg_room = 0.0;
};

/// Ground truth for one STFT frame: the array's yaw in the room frame, a
/// voice-activity flag, and the active speakers' room-frame azimuths.
struct TruthFrame {
  double frame_time_s = 0.0;
  double array_yaw_deg = 0.0;
  bool vad = false;
  std::vector<Speaker> speakers;
};

struct GroundTruth {
  std::vector<TruthFrame> frames;

  static GroundTruth load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  // Index of the truth frame closest in time, or throws naming the
  // misaligned range when the nearest record is further than tol seconds.
  std::size_t frame_index_at(double time_s, double tol_s) const;
};

struct EvalConfig {
  double f_low_hz = 1100.0;
  double f_high_hz = 2000.0;
  double delta_t_s = 0.5;       // block length
  double percentile_p = 1.0;    // top-p% DPD selection, in (0, 100]
  double hit_threshold_deg = 10.0;

  void validate() const;
};

// Array-frame estimate plus head yaw -> room-frame azimuth in [0, 360).
double to_room_frame(double theta_deg_array, double yaw_deg);

// Circular absolute difference in degrees, in [0, 180].
double circular_error(double psi_deg, double theta_deg);

// The k-th largest chi with k = ceil(p/100 * n): bins with chi >= lambda
// pass, so exactly k pass unless ties at lambda admit more. Throws on an
// empty list (the caller skips such blocks).
double percentile_threshold(const std::vector<double>& chis, double p);

// Smallest circular error between the room-frame estimate and any active
// speaker. Throws if the frame lists no speakers.
double nearest_truth_error(double theta_room_deg, const TruthFrame& truth);

struct BlockReport {
  double block_center_s = 0.0;
  std::size_t valid_bin_count = 0;
  double mean_error_deg = 0.0;  // defined only when valid_bin_count > 0
  double hit_ratio = 0.0;
};

struct RunReport {
  bool has_data = false;  // false = no block had valid bins
  double e_bar_deg = 0.0;
  double h_bar_ratio = 0.0;
  std::size_t total_valid_bins = 0;
  std::vector<BlockReport> blocks;  // only blocks with valid bins
  EvalConfig config;
};

// Indices into `estimates` passing all four validity conditions for the
// block centered at block_center_s (frequency in band, time in the block's
// half-open interval, VAD true with at least one speaker, chi above the
// block-local percentile threshold).
std::vector<std::size_t> select_valid_bins(const std::vector<BinRecord>& estimates,
                                           const GroundTruth& truth, const EvalConfig& config,
                                           double block_center_s);

/// Blocks of length delta_t partition the timeline starting at t = 0; each
/// block picks its valid bins, computes the mean absolute circular error E
/// and the hit ratio H, and the run averages them over non-empty blocks.
RunReport evaluate_run(const std::vector<BinRecord>& estimates, const GroundTruth& truth,
                       const EvalConfig& config);

}  // namespace lsdd
