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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lsdd/estimators.hpp"
#include "lsdd/eval.hpp"
#include "lsdd/steering.hpp"

namespace lsdd {

/// Per-bin estimate records as stored on disk, plus the header metadata the
/// analyzer wrote (window size, band, similarity kind, ...).
struct EstimatesFile {
  std::map<std::string, std::string> metadata;
  std::vector<Algorithm> algorithms;
  std::vector<std::vector<BinRecord>> records;  // parallel to algorithms

  const std::vector<BinRecord>& records_for(Algorithm algorithm) const;
};

// CSV schema "lsdd-estimates v1":
//   algorithm,frame,t_s,bin,f_hz,theta_hat_deg,chi
void write_estimates_csv(const std::filesystem::path& file, const AnalyzeResult& result,
                         const std::map<std::string, std::string>& metadata);
EstimatesFile read_estimates_csv(const std::filesystem::path& file);

/// One evaluation sweep point.
struct ReportRow {
  Algorithm algorithm = Algorithm::kLsdd;
  double p_percent = 0.0;
  double delta_t_ms = 0.0;
  bool has_data = false;
  double e_bar_deg = 0.0;
  double h_bar_ratio = 0.0;
};

// CSV schema "lsdd-report v1":
//   p,delta_T_ms,algorithm,E_bar_deg,H_bar_ratio
// Rows without valid data carry empty E/H fields.
void write_report_csv(const std::filesystem::path& file, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& file);

// Full machine-readable report with per-block detail.
void write_report_json(const std::filesystem::path& file,
                       const std::vector<std::pair<ReportRow, RunReport>>& reports);

// CSV schema "lsdd-bandmap v1": first column f_hz, one column per azimuth.
void write_band_map_csv(const std::filesystem::path& file, const BandSimilarityMap& map);
BandSimilarityMap read_band_map_csv(const std::filesystem::path& file);

}  // namespace lsdd
