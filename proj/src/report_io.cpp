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

#include "lsdd/report_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lsdd {

namespace {

constexpr const char* kEstimatesHeader = "# lsdd-estimates v1";
constexpr const char* kReportHeader = "# lsdd-report v1";
constexpr const char* kBandMapHeader = "# lsdd-bandmap v1";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void expect_header(std::istream& in, const std::string& expected,
                   const std::filesystem::path& file) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(expected, 0) != 0) {
    throw std::runtime_error(file.string() + ": expected header '" + expected + "'");
  }
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write file: " + file.string());
  out << std::setprecision(17);
  return out;
}

}  // namespace

const std::vector<BinRecord>& EstimatesFile::records_for(Algorithm algorithm) const {
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    if (algorithms[i] == algorithm) return records[i];
  }
  throw std::out_of_range("estimates file: algorithm " + to_string(algorithm) + " not present");
}

void write_estimates_csv(const std::filesystem::path& file, const AnalyzeResult& result,
                         const std::map<std::string, std::string>& metadata) {
  std::ofstream out = open_out(file);
  out << kEstimatesHeader << "\n";
  for (const auto& [key, value] : metadata) {
    out << "# " << key << "=" << value << "\n";
  }
  out << "algorithm,frame,t_s,bin,f_hz,theta_hat_deg,chi\n";
  for (std::size_t a = 0; a < result.algorithms.size(); ++a) {
    const std::string name = to_string(result.algorithms[a]);
    for (const BinRecord& rec : result.records[a]) {
      out << name << ',' << rec.frame << ',' << rec.time_s << ',' << rec.bin << ',' << rec.freq_hz
          << ',' << rec.theta_deg << ',' << rec.chi << "\n";
    }
  }
}

EstimatesFile read_estimates_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open estimates file: " + file.string());
  expect_header(in, kEstimatesHeader, file);

  EstimatesFile parsed;
  std::string line;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(2, eq - 2);
        parsed.metadata[key] = line.substr(eq + 1);
      }
      continue;
    }
    if (!saw_columns) {  // column header row
      saw_columns = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 7) {
      throw std::runtime_error(file.string() + ": malformed estimates row '" + line + "'");
    }
    const Algorithm algorithm = algorithm_from_string(fields[0]);
    BinRecord rec;
    rec.frame = std::stoul(fields[1]);
    rec.time_s = std::stod(fields[2]);
    rec.bin = std::stoul(fields[3]);
    rec.freq_hz = std::stod(fields[4]);
    rec.theta_deg = std::stod(fields[5]);
    rec.chi = std::stod(fields[6]);

    auto it = std::find(parsed.algorithms.begin(), parsed.algorithms.end(), algorithm);
    if (it == parsed.algorithms.end()) {
      parsed.algorithms.push_back(algorithm);
      parsed.records.emplace_back();
      it = parsed.algorithms.end() - 1;
    }
    parsed.records[static_cast<std::size_t>(it - parsed.algorithms.begin())].push_back(rec);
  }
  return parsed;
}

void write_report_csv(const std::filesystem::path& file, const std::vector<ReportRow>& rows) {
  std::ofstream out = open_out(file);
  out << kReportHeader << "\n";
  out << "p,delta_T_ms,algorithm,E_bar_deg,H_bar_ratio\n";
  for (const ReportRow& row : rows) {
    out << row.p_percent << ',' << row.delta_t_ms << ',' << to_string(row.algorithm) << ',';
    if (row.has_data) {
      out << row.e_bar_deg << ',' << row.h_bar_ratio;
    } else {
      out << ',';
    }
    out << "\n";
  }
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open report file: " + file.string());
  expect_header(in, kReportHeader, file);

  std::vector<ReportRow> rows;
  std::string line;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_columns) {
      saw_columns = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw std::runtime_error(file.string() + ": malformed report row '" + line + "'");
    }
    ReportRow row;
    row.p_percent = std::stod(fields[0]);
    row.delta_t_ms = std::stod(fields[1]);
    row.algorithm = algorithm_from_string(fields[2]);
    row.has_data = !fields[3].empty();
    if (row.has_data) {
      row.e_bar_deg = std::stod(fields[3]);
      row.h_bar_ratio = std::stod(fields[4]);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_report_json(const std::filesystem::path& file,
                       const std::vector<std::pair<ReportRow, RunReport>>& reports) {
  nlohmann::json j;
  j["format"] = "lsdd-report-v1";
  auto& runs = j["runs"] = nlohmann::json::array();
  for (const auto& [row, report] : reports) {
    nlohmann::json run;
    run["algorithm"] = to_string(row.algorithm);
    run["p_percent"] = row.p_percent;
    run["delta_t_ms"] = row.delta_t_ms;
    run["has_data"] = report.has_data;
    run["config"] = {{"f_low_hz", report.config.f_low_hz},
                     {"f_high_hz", report.config.f_high_hz},
                     {"delta_t_s", report.config.delta_t_s},
                     {"percentile_p", report.config.percentile_p},
                     {"hit_threshold_deg", report.config.hit_threshold_deg}};
    if (report.has_data) {
      run["E_bar_deg"] = report.e_bar_deg;
      run["H_bar_ratio"] = report.h_bar_ratio;
      run["total_valid_bins"] = report.total_valid_bins;
      auto& blocks = run["blocks"] = nlohmann::json::array();
      for (const BlockReport& block : report.blocks) {
        blocks.push_back({{"center_s", block.block_center_s},
                          {"valid_bins", block.valid_bin_count},
                          {"E_deg", block.mean_error_deg},
                          {"H_ratio", block.hit_ratio}});
      }
    }
    runs.push_back(std::move(run));
  }
  std::ofstream out = open_out(file);
  out << j.dump(2) << "\n";
}

void write_band_map_csv(const std::filesystem::path& file, const BandSimilarityMap& map) {
  std::ofstream out = open_out(file);
  out << kBandMapHeader << "\n";
  out << "f_hz";
  for (double az : map.azimuths_deg) out << ",az_" << az;
  out << "\n";
  for (std::size_t fi = 0; fi < map.frequencies_hz.size(); ++fi) {
    out << map.frequencies_hz[fi];
    for (std::size_t l = 0; l < map.azimuths_deg.size(); ++l) out << ',' << map.at(fi, l);
    out << "\n";
  }
}

BandSimilarityMap read_band_map_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open band map file: " + file.string());
  expect_header(in, kBandMapHeader, file);

  BandSimilarityMap map;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(file.string() + ": missing column header");
  std::vector<std::string> columns = split_csv_line(line);
  for (std::size_t i = 1; i < columns.size(); ++i) {
    map.azimuths_deg.push_back(std::stod(columns[i].substr(3)));  // strip "az_"
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != columns.size()) {
      throw std::runtime_error(file.string() + ": malformed band map row '" + line + "'");
    }
    map.frequencies_hz.push_back(std::stod(fields[0]));
    for (std::size_t i = 1; i < fields.size(); ++i) map.values.push_back(std::stod(fields[i]));
  }
  return map;
}

}  // namespace lsdd
