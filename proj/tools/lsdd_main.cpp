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

// Command line surface: simulate, analyze, evaluate, sweep and band-map
// subcommands around the lsdd_core library. Exit codes: 0 success, 1 runtime
// failure, 2 configuration/validation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lsdd/estimators.hpp"
#include "lsdd/eval.hpp"
#include "lsdd/geometry.hpp"
#include "lsdd/report_io.hpp"
#include "lsdd/scene.hpp"
#include "lsdd/similarity.hpp"
#include "lsdd/steering.hpp"
#include "lsdd/stft.hpp"
#include "lsdd/wav.hpp"

namespace {

using namespace lsdd;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int smoothing_radius_from_name(const std::string& name) {
  if (name == "none") return 0;
  if (name == "three") return 1;  // 3-element moving average
  if (name == "nine") return 4;   // 9-element moving average
  throw std::invalid_argument("unknown smoothing preset '" + name +
                              "' (expected none, three or nine)");
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> algorithms;
  for (const std::string& name : names) algorithms.push_back(algorithm_from_string(name));
  if (algorithms.empty()) throw std::invalid_argument("at least one algorithm is required");
  return algorithms;
}

// A config file, when given, overrides the command line: any key present in
// the JSON object replaces the flag of the same (long) name.
void apply_config_overrides(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path);
  nlohmann::json j;
  in >> j;
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw std::invalid_argument("config file sets unknown option '" + key + "'");
    }
    std::vector<std::string> values;
    if (value.is_array()) {
      for (const auto& v : value) {
        values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else {
      values.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    opt->clear();
    for (const std::string& v : values) opt->add_result(v);
    opt->run_callback();
  }
}

ArrayGeometry resolve_geometry(const std::string& geometry_flag, const SceneSpec& spec) {
  if (!geometry_flag.empty()) return ArrayGeometry::load(geometry_flag);
  if (spec.geometry_path.empty()) {
    throw std::invalid_argument(
        "no geometry: pass --geometry or set \"geometry\" in the scene spec");
  }
  std::filesystem::path path(spec.geometry_path);
  if (path.is_relative()) path = spec.base_dir / path;
  return ArrayGeometry::load(path);
}

struct SimulateArgs {
  std::string scene_path;
  std::string geometry_path;
  std::string out_dir;
  std::string config_path;
};

int run_simulate(const SimulateArgs& args) {
  const SceneSpec spec = SceneSpec::load(args.scene_path);
  const ArrayGeometry geometry = resolve_geometry(args.geometry_path, spec);

  const SceneRender render = synthesize(spec, geometry);
  std::filesystem::create_directories(args.out_dir);
  const std::string stem = std::filesystem::path(args.scene_path).stem().string();
  const std::filesystem::path wav_path = std::filesystem::path(args.out_dir) / (stem + ".wav");
  const std::filesystem::path truth_path =
      std::filesystem::path(args.out_dir) / (stem + ".truth.json");
  write_wav_float32(wav_path, render.audio);
  render.truth.save(truth_path);
  std::cout << wav_path.string() << "\n" << truth_path.string() << "\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string geometry_path;
  std::string steering_path;
  std::string wav_path;
  std::string out_path;
  std::vector<std::string> algorithms = {"lsdd", "lsdde", "dsdd", "dsdde"};
  std::string similarity = "cosine";
  std::string smoothing = "none";
  int radius = -1;  // explicit R, overrides the preset when >= 0
  double f_low = 1100.0;
  double f_high = 2000.0;
  std::size_t window = 1024;
  std::size_t hop = 512;
  double grid_spacing = 6.0;
  std::string config_path;
};

AnalyzeResult analyze_wav(const AnalyzeArgs& args, const MultichannelAudio& audio,
                          const AnalyzeOptions& options) {
  const TFGrid grid = stft(audio, args.window, args.hop);
  if (!args.steering_path.empty()) {
    const SteeringSet steering = SteeringSet::load(args.steering_path);
    return analyze(grid, steering, options);
  }
  const ArrayGeometry geometry = ArrayGeometry::load(args.geometry_path);
  if (geometry.num_mics() != audio.num_channels()) {
    throw std::invalid_argument("geometry has " + std::to_string(geometry.num_mics()) +
                                " microphones but the recording has " +
                                std::to_string(audio.num_channels()) + " channels");
  }
  return analyze(grid, geometry, DoaGrid::uniform(args.grid_spacing), options);
}

std::map<std::string, std::string> analyze_metadata(const AnalyzeArgs& args, int radius,
                                                    double sample_rate_hz) {
  return {{"window", std::to_string(args.window)},
          {"hop", std::to_string(args.hop)},
          {"sample_rate_hz", std::to_string(sample_rate_hz)},
          {"f_low_hz", std::to_string(args.f_low)},
          {"f_high_hz", std::to_string(args.f_high)},
          {"similarity", args.similarity},
          {"smoothing_R", std::to_string(radius)},
          {"source", std::filesystem::path(args.wav_path).filename().string()}};
}

int run_analyze(const AnalyzeArgs& args) {
  if (args.geometry_path.empty() && args.steering_path.empty()) {
    throw std::invalid_argument("pass --geometry or --steering");
  }
  AnalyzeOptions options;
  options.algorithms = parse_algorithms(args.algorithms);
  options.kind = similarity_kind_from_string(args.similarity);
  options.smoothing_radius =
      args.radius >= 0 ? args.radius : smoothing_radius_from_name(args.smoothing);
  options.f_low_hz = args.f_low;
  options.f_high_hz = args.f_high;

  const MultichannelAudio audio = read_wav(args.wav_path);
  const AnalyzeResult result = analyze_wav(args, audio, options);
  write_estimates_csv(args.out_path, result,
                      analyze_metadata(args, options.smoothing_radius, audio.sample_rate_hz));

  std::size_t total = 0;
  for (const auto& records : result.records) total += records.size();
  std::cout << args.out_path << " (" << total << " records)\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string estimates_path;
  std::string truth_path;
  std::string out_path;
  std::string json_path;
  std::vector<double> delta_t_ms = {200.0, 300.0, 500.0};
  std::vector<double> p_percent = {1.0, 5.0, 10.0, 20.0, 50.0, 100.0};
  double hit_threshold = 10.0;
  double f_low = 0.0;  // 0 = take from the estimates metadata
  double f_high = 0.0;
  std::string config_path;
};

std::vector<std::pair<ReportRow, RunReport>> evaluate_rows(const EstimatesFile& estimates,
                                                           const GroundTruth& truth,
                                                           const EvaluateArgs& args) {
  double f_low = args.f_low;
  double f_high = args.f_high;
  if (f_low <= 0.0) {
    const auto it = estimates.metadata.find("f_low_hz");
    f_low = it != estimates.metadata.end() ? std::stod(it->second) : 1100.0;
  }
  if (f_high <= 0.0) {
    const auto it = estimates.metadata.find("f_high_hz");
    f_high = it != estimates.metadata.end() ? std::stod(it->second) : 2000.0;
  }

  std::vector<std::pair<ReportRow, RunReport>> rows;
  for (std::size_t a = 0; a < estimates.algorithms.size(); ++a) {
    for (double p : args.p_percent) {
      for (double dt_ms : args.delta_t_ms) {
        EvalConfig config;
        config.f_low_hz = f_low;
        config.f_high_hz = f_high;
        config.delta_t_s = dt_ms / 1000.0;
        config.percentile_p = p;
        config.hit_threshold_deg = args.hit_threshold;
        const RunReport report = evaluate_run(estimates.records[a], truth, config);
        ReportRow row;
        row.algorithm = estimates.algorithms[a];
        row.p_percent = p;
        row.delta_t_ms = dt_ms;
        row.has_data = report.has_data;
        row.e_bar_deg = report.e_bar_deg;
        row.h_bar_ratio = report.h_bar_ratio;
        rows.emplace_back(row, report);
      }
    }
  }
  return rows;
}

int emit_report(const std::vector<std::pair<ReportRow, RunReport>>& rows,
                const std::string& out_path, const std::string& json_path) {
  std::vector<ReportRow> csv_rows;
  for (const auto& [row, report] : rows) {
    csv_rows.push_back(row);
    std::cout << to_string(row.algorithm) << " p=" << row.p_percent
              << "% dT=" << row.delta_t_ms << "ms: ";
    if (row.has_data) {
      std::cout << "E_bar=" << row.e_bar_deg << " deg, H_bar=" << row.h_bar_ratio
                << ", valid_bins=" << report.total_valid_bins << "\n";
    } else {
      std::cout << "no valid data\n";
    }
  }
  write_report_csv(out_path, csv_rows);
  if (!json_path.empty()) write_report_json(json_path, rows);
  std::cout << out_path << "\n";
  return kExitOk;
}

int run_evaluate(const EvaluateArgs& args) {
  const EstimatesFile estimates = read_estimates_csv(args.estimates_path);
  const GroundTruth truth = GroundTruth::load(args.truth_path);
  return emit_report(evaluate_rows(estimates, truth, args), args.out_path, args.json_path);
}

struct SweepArgs {
  std::string scene_path;
  std::string geometry_path;
  std::string out_dir;
  std::vector<std::string> algorithms = {"lsdd", "lsdde", "dsdde"};
  std::string similarity = "cosine";
  std::string smoothing = "auto";  // auto = 9-element for LSDD, none otherwise
  std::vector<double> delta_t_ms = {200.0, 300.0, 500.0};
  std::vector<double> p_percent = {1.0, 5.0, 10.0, 20.0, 50.0, 100.0};
  double hit_threshold = 10.0;
  double f_low = 1100.0;
  double f_high = 2000.0;
  std::string config_path;
};

// End-to-end pipeline: synthesize, analyze each algorithm at its smoothing
// setting, evaluate the whole (algorithm, p, delta_T) grid.
int run_sweep(const SweepArgs& args) {
  const SceneSpec spec = SceneSpec::load(args.scene_path);
  const ArrayGeometry geometry = resolve_geometry(args.geometry_path, spec);
  const SceneRender render = synthesize(spec, geometry);

  std::filesystem::create_directories(args.out_dir);
  const std::string stem = std::filesystem::path(args.scene_path).stem().string();
  const std::filesystem::path wav_path = std::filesystem::path(args.out_dir) / (stem + ".wav");
  const std::filesystem::path truth_path =
      std::filesystem::path(args.out_dir) / (stem + ".truth.json");
  write_wav_float32(wav_path, render.audio);
  render.truth.save(truth_path);

  const TFGrid grid = stft(render.audio, spec.stft_window, spec.stft_hop);
  const DoaGrid doa_grid = DoaGrid::uniform(6.0);

  EstimatesFile estimates;
  AnalyzeResult merged;
  for (const std::string& name : args.algorithms) {
    const Algorithm algorithm = algorithm_from_string(name);
    AnalyzeOptions options;
    options.algorithms = {algorithm};
    options.kind = similarity_kind_from_string(args.similarity);
    if (args.smoothing == "auto") {
      options.smoothing_radius = algorithm == Algorithm::kLsdd ? 4 : 0;
    } else {
      options.smoothing_radius = smoothing_radius_from_name(args.smoothing);
    }
    options.f_low_hz = args.f_low;
    options.f_high_hz = args.f_high;
    const AnalyzeResult result = analyze(grid, geometry, doa_grid, options);
    merged.algorithms.push_back(algorithm);
    merged.records.push_back(result.records[0]);
    estimates.algorithms.push_back(algorithm);
    estimates.records.push_back(merged.records.back());
  }

  const std::filesystem::path estimates_path =
      std::filesystem::path(args.out_dir) / (stem + ".estimates.csv");
  write_estimates_csv(estimates_path, merged,
                      {{"f_low_hz", std::to_string(args.f_low)},
                       {"f_high_hz", std::to_string(args.f_high)},
                       {"similarity", args.similarity},
                       {"smoothing", args.smoothing},
                       {"source", wav_path.filename().string()}});

  EvaluateArgs eval_args;
  eval_args.delta_t_ms = args.delta_t_ms;
  eval_args.p_percent = args.p_percent;
  eval_args.hit_threshold = args.hit_threshold;
  eval_args.f_low = args.f_low;
  eval_args.f_high = args.f_high;
  const auto rows = evaluate_rows(estimates, render.truth, eval_args);
  const std::filesystem::path report_path =
      std::filesystem::path(args.out_dir) / (stem + ".report.csv");
  const std::filesystem::path json_path =
      std::filesystem::path(args.out_dir) / (stem + ".report.json");
  return emit_report(rows, report_path.string(), json_path.string());
}

struct BandMapArgs {
  std::string geometry_path;
  std::string out_path;
  double reference = 0.0;
  double sample_rate = 48000.0;
  std::size_t window = 1024;
  double f_max = 8000.0;
  double grid_spacing = 6.0;
  std::string config_path;
};

int run_band_map(const BandMapArgs& args) {
  const ArrayGeometry geometry = ArrayGeometry::load(args.geometry_path);
  std::vector<double> freqs;
  const double bin_width = args.sample_rate / static_cast<double>(args.window);
  for (std::size_t b = 0; static_cast<double>(b) * bin_width <= args.f_max; ++b) {
    freqs.push_back(static_cast<double>(b) * bin_width);
  }
  const SteeringSet steering(geometry, DoaGrid::uniform(args.grid_spacing), freqs);
  const BandSimilarityMap map = band_similarity_map(steering, args.reference);
  write_band_map_csv(args.out_path, map);
  std::cout << args.out_path << " (" << map.frequencies_hz.size() << " rows)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lsdd: direction-of-arrival estimation for wearable microphone arrays\n"
      "Estimators: LSDD, LSDDe, dSDD, dSDDe with direct-path dominance tests.\n"
      "WAV channel order must match the geometry file's microphone order."};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Render a scene spec to WAV plus ground truth");
  simulate->add_option("--scene", sim.scene_path, "Scene spec JSON")->required();
  simulate->add_option("--geometry", sim.geometry_path, "Geometry JSON (overrides the spec)");
  simulate->add_option("--out-dir", sim.out_dir, "Output directory")->required();
  simulate->add_option("--config", sim.config_path, "JSON file whose keys override these flags");

  AnalyzeArgs ana;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "Per-bin DOA/DPD estimates from a recording");
  analyze_cmd->add_option("--geometry", ana.geometry_path, "Geometry JSON (free-field steering)");
  analyze_cmd->add_option("--steering", ana.steering_path, "Measured steering set JSON");
  analyze_cmd->add_option("--wav", ana.wav_path, "Multichannel WAV recording")->required();
  analyze_cmd->add_option("--out", ana.out_path, "Estimates CSV output")->required();
  analyze_cmd->add_option("--algorithms", ana.algorithms, "lsdd, lsdde, dsdd, dsdde")
      ->delimiter(',');
  analyze_cmd->add_option("--similarity", ana.similarity, "cosine or inverse_residual");
  analyze_cmd->add_option("--smoothing", ana.smoothing, "none, three or nine");
  analyze_cmd->add_option("--radius", ana.radius, "Explicit smoothing radius R (overrides preset)");
  analyze_cmd->add_option("--f-low", ana.f_low, "Band lower edge, Hz");
  analyze_cmd->add_option("--f-high", ana.f_high, "Band upper edge, Hz");
  analyze_cmd->add_option("--window", ana.window, "STFT window, samples");
  analyze_cmd->add_option("--hop", ana.hop, "STFT hop, samples");
  analyze_cmd->add_option("--grid", ana.grid_spacing, "DOA grid spacing, degrees");
  analyze_cmd->add_option("--config", ana.config_path, "JSON file whose keys override these flags");

  EvaluateArgs ev;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "Block metrics from estimates plus truth");
  evaluate_cmd->add_option("--estimates", ev.estimates_path, "Estimates CSV")->required();
  evaluate_cmd->add_option("--truth", ev.truth_path, "Ground truth JSON")->required();
  evaluate_cmd->add_option("--out", ev.out_path, "Report CSV output")->required();
  evaluate_cmd->add_option("--report-json", ev.json_path, "Full report JSON output");
  evaluate_cmd->add_option("--delta-t", ev.delta_t_ms, "Block lengths, ms")->delimiter(',');
  evaluate_cmd->add_option("--p", ev.p_percent, "DPD percentiles, percent")->delimiter(',');
  evaluate_cmd->add_option("--hit-threshold", ev.hit_threshold, "Hit threshold, degrees");
  evaluate_cmd->add_option("--f-low", ev.f_low,
                           "Band lower edge, Hz (default: estimates metadata)");
  evaluate_cmd->add_option("--f-high", ev.f_high, "Band upper edge, Hz");
  evaluate_cmd->add_option("--config", ev.config_path, "JSON file whose keys override these flags");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Scene to report in one pass");
  sweep_cmd->add_option("--scene", sweep.scene_path, "Scene spec JSON")->required();
  sweep_cmd->add_option("--geometry", sweep.geometry_path, "Geometry JSON (overrides the spec)");
  sweep_cmd->add_option("--out-dir", sweep.out_dir, "Output directory")->required();
  sweep_cmd->add_option("--algorithms", sweep.algorithms, "Algorithms to sweep")->delimiter(',');
  sweep_cmd->add_option("--similarity", sweep.similarity, "cosine or inverse_residual");
  sweep_cmd->add_option("--smoothing", sweep.smoothing,
                        "auto (nine for LSDD, none otherwise), none, three or nine");
  sweep_cmd->add_option("--delta-t", sweep.delta_t_ms, "Block lengths, ms")->delimiter(',');
  sweep_cmd->add_option("--p", sweep.p_percent, "DPD percentiles, percent")->delimiter(',');
  sweep_cmd->add_option("--hit-threshold", sweep.hit_threshold, "Hit threshold, degrees");
  sweep_cmd->add_option("--f-low", sweep.f_low, "Band lower edge, Hz");
  sweep_cmd->add_option("--f-high", sweep.f_high, "Band upper edge, Hz");
  sweep_cmd->add_option("--config", sweep.config_path, "JSON file whose keys override these flags");

  BandMapArgs bm;
  CLI::App* band_map_cmd =
      app.add_subcommand("band-map", "Steering similarity map for band diagnosis");
  band_map_cmd->add_option("--geometry", bm.geometry_path, "Geometry JSON")->required();
  band_map_cmd->add_option("--out", bm.out_path, "Band map CSV output")->required();
  band_map_cmd->add_option("--reference", bm.reference, "Reference azimuth, degrees (on grid)");
  band_map_cmd->add_option("--fs", bm.sample_rate, "Sample rate, Hz");
  band_map_cmd->add_option("--window", bm.window, "STFT window, samples");
  band_map_cmd->add_option("--f-max", bm.f_max, "Highest frequency row, Hz");
  band_map_cmd->add_option("--grid", bm.grid_spacing, "DOA grid spacing, degrees");
  band_map_cmd->add_option("--config", bm.config_path, "JSON file whose keys override these flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      return app.exit(e);
    }
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) {
      apply_config_overrides(simulate, sim.config_path);
      return run_simulate(sim);
    }
    if (*analyze_cmd) {
      apply_config_overrides(analyze_cmd, ana.config_path);
      return run_analyze(ana);
    }
    if (*evaluate_cmd) {
      apply_config_overrides(evaluate_cmd, ev.config_path);
      return run_evaluate(ev);
    }
    if (*sweep_cmd) {
      apply_config_overrides(sweep_cmd, sweep.config_path);
      return run_sweep(sweep);
    }
    if (*band_map_cmd) {
      apply_config_overrides(band_map_cmd, bm.config_path);
      return run_band_map(bm);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
