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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lsdd/eval.hpp"
#include "lsdd/geometry.hpp"
#include "lsdd/stft.hpp"

namespace lsdd {

/// One (time, value) knot of a piecewise-linear trajectory. Values are held
/// constant before the first and after the last knot.
struct Keyframe {
  double time_s = 0.0;
  double value = 0.0;
};

double piecewise_linear(const std::vector<Keyframe>& keyframes, double time_s);

struct SignalSpec {
  enum class Kind { kSinusoidSet, kBandlimitedNoise, kWavFile };

  Kind kind = Kind::kSinusoidSet;
  std::vector<double> frequencies_hz;  // sinusoid set
  double fade_s = 0.01;                // raised-cosine taper at both ends
  double f_low_hz = 300.0;             // bandlimited noise
  double f_high_hz = 4000.0;
  std::string wav_path;  // wav file source; looped if shorter than the scene
};

struct SourceSpec {
  std::string name;
  SignalSpec signal;
  double gain = 1.0;
  std::vector<Keyframe> azimuth_deg_room = {{0.0, 0.0}};
};

/// A discrete reflection: the parent source's signal, attenuated, delayed,
/// and arriving as a plane wave from an azimuth offset relative to the
/// parent's instantaneous direction.
struct ReflectionSpec {
  std::size_t source_index = 0;
  double azimuth_offset_deg = 0.0;
  double gain = 0.5;  // must be < 1
  double delay_ms = 10.0;
};

struct SceneSpec {
  double duration_s = 0.0;
  double sample_rate_hz = 48000.0;
  std::uint64_t seed = 0;
  std::string geometry_path;  // reference for CLI use; loaded relative to the spec file
  std::vector<SourceSpec> sources;
  std::vector<ReflectionSpec> reflections;
  std::vector<Keyframe> array_yaw_deg = {{0.0, 0.0}};
  std::vector<double> noise_level = {0.0};  // linear std; one value or one per mic
  std::size_t stft_window = 1024;           // frame raster of the emitted ground truth
  std::size_t stft_hop = 512;
  // Directory of the file this spec was loaded from; relative wav and
  // geometry paths resolve against it. Empty for programmatic specs.
  std::filesystem::path base_dir;

  static SceneSpec load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  // All constraint violations (empty = valid). num_mics 0 skips the per-mic
  // noise-level shape check.
  std::vector<std::string> validate(std::size_t num_mics) const;
  // Throws std::invalid_argument listing every violation.
  void ensure_valid(std::size_t num_mics) const;
};

struct SceneRender {
  MultichannelAudio audio;
  GroundTruth truth;
};

/// Renders the scene: per plane-wave component (source or reflection) and
/// hop-sized chunk, the instantaneous array-frame DOA (room azimuth minus
/// yaw) maps to per-microphone fractional delays applied with a windowed
/// sinc; per-mic white noise is added last. Ground truth is emitted on the
/// STFT frame raster with VAD true wherever at least one source exists.
SceneRender synthesize(const SceneSpec& spec, const ArrayGeometry& geometry);

/// Expected per-microphone SNR in dB: signal power from a noise-free render
/// against the configured noise variance. +infinity where the noise level
/// is zero.
std::vector<double> snr_at_mics(const SceneSpec& spec, const ArrayGeometry& geometry);

// 32-tap windowed-sinc fractional delay, shared by the renderer and exposed
// for its accuracy test.
inline constexpr int kFractionalDelayTaps = 32;
std::vector<double> fractional_delay_taps(double mu);  // mu in [0, 1)
std::vector<double> apply_fractional_delay(const std::vector<double>& signal,
                                           double delay_samples);

}  // namespace lsdd
