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

#include "lsdd/scene.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "lsdd/wav.hpp"

namespace lsdd {

namespace {

constexpr const char* kSceneFormat = "lsdd-scene-v1";

// Stable per-stream seeding: mixes the scene seed with a stream id so the
// noise of mic 3 does not depend on how many sources precede it.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    // Box-Muller; implemented by hand so streams are reproducible across
    // standard libraries.
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

void apply_fade(std::vector<double>& signal, double fade_s, double fs) {
  if (fade_s <= 0.0) return;
  const auto fade_samples = std::min<std::size_t>(
      signal.size() / 2, static_cast<std::size_t>(std::llround(fade_s * fs)));
  for (std::size_t n = 0; n < fade_samples; ++n) {
    const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n) /
                                          static_cast<double>(fade_samples));
    signal[n] *= w;
    signal[signal.size() - 1 - n] *= w;
  }
}

std::vector<double> make_sinusoid_set(const SignalSpec& spec, std::size_t num_samples, double fs,
                                      Rng& rng) {
  std::vector<double> s(num_samples, 0.0);
  const double amp = 1.0 / static_cast<double>(spec.frequencies_hz.size());
  for (double f : spec.frequencies_hz) {
    const double phase0 = 2.0 * std::numbers::pi * rng.uniform();
    const double step = 2.0 * std::numbers::pi * f / fs;
    for (std::size_t n = 0; n < num_samples; ++n) {
      s[n] += amp * std::sin(step * static_cast<double>(n) + phase0);
    }
  }
  apply_fade(s, spec.fade_s, fs);
  return s;
}

std::vector<double> make_bandlimited_noise(const SignalSpec& spec, std::size_t num_samples,
                                           double fs, Rng& rng) {
  std::vector<double> s(num_samples);
  for (double& v : s) v = rng.gaussian();

  // Brickwall the band in the frequency domain.
  const std::size_t num_bins = num_samples / 2 + 1;
  fftw_complex* spectrum = fftw_alloc_complex(num_bins);
  double* buffer = fftw_alloc_real(num_samples);
  std::copy(s.begin(), s.end(), buffer);
  fftw_plan fwd =
      fftw_plan_dft_r2c_1d(static_cast<int>(num_samples), buffer, spectrum, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);
  const double bin_width = fs / static_cast<double>(num_samples);
  for (std::size_t b = 0; b < num_bins; ++b) {
    const double f = static_cast<double>(b) * bin_width;
    if (f < spec.f_low_hz || f > spec.f_high_hz) {
      spectrum[b][0] = 0.0;
      spectrum[b][1] = 0.0;
    }
  }
  fftw_plan inv =
      fftw_plan_dft_c2r_1d(static_cast<int>(num_samples), spectrum, buffer, FFTW_ESTIMATE);
  fftw_execute(inv);
  fftw_destroy_plan(inv);
  for (std::size_t n = 0; n < num_samples; ++n) {
    s[n] = buffer[n] / static_cast<double>(num_samples);
  }
  fftw_free(spectrum);
  fftw_free(buffer);

  double power = 0.0;
  for (double v : s) power += v * v;
  power /= static_cast<double>(num_samples);
  if (power > 0.0) {
    const double scale = 1.0 / std::sqrt(power);
    for (double& v : s) v *= scale;
  }
  apply_fade(s, spec.fade_s, fs);
  return s;
}

std::vector<double> make_wav_signal(const SignalSpec& spec, std::size_t num_samples, double fs,
                                    const std::filesystem::path& base_dir) {
  std::filesystem::path path(spec.wav_path);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  const MultichannelAudio wav = read_wav(path);
  if (wav.sample_rate_hz != fs) {
    throw std::runtime_error("scene source '" + spec.wav_path + "': sample rate " +
                             std::to_string(wav.sample_rate_hz) + " differs from scene rate " +
                             std::to_string(fs) + " (resampling is not provided)");
  }
  const std::vector<double>& mono = wav.channels.at(0);
  if (mono.empty()) throw std::runtime_error("scene source '" + spec.wav_path + "' is empty");
  std::vector<double> s(num_samples);
  for (std::size_t n = 0; n < num_samples; ++n) s[n] = mono[n % mono.size()];
  return s;
}

double sample_or_zero(const std::vector<double>& s, long index) {
  if (index < 0 || index >= static_cast<long>(s.size())) return 0.0;
  return s[static_cast<std::size_t>(index)];
}

// One plane-wave component of the mixture.
struct PlaneWave {
  const std::vector<double>* signal = nullptr;
  const std::vector<Keyframe>* trajectory = nullptr;
  double azimuth_offset_deg = 0.0;
  double gain = 1.0;
  double delay_s = 0.0;
};

}  // namespace

double piecewise_linear(const std::vector<Keyframe>& keyframes, double time_s) {
  if (keyframes.empty()) throw std::invalid_argument("piecewise_linear: no keyframes");
  if (time_s <= keyframes.front().time_s) return keyframes.front().value;
  if (time_s >= keyframes.back().time_s) return keyframes.back().value;
  for (std::size_t i = 1; i < keyframes.size(); ++i) {
    if (time_s <= keyframes[i].time_s) {
      const Keyframe& a = keyframes[i - 1];
      const Keyframe& b = keyframes[i];
      const double w = (time_s - a.time_s) / (b.time_s - a.time_s);
      return a.value + w * (b.value - a.value);
    }
  }
  return keyframes.back().value;
}

std::vector<double> fractional_delay_taps(double mu) {
  const int half = kFractionalDelayTaps / 2;
  std::vector<double> taps(kFractionalDelayTaps);
  for (int j = -half + 1; j <= half; ++j) {
    const double u = static_cast<double>(j) - mu;
    const double sinc =
        u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
    const double window = 0.5 + 0.5 * std::cos(std::numbers::pi * u / static_cast<double>(half));
    taps[static_cast<std::size_t>(j + half - 1)] = sinc * window;
  }
  return taps;
}

std::vector<double> apply_fractional_delay(const std::vector<double>& signal,
                                           double delay_samples) {
  const double floor_delay = std::floor(delay_samples);
  const double mu = delay_samples - floor_delay;
  const auto int_delay = static_cast<long>(floor_delay);
  const std::vector<double> taps = fractional_delay_taps(mu);
  const int half = kFractionalDelayTaps / 2;

  std::vector<double> out(signal.size(), 0.0);
  for (std::size_t n = 0; n < signal.size(); ++n) {
    double acc = 0.0;
    for (int j = -half + 1; j <= half; ++j) {
      acc += taps[static_cast<std::size_t>(j + half - 1)] *
             sample_or_zero(signal, static_cast<long>(n) - int_delay - j);
    }
    out[n] = acc;
  }
  return out;
}

SceneRender synthesize(const SceneSpec& spec, const ArrayGeometry& geometry) {
  spec.ensure_valid(geometry.num_mics());

  const double fs = spec.sample_rate_hz;
  const auto num_samples = static_cast<std::size_t>(std::llround(spec.duration_s * fs));
  const std::size_t num_mics = geometry.num_mics();

  // Source signals, seeded independently of evaluation order.
  std::vector<std::vector<double>> signals(spec.sources.size());
  for (std::size_t k = 0; k < spec.sources.size(); ++k) {
    const SignalSpec& sig = spec.sources[k].signal;
    Rng rng(mix_seed(spec.seed, 2000 + k));
    switch (sig.kind) {
      case SignalSpec::Kind::kSinusoidSet:
        signals[k] = make_sinusoid_set(sig, num_samples, fs, rng);
        break;
      case SignalSpec::Kind::kBandlimitedNoise:
        signals[k] = make_bandlimited_noise(sig, num_samples, fs, rng);
        break;
      case SignalSpec::Kind::kWavFile:
        signals[k] = make_wav_signal(sig, num_samples, fs, spec.base_dir);
        break;
    }
  }

  std::vector<PlaneWave> waves;
  for (std::size_t k = 0; k < spec.sources.size(); ++k) {
    waves.push_back(PlaneWave{&signals[k], &spec.sources[k].azimuth_deg_room, 0.0,
                              spec.sources[k].gain, 0.0});
  }
  for (const ReflectionSpec& refl : spec.reflections) {
    waves.push_back(PlaneWave{&signals[refl.source_index],
                              &spec.sources[refl.source_index].azimuth_deg_room,
                              refl.azimuth_offset_deg,
                              spec.sources[refl.source_index].gain * refl.gain,
                              refl.delay_ms / 1000.0});
  }

  SceneRender render;
  render.audio.sample_rate_hz = fs;
  render.audio.channels.assign(num_mics, std::vector<double>(num_samples, 0.0));

  const Vec3 origin = geometry.centroid();
  const int half = kFractionalDelayTaps / 2;
  const std::size_t chunk = spec.stft_hop;

  for (const PlaneWave& wave : waves) {
    for (std::size_t start = 0; start < num_samples; start += chunk) {
      const std::size_t stop = std::min(num_samples, start + chunk);
      const double t_center = (static_cast<double>(start) +
                               static_cast<double>(stop - start) / 2.0) / fs;
      const double room_az = piecewise_linear(*wave.trajectory, t_center) +
                             wave.azimuth_offset_deg;
      const double yaw = piecewise_linear(spec.array_yaw_deg, t_center);
      const double array_az_rad = (room_az - yaw) * std::numbers::pi / 180.0;
      const Vec3 dir{std::cos(array_az_rad), std::sin(array_az_rad), 0.0};

      for (std::size_t m = 0; m < num_mics; ++m) {
        const double tau = -dot(geometry.mics()[m] - origin, dir) / geometry.speed_of_sound();
        const double delay_samples = (tau + wave.delay_s) * fs;
        const double floor_delay = std::floor(delay_samples);
        const std::vector<double> taps = fractional_delay_taps(delay_samples - floor_delay);
        const auto int_delay = static_cast<long>(floor_delay);
        std::vector<double>& out = render.audio.channels[m];
        const std::vector<double>& s = *wave.signal;
        for (std::size_t n = start; n < stop; ++n) {
          double acc = 0.0;
          for (int j = -half + 1; j <= half; ++j) {
            acc += taps[static_cast<std::size_t>(j + half - 1)] *
                   sample_or_zero(s, static_cast<long>(n) - int_delay - j);
          }
          out[n] += wave.gain * acc;
        }
      }
    }
  }

  for (std::size_t m = 0; m < num_mics; ++m) {
    const double level = spec.noise_level.size() == 1 ? spec.noise_level[0] : spec.noise_level[m];
    if (level <= 0.0) continue;
    Rng rng(mix_seed(spec.seed, 1000 + m));
    for (double& v : render.audio.channels[m]) v += level * rng.gaussian();
  }

  // Ground truth on the STFT frame raster.
  if (num_samples >= spec.stft_window) {
    const std::size_t num_frames = (num_samples - spec.stft_window) / spec.stft_hop + 1;
    render.truth.frames.reserve(num_frames);
    for (std::size_t k = 0; k < num_frames; ++k) {
      TruthFrame frame;
      frame.frame_time_s = (static_cast<double>(k * spec.stft_hop) +
                            static_cast<double>(spec.stft_window) / 2.0) / fs;
      frame.array_yaw_deg = piecewise_linear(spec.array_yaw_deg, frame.frame_time_s);
      frame.vad = !spec.sources.empty();
      for (std::size_t s = 0; s < spec.sources.size(); ++s) {
        frame.speakers.push_back(Speaker{
            static_cast<int>(s),
            normalize_azimuth(
                piecewise_linear(spec.sources[s].azimuth_deg_room, frame.frame_time_s))});
      }
      render.truth.frames.push_back(std::move(frame));
    }
  }
  return render;
}

std::vector<double> snr_at_mics(const SceneSpec& spec, const ArrayGeometry& geometry) {
  spec.ensure_valid(geometry.num_mics());
  SceneSpec noiseless = spec;
  noiseless.noise_level = {0.0};
  const SceneRender render = synthesize(noiseless, geometry);

  std::vector<double> snr_db(geometry.num_mics());
  for (std::size_t m = 0; m < geometry.num_mics(); ++m) {
    const std::vector<double>& x = render.audio.channels[m];
    double power = 0.0;
    for (double v : x) power += v * v;
    power /= static_cast<double>(std::max<std::size_t>(1, x.size()));
    const double level = spec.noise_level.size() == 1 ? spec.noise_level[0] : spec.noise_level[m];
    if (level <= 0.0) {
      snr_db[m] = std::numeric_limits<double>::infinity();
    } else {
      snr_db[m] = 10.0 * std::log10(power / (level * level));
    }
  }
  return snr_db;
}

std::vector<std::string> SceneSpec::validate(std::size_t num_mics) const {
  std::vector<std::string> violations;
  auto complain = [&violations](const std::string& msg) { violations.push_back(msg); };

  if (!(duration_s > 0.0)) {
    complain("duration_s must be > 0 (got " + std::to_string(duration_s) + ")");
  }
  if (!(sample_rate_hz > 0.0)) {
    complain("sample_rate_hz must be > 0 (got " + std::to_string(sample_rate_hz) + ")");
  }
  if (stft_window == 0 || stft_window % 2 != 0) complain("stft.window_size must be even and > 0");
  if (stft_hop == 0 || stft_hop > stft_window) {
    complain("stft.hop must satisfy 0 < hop <= window_size");
  }

  auto check_trajectory = [&complain](const std::vector<Keyframe>& traj, const std::string& name) {
    if (traj.empty()) {
      complain(name + " must have at least one keyframe");
      return;
    }
    for (std::size_t i = 1; i < traj.size(); ++i) {
      if (traj[i].time_s <= traj[i - 1].time_s) {
        complain(name + " keyframe times must be strictly increasing");
        return;
      }
    }
  };
  check_trajectory(array_yaw_deg, "array_yaw_deg");

  for (std::size_t k = 0; k < sources.size(); ++k) {
    const std::string tag = "sources[" + std::to_string(k) + "]";
    const SourceSpec& src = sources[k];
    if (!(src.gain >= 0.0)) complain(tag + ".gain must be >= 0");
    check_trajectory(src.azimuth_deg_room, tag + ".azimuth_deg_room");
    const SignalSpec& sig = src.signal;
    switch (sig.kind) {
      case SignalSpec::Kind::kSinusoidSet:
        if (sig.frequencies_hz.empty()) complain(tag + ".signal.frequencies_hz must be nonempty");
        for (double f : sig.frequencies_hz) {
          if (!(f > 0.0) || f >= sample_rate_hz / 2.0) {
            complain(tag + ".signal.frequencies_hz entries must lie in (0, sample_rate/2)");
            break;
          }
        }
        break;
      case SignalSpec::Kind::kBandlimitedNoise:
        if (!(sig.f_low_hz >= 0.0) || !(sig.f_low_hz < sig.f_high_hz) ||
            !(sig.f_high_hz <= sample_rate_hz / 2.0)) {
          complain(tag + ".signal band must satisfy 0 <= f_low < f_high <= sample_rate/2");
        }
        break;
      case SignalSpec::Kind::kWavFile:
        if (sig.wav_path.empty()) complain(tag + ".signal.path must be set");
        break;
    }
  }

  for (std::size_t r = 0; r < reflections.size(); ++r) {
    const std::string tag = "reflections[" + std::to_string(r) + "]";
    const ReflectionSpec& refl = reflections[r];
    if (refl.source_index >= sources.size()) {
      complain(tag + ".source refers to missing source " + std::to_string(refl.source_index));
    }
    if (!(refl.gain >= 0.0) || !(refl.gain < 1.0)) {
      complain(tag + ".gain must lie in [0, 1)");
    }
    if (!(refl.delay_ms >= 0.0)) complain(tag + ".delay_ms must be >= 0");
  }

  if (noise_level.empty()) {
    complain("noise_level must hold one value or one value per microphone");
  } else {
    for (double level : noise_level) {
      if (!(level >= 0.0)) {
        complain("noise_level values must be >= 0");
        break;
      }
    }
    if (num_mics > 0 && noise_level.size() != 1 && noise_level.size() != num_mics) {
      complain("noise_level must hold one value or one value per microphone (got " +
               std::to_string(noise_level.size()) + " for " + std::to_string(num_mics) +
               " mics)");
    }
  }
  return violations;
}

void SceneSpec::ensure_valid(std::size_t num_mics) const {
  const std::vector<std::string> violations = validate(num_mics);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid scene spec:";
  for (const std::string& v : violations) msg << "\n  - " << v;
  throw std::invalid_argument(msg.str());
}

namespace {

std::vector<Keyframe> keyframes_from_json(const nlohmann::json& j, const std::string& what) {
  std::vector<Keyframe> traj;
  if (!j.is_array()) throw std::runtime_error(what + ": expected [[time_s, value], ...]");
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::runtime_error(what + ": expected [time_s, value] pairs");
    }
    traj.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return traj;
}

nlohmann::json keyframes_to_json(const std::vector<Keyframe>& traj) {
  nlohmann::json j = nlohmann::json::array();
  for (const Keyframe& k : traj) j.push_back({k.time_s, k.value});
  return j;
}

}  // namespace

SceneSpec SceneSpec::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open scene file: " + file.string());
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != kSceneFormat) {
    throw std::runtime_error("scene file " + file.string() + ": expected format '" + kSceneFormat +
                             "'");
  }
  SceneSpec spec;
  spec.base_dir = file.parent_path();
  spec.duration_s = j.at("duration_s").get<double>();
  spec.sample_rate_hz = j.value("sample_rate_hz", 48000.0);
  spec.seed = j.value("seed", 0ULL);
  spec.geometry_path = j.value("geometry", "");
  if (j.contains("stft")) {
    spec.stft_window = j["stft"].value("window_size", 1024U);
    spec.stft_hop = j["stft"].value("hop", 512U);
  }
  if (j.contains("array_yaw_deg")) {
    spec.array_yaw_deg = keyframes_from_json(j["array_yaw_deg"], "array_yaw_deg");
  }
  for (const auto& js : j.value("sources", nlohmann::json::array())) {
    SourceSpec src;
    src.name = js.value("name", "");
    src.gain = js.value("gain", 1.0);
    src.azimuth_deg_room = keyframes_from_json(js.at("azimuth_deg_room"), "azimuth_deg_room");
    const auto& sig = js.at("signal");
    const std::string kind = sig.at("kind").get<std::string>();
    if (kind == "sinusoid_set") {
      src.signal.kind = SignalSpec::Kind::kSinusoidSet;
      src.signal.frequencies_hz = sig.at("frequencies_hz").get<std::vector<double>>();
      src.signal.fade_s = sig.value("fade_s", 0.01);
    } else if (kind == "bandlimited_noise") {
      src.signal.kind = SignalSpec::Kind::kBandlimitedNoise;
      src.signal.f_low_hz = sig.value("f_low_hz", 300.0);
      src.signal.f_high_hz = sig.value("f_high_hz", 4000.0);
      src.signal.fade_s = sig.value("fade_s", 0.01);
    } else if (kind == "wav") {
      src.signal.kind = SignalSpec::Kind::kWavFile;
      src.signal.wav_path = sig.at("path").get<std::string>();
    } else {
      throw std::runtime_error("scene file " + file.string() + ": unknown signal kind '" + kind +
                               "'");
    }
    spec.sources.push_back(std::move(src));
  }
  for (const auto& jr : j.value("reflections", nlohmann::json::array())) {
    ReflectionSpec refl;
    refl.source_index = jr.at("source").get<std::size_t>();
    refl.azimuth_offset_deg = jr.at("azimuth_offset_deg").get<double>();
    refl.gain = jr.at("gain").get<double>();
    refl.delay_ms = jr.at("delay_ms").get<double>();
    spec.reflections.push_back(refl);
  }
  if (j.contains("noise_level")) {
    if (j["noise_level"].is_array()) {
      spec.noise_level = j["noise_level"].get<std::vector<double>>();
    } else {
      spec.noise_level = {j["noise_level"].get<double>()};
    }
  }
  return spec;
}

void SceneSpec::save(const std::filesystem::path& file) const {
  nlohmann::json j;
  j["format"] = kSceneFormat;
  j["duration_s"] = duration_s;
  j["sample_rate_hz"] = sample_rate_hz;
  j["seed"] = seed;
  if (!geometry_path.empty()) j["geometry"] = geometry_path;
  j["stft"] = {{"window_size", stft_window}, {"hop", stft_hop}};
  j["array_yaw_deg"] = keyframes_to_json(array_yaw_deg);
  auto& sources_json = j["sources"] = nlohmann::json::array();
  for (const SourceSpec& src : sources) {
    nlohmann::json js;
    if (!src.name.empty()) js["name"] = src.name;
    js["gain"] = src.gain;
    js["azimuth_deg_room"] = keyframes_to_json(src.azimuth_deg_room);
    nlohmann::json sig;
    switch (src.signal.kind) {
      case SignalSpec::Kind::kSinusoidSet:
        sig["kind"] = "sinusoid_set";
        sig["frequencies_hz"] = src.signal.frequencies_hz;
        sig["fade_s"] = src.signal.fade_s;
        break;
      case SignalSpec::Kind::kBandlimitedNoise:
        sig["kind"] = "bandlimited_noise";
        sig["f_low_hz"] = src.signal.f_low_hz;
        sig["f_high_hz"] = src.signal.f_high_hz;
        sig["fade_s"] = src.signal.fade_s;
        break;
      case SignalSpec::Kind::kWavFile:
        sig["kind"] = "wav";
        sig["path"] = src.signal.wav_path;
        break;
    }
    js["signal"] = std::move(sig);
    sources_json.push_back(std::move(js));
  }
  auto& refl_json = j["reflections"] = nlohmann::json::array();
  for (const ReflectionSpec& refl : reflections) {
    refl_json.push_back({{"source", refl.source_index},
                         {"azimuth_offset_deg", refl.azimuth_offset_deg},
                         {"gain", refl.gain},
                         {"delay_ms", refl.delay_ms}});
  }
  if (noise_level.size() == 1) {
    j["noise_level"] = noise_level[0];
  } else {
    j["noise_level"] = noise_level;
  }
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write scene file: " + file.string());
  out << j.dump(2) << "\n";
}

}  // namespace lsdd
