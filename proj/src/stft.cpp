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

#include "lsdd/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace lsdd {

void MultichannelAudio::validate() const {
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("MultichannelAudio: sample_rate must be > 0");
  }
  if (channels.empty()) throw std::invalid_argument("MultichannelAudio: no channels");
  for (const auto& ch : channels) {
    if (ch.size() != channels.front().size()) {
      throw std::invalid_argument("MultichannelAudio: channels must have equal length");
    }
  }
}

TFGrid::TFGrid(double sample_rate_hz, std::size_t num_channels, std::size_t num_frames,
               std::size_t window_size, std::size_t hop)
    : sample_rate_hz_(sample_rate_hz), num_channels_(num_channels), num_frames_(num_frames),
      window_size_(window_size), hop_(hop),
      data_(num_channels * num_frames * (window_size / 2 + 1)) {}

double TFGrid::bin_frequency(std::size_t bin) const {
  if (bin >= num_bins()) {
    throw std::out_of_range("TFGrid: bin " + std::to_string(bin) + " out of range");
  }
  return static_cast<double>(bin) * sample_rate_hz_ / static_cast<double>(window_size_);
}

double TFGrid::frame_time(std::size_t frame) const {
  if (frame >= num_frames_) {
    throw std::out_of_range("TFGrid: frame " + std::to_string(frame) + " out of range");
  }
  return (static_cast<double>(frame * hop_) + static_cast<double>(window_size_) / 2.0) /
         sample_rate_hz_;
}

std::vector<double> TFGrid::bin_frequencies() const {
  std::vector<double> f(num_bins());
  for (std::size_t b = 0; b < f.size(); ++b) f[b] = bin_frequency(b);
  return f;
}

std::vector<double> TFGrid::frame_times() const {
  std::vector<double> t(num_frames_);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = frame_time(k);
  return t;
}

const std::complex<double>& TFGrid::at(std::size_t channel, std::size_t frame,
                                       std::size_t bin) const {
  if (channel >= num_channels_ || frame >= num_frames_ || bin >= num_bins()) {
    throw std::out_of_range("TFGrid: index out of range");
  }
  return data_[(channel * num_frames_ + frame) * num_bins() + bin];
}

std::complex<double>& TFGrid::at(std::size_t channel, std::size_t frame, std::size_t bin) {
  return const_cast<std::complex<double>&>(std::as_const(*this).at(channel, frame, bin));
}

std::vector<std::complex<double>> TFGrid::snapshot(std::size_t frame, std::size_t bin) const {
  std::vector<std::complex<double>> x(num_channels_);
  for (std::size_t m = 0; m < num_channels_; ++m) x[m] = at(m, frame, bin);
  return x;
}

std::size_t TFGrid::bin_below(double freq_hz) const {
  const double width = sample_rate_hz_ / static_cast<double>(window_size_);
  if (freq_hz <= 0.0) return 0;
  const auto bin = static_cast<std::size_t>(std::floor(freq_hz / width + 1e-9));
  return std::min(bin, num_bins() - 1);
}

std::vector<double> hann_window(std::size_t window_size) {
  std::vector<double> w(window_size);
  for (std::size_t n = 0; n < window_size; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(window_size));
  }
  return w;
}

TFGrid stft(const MultichannelAudio& audio, std::size_t window_size, std::size_t hop) {
  audio.validate();
  if (window_size == 0 || window_size % 2 != 0) {
    throw std::invalid_argument("stft: window_size must be even and positive");
  }
  if (hop == 0 || hop > window_size) {
    throw std::invalid_argument("stft: hop must satisfy 0 < hop <= window_size");
  }
  const std::size_t num_samples = audio.num_samples();
  if (num_samples < window_size) {
    throw std::invalid_argument("stft: insufficient samples (" + std::to_string(num_samples) +
                                " < window of " + std::to_string(window_size) + ")");
  }
  const std::size_t num_frames = (num_samples - window_size) / hop + 1;
  const std::size_t num_bins = window_size / 2 + 1;
  TFGrid grid(audio.sample_rate_hz, audio.num_channels(), num_frames, window_size, hop);

  const std::vector<double> window = hann_window(window_size);

  double* in = fftw_alloc_real(window_size);
  fftw_complex* out = fftw_alloc_complex(num_bins);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(window_size), in, out, FFTW_ESTIMATE);
  if (plan == nullptr) {
    fftw_free(in);
    fftw_free(out);
    throw std::runtime_error("stft: FFT plan creation failed");
  }

  for (std::size_t m = 0; m < audio.num_channels(); ++m) {
    const std::vector<double>& samples = audio.channels[m];
    for (std::size_t k = 0; k < num_frames; ++k) {
      const std::size_t start = k * hop;
      for (std::size_t n = 0; n < window_size; ++n) in[n] = samples[start + n] * window[n];
      fftw_execute(plan);
      for (std::size_t b = 0; b < num_bins; ++b) {
        grid.at(m, k, b) = std::complex<double>(out[b][0], out[b][1]);
      }
    }
  }

  fftw_destroy_plan(plan);
  fftw_free(in);
  fftw_free(out);
  return grid;
}

}  // namespace lsdd
