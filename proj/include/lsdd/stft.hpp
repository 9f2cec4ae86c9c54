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

#include <complex>
#include <cstddef>
#include <vector>

namespace lsdd {

/// Real multichannel audio, one vector of samples per microphone. Channel
/// order must match the geometry file's microphone order.
struct MultichannelAudio {
  double sample_rate_hz = 0.0;
  std::vector<std::vector<double>> channels;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels.front().size(); }

  // Throws if channel lengths differ or the sample rate is not positive.
  void validate() const;
};

/// Complex one-sided time-frequency grid: window_size/2 + 1 bins per frame,
/// frame k covering samples [k*hop, k*hop + window_size). Frame times are
/// frame centers.
class TFGrid {
 public:
  TFGrid(double sample_rate_hz, std::size_t num_channels, std::size_t num_frames,
         std::size_t window_size, std::size_t hop);

  double sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t num_channels() const { return num_channels_; }
  std::size_t num_frames() const { return num_frames_; }
  std::size_t num_bins() const { return window_size_ / 2 + 1; }
  std::size_t window_size() const { return window_size_; }
  std::size_t hop() const { return hop_; }

  double bin_frequency(std::size_t bin) const;   // bin * fs / window_size
  double frame_time(std::size_t frame) const;    // (frame * hop + window/2) / fs
  std::vector<double> bin_frequencies() const;
  std::vector<double> frame_times() const;

  const std::complex<double>& at(std::size_t channel, std::size_t frame, std::size_t bin) const;
  std::complex<double>& at(std::size_t channel, std::size_t frame, std::size_t bin);

  // The M-element cross-channel snapshot x(t,f) of one bin.
  std::vector<std::complex<double>> snapshot(std::size_t frame, std::size_t bin) const;

  // Highest bin index with bin_frequency <= freq (clamped to the bin range).
  std::size_t bin_below(double freq_hz) const;

 private:
  double sample_rate_hz_ = 0.0;
  std::size_t num_channels_ = 0;
  std::size_t num_frames_ = 0;
  std::size_t window_size_ = 0;
  std::size_t hop_ = 0;
  std::vector<std::complex<double>> data_;  // [channel][frame][bin]
};

/// Short-time Fourier transform with a periodic Hann window and no padding;
/// a trailing partial frame is dropped. Audio shorter than one window is an
/// error ("insufficient samples").
TFGrid stft(const MultichannelAudio& audio, std::size_t window_size = 1024, std::size_t hop = 512);

// The periodic (DFT-even) Hann window of the given length.
std::vector<double> hann_window(std::size_t window_size);

}  // namespace lsdd
