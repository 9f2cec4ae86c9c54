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

#include "lsdd/stft.hpp"

namespace lsdd {

/// Reads a multichannel PCM WAV file. Supported sample formats: 16/24/32-bit
/// signed integer and 32-bit float; integers are scaled into [-1, 1].
MultichannelAudio read_wav(const std::filesystem::path& file);

/// Writes multichannel audio as 32-bit float WAV.
void write_wav_float32(const std::filesystem::path& file, const MultichannelAudio& audio);

}  // namespace lsdd
