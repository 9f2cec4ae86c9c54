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

#include "lsdd/wav.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsdd {

namespace {

// RIFF/WAVE with plain little-endian chunks. Format codes handled: 1 (PCM),
// 3 (IEEE float) and the WAVE_FORMAT_EXTENSIBLE wrapper around either.
constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("WAV: unexpected end of file");
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

struct ChunkHeader {
  char id[4];
  std::uint32_t size;
};

ChunkHeader read_chunk_header(std::istream& in) {
  ChunkHeader h{};
  in.read(h.id, 4);
  if (!in) throw std::runtime_error("WAV: unexpected end of file");
  h.size = read_le<std::uint32_t>(in);
  return h;
}

double int24_to_double(const unsigned char* p) {
  std::int32_t v = (p[0]) | (p[1] << 8) | (p[2] << 16);
  if (v & 0x800000) v |= static_cast<std::int32_t>(0xFF000000);
  return static_cast<double>(v) / 8388608.0;
}

}  // namespace

MultichannelAudio read_wav(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open WAV file: " + file.string());

  char riff[4];
  in.read(riff, 4);
  if (!in || std::memcmp(riff, "RIFF", 4) != 0) {
    throw std::runtime_error("WAV file " + file.string() + ": missing RIFF header");
  }
  read_le<std::uint32_t>(in);  // RIFF payload size, unused
  char wave[4];
  in.read(wave, 4);
  if (!in || std::memcmp(wave, "WAVE", 4) != 0) {
    throw std::runtime_error("WAV file " + file.string() + ": not a WAVE stream");
  }

  std::uint16_t format = 0, num_channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  std::vector<char> payload;

  while (in.peek() != EOF) {
    const ChunkHeader chunk = read_chunk_header(in);
    if (std::memcmp(chunk.id, "fmt ", 4) == 0) {
      format = read_le<std::uint16_t>(in);
      num_channels = read_le<std::uint16_t>(in);
      sample_rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      std::uint32_t consumed = 16;
      if (format == kFormatExtensible && chunk.size >= 40) {
        read_le<std::uint16_t>(in);  // cbSize
        read_le<std::uint16_t>(in);  // valid bits
        read_le<std::uint32_t>(in);  // channel mask
        format = read_le<std::uint16_t>(in);  // first two bytes of the sub-format GUID
        in.ignore(14);
        consumed = 40;
      }
      if (chunk.size > consumed) in.ignore(chunk.size - consumed);
      have_fmt = true;
    } else if (std::memcmp(chunk.id, "data", 4) == 0) {
      payload.resize(chunk.size);
      in.read(payload.data(), chunk.size);
      if (!in) throw std::runtime_error("WAV file " + file.string() + ": truncated data chunk");
    } else {
      // skip unknown chunks (word aligned)
      in.ignore(chunk.size + (chunk.size % 2));
    }
    if (chunk.size % 2 == 1 && std::memcmp(chunk.id, "data", 4) == 0) in.ignore(1);
  }

  if (!have_fmt) throw std::runtime_error("WAV file " + file.string() + ": no fmt chunk");
  if (num_channels == 0) throw std::runtime_error("WAV file " + file.string() + ": zero channels");

  const std::size_t bytes_per_sample = bits / 8;
  if (bytes_per_sample == 0 || payload.size() % (bytes_per_sample * num_channels) != 0) {
    throw std::runtime_error("WAV file " + file.string() + ": malformed data chunk");
  }
  const std::size_t num_frames = payload.size() / (bytes_per_sample * num_channels);

  MultichannelAudio audio;
  audio.sample_rate_hz = static_cast<double>(sample_rate);
  audio.channels.assign(num_channels, std::vector<double>(num_frames));

  const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t n = 0; n < num_frames; ++n) {
    for (std::size_t c = 0; c < num_channels; ++c) {
      const unsigned char* p = bytes + (n * num_channels + c) * bytes_per_sample;
      double value = 0.0;
      if (format == kFormatPcm && bits == 16) {
        std::int16_t v;
        std::memcpy(&v, p, 2);
        value = static_cast<double>(v) / 32768.0;
      } else if (format == kFormatPcm && bits == 24) {
        value = int24_to_double(p);
      } else if (format == kFormatPcm && bits == 32) {
        std::int32_t v;
        std::memcpy(&v, p, 4);
        value = static_cast<double>(v) / 2147483648.0;
      } else if (format == kFormatFloat && bits == 32) {
        float v;
        std::memcpy(&v, p, 4);
        value = static_cast<double>(v);
      } else {
        throw std::runtime_error("WAV file " + file.string() + ": unsupported format (code " +
                                 std::to_string(format) + ", " + std::to_string(bits) + " bit)");
      }
      audio.channels[c][n] = value;
    }
  }
  return audio;
}

void write_wav_float32(const std::filesystem::path& file, const MultichannelAudio& audio) {
  audio.validate();
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write WAV file: " + file.string());

  const auto num_channels = static_cast<std::uint16_t>(audio.num_channels());
  const auto sample_rate = static_cast<std::uint32_t>(audio.sample_rate_hz);
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(audio.num_samples() * num_channels * 4);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, kFormatFloat);
  write_le<std::uint16_t>(out, num_channels);
  write_le<std::uint32_t>(out, sample_rate);
  write_le<std::uint32_t>(out, sample_rate * num_channels * 4);
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(num_channels * 4));
  write_le<std::uint16_t>(out, 32);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_bytes);
  for (std::size_t n = 0; n < audio.num_samples(); ++n) {
    for (std::size_t c = 0; c < num_channels; ++c) {
      write_le<float>(out, static_cast<float>(audio.channels[c][n]));
    }
  }
  if (!out) throw std::runtime_error("failed while writing WAV file: " + file.string());
}

}  // namespace lsdd
