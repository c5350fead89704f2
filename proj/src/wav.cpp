// Copyright 2026 The vtract Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vtract/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "vtract/error.hpp"
#include "vtract/fileio.hpp"

namespace vtract {

namespace {

std::uint32_t read_u32(const std::string& b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t read_u16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Waveform parse_wav(const std::string& b) {
  if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0)
    throw Error("wav: missing RIFF/WAVE header");

  bool have_fmt = false;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string id = b.substr(pos, 4);
    const std::uint32_t size = read_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) throw Error("wav: chunk '" + id + "' runs past end of file");
    if (id == "fmt ") {
      if (size < 16) throw Error("wav: fmt chunk too short");
      const std::uint16_t format = read_u16(b, body);
      const std::uint16_t channels = read_u16(b, body + 2);
      rate = read_u32(b, body + 4);
      const std::uint16_t bits = read_u16(b, body + 14);
      if (format != 1) throw Error("wav: unsupported format code " + std::to_string(format) + " (only PCM = 1)");
      if (channels != 1) throw Error("wav: unsupported channel count " + std::to_string(channels) + " (only mono)");
      if (bits != 16) throw Error("wav: unsupported bit depth " + std::to_string(bits) + " (only 16-bit)");
      if (rate == 0) throw Error("wav: sample rate is zero");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error("wav: data chunk precedes fmt chunk");
      if (size % 2 != 0) throw Error("wav: data chunk has odd byte count");
      if (size == 0) throw Error("wav: data chunk is empty");
      std::vector<double> samples(size / 2);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(read_u16(b, body + 2 * i));
        samples[i] = static_cast<double>(v) / 32768.0;
      }
      return Waveform(std::move(samples), static_cast<double>(rate));
    }
    pos = body + size + (size & 1u);
  }
  throw Error(have_fmt ? "wav: no data chunk" : "wav: no fmt chunk");
}

Waveform read_wav(const std::filesystem::path& path) {
  try {
    return parse_wav(read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string encode_wav(const Waveform& w) {
  const auto x = w.samples();
  const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate_hz()));
  const auto data_bytes = static_cast<std::uint32_t>(x.size() * 2);
  std::string b;
  b.reserve(44 + data_bytes);
  b += "RIFF";
  put_u32(b, 36 + data_bytes);
  b += "WAVEfmt ";
  put_u32(b, 16);
  put_u16(b, 1);
  put_u16(b, 1);
  put_u32(b, rate);
  put_u32(b, rate * 2);
  put_u16(b, 2);
  put_u16(b, 16);
  b += "data";
  put_u32(b, data_bytes);
  for (double s : x) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return b;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  write_file_atomic(path, encode_wav(w));
}

}  // namespace vtract
