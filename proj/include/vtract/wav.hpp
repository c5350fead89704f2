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

#pragma once

#include <filesystem>
#include <string>

#include "vtract/signals.hpp"

namespace vtract {

// Reads a RIFF/WAVE file holding mono 16-bit signed little-endian PCM.
// Samples are divided by 32768. Every other layout is rejected with an
// Error describing the offending field.
Waveform read_wav(const std::filesystem::path& path);
Waveform parse_wav(const std::string& bytes);

// Encodes as mono 16-bit PCM; samples are scaled by 32768, rounded and
// clipped to the int16 range.
std::string encode_wav(const Waveform& w);
void write_wav(const std::filesystem::path& path, const Waveform& w);

}  // namespace vtract
