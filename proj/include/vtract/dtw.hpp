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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vtract/cepstra.hpp"
#include "vtract/parallel.hpp"

namespace vtract {

struct DtwConfig {
  // Sakoe-Chiba radius |i - j| <= band_radius; disabled when empty.
  std::optional<std::size_t> band_radius;
  // Divide the accumulated cost by (len_a + len_b).
  bool normalize = true;
};

// Minimum accumulated Euclidean frame distance over monotone paths from the
// first to the last frame pair with steps (1,0), (0,1), (1,1). Throws Error on
// dimension mismatch or when the band cannot reach the end cell.
double dtw_distance(const FeatureSequence& a, const FeatureSequence& b, const DtwConfig& cfg = {});

using TemplateMap = std::map<std::string, std::vector<FeatureSequence>>;

struct SpeakerScore {
  std::string speaker_id;
  double score;
};

// Best (minimum) template distance per speaker, ascending by score with ties
// broken by speaker id. Template distances are computed in parallel and
// reduced in a fixed order.
std::vector<SpeakerScore> dtw_rank(const FeatureSequence& test, const TemplateMap& templates,
                                   const DtwConfig& cfg = {}, Execution ex = Execution::serial);

// Speaker owning the nearest template. Throws Error if templates is empty.
SpeakerScore dtw_identify(const FeatureSequence& test, const TemplateMap& templates,
                          const DtwConfig& cfg = {}, Execution ex = Execution::serial);

}  // namespace vtract
