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
#include <string>
#include <vector>

#include "vtract/lpc.hpp"
#include "vtract/signals.hpp"

namespace vtract {

// c_1..c_Q of the model's log spectrum; c_0 (which carries the gain) is left
// out so the features are loudness invariant.
using CepstralVector = std::vector<double>;

// Time-ordered cepstral vectors of uniform dimension.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  // Throws Error if frames is empty or dimensions differ.
  explicit FeatureSequence(std::vector<CepstralVector> frames);

  const std::vector<CepstralVector>& frames() const { return frames_; }
  std::size_t size() const { return frames_.size(); }
  std::size_t dimension() const { return frames_.empty() ? 0 : frames_.front().size(); }
  const CepstralVector& operator[](std::size_t i) const { return frames_[i]; }

 private:
  std::vector<CepstralVector> frames_;
};

// Cepstrum of 1/A(z) with A(z) = 1 + sum alpha_i z^-i:
//   c_n = -alpha_n - sum_{k=1}^{n-1} (k/n) c_k alpha_{n-k}   (alpha_j = 0 for j > p)
// Throws Error for non-minimum-phase polynomials.
CepstralVector lpc_to_cepstrum(const PredictorPolynomial& poly, std::size_t q);

struct FeatureConfig {
  AnalysisConfig analysis;
  std::size_t cepstral_dim = 12;
};

// Per-frame LPC cepstra over the whole waveform. Frames with no energy are
// skipped. Throws Error if no frame survives.
FeatureSequence extract_features(const Waveform& w, const FeatureConfig& cfg);

// One frame per row, "c1,...,cQ" header.
std::string features_to_csv(const FeatureSequence& seq);

}  // namespace vtract
