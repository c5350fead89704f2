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
#include <span>
#include <vector>

namespace vtract {

// Sampled audio. Samples are nominally in [-1, 1].
class Waveform {
 public:
  // Throws Error unless sample_rate_hz > 0, samples is non-empty and finite.
  Waveform(std::vector<double> samples, double sample_rate_hz);

  std::span<const double> samples() const { return samples_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t size() const { return samples_.size(); }
  double duration_s() const { return static_cast<double>(samples_.size()) / sample_rate_hz_; }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_;
};

struct Frame {
  std::vector<double> samples;
  std::size_t start_index = 0;
};

// r[0..p], lag 0 first. Biased and unnormalized.
struct AutocorrSequence {
  std::vector<double> values;

  std::size_t max_lag() const { return values.empty() ? 0 : values.size() - 1; }
};

// Front-end settings shared by formant analysis and feature extraction.
struct AnalysisConfig {
  double frame_ms = 30.0;
  double hop_ms = 10.0;
  double preemphasis = 0.95;
  std::size_t order = 8;

  std::size_t frame_length(double sample_rate_hz) const;
  std::size_t hop_length(double sample_rate_hz) const;
  void validate() const;
};

// out[n] = in[n] - coeff * in[n-1], out[0] = in[0]. Requires 0 <= coeff < 1,
// except that coeff == 1 is accepted as plain first differencing.
Waveform pre_emphasize(const Waveform& w, double coeff);

// Frames at offsets 0, hop, 2*hop, ...; a trailing partial frame is dropped.
std::vector<Frame> frame(const Waveform& w, std::size_t frame_len, std::size_t hop);

// Multiplies by 0.54 - 0.46 cos(2 pi n / (N - 1)). Requires N >= 2.
Frame window_hamming(const Frame& f);

// r[k] = sum_n x[n] x[n+k] for k = 0..max_lag. Requires max_lag < frame length.
AutocorrSequence autocorrelate(std::span<const double> x, std::size_t max_lag);
inline AutocorrSequence autocorrelate(const Frame& f, std::size_t max_lag) {
  return autocorrelate(f.samples, max_lag);
}

// Pre-emphasis, framing and Hamming windowing in one pass.
std::vector<Frame> analysis_frames(const Waveform& w, const AnalysisConfig& cfg);

}  // namespace vtract
