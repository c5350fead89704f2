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

#include "vtract/signals.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vtract/error.hpp"

namespace vtract {

Waveform::Waveform(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
    throw Error("waveform: sample rate must be positive and finite");
  if (samples_.empty()) throw Error("waveform: at least one sample is required");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i]))
      throw Error("waveform: non-finite sample at index " + std::to_string(i));
  }
}

std::size_t AnalysisConfig::frame_length(double sample_rate_hz) const {
  return static_cast<std::size_t>(std::lround(frame_ms * 1e-3 * sample_rate_hz));
}

std::size_t AnalysisConfig::hop_length(double sample_rate_hz) const {
  return static_cast<std::size_t>(std::lround(hop_ms * 1e-3 * sample_rate_hz));
}

void AnalysisConfig::validate() const {
  if (!(frame_ms > 0.0)) throw Error("analysis: frame length must be positive");
  if (!(hop_ms > 0.0)) throw Error("analysis: hop must be positive");
  if (!(preemphasis >= 0.0 && preemphasis < 1.0))
    throw Error("analysis: pre-emphasis coefficient must lie in [0, 1)");
  if (order < 1) throw Error("analysis: model order must be at least 1");
}

Waveform pre_emphasize(const Waveform& w, double coeff) {
  if (!(coeff >= 0.0 && coeff <= 1.0))
    throw Error("pre_emphasize: coefficient must lie in [0, 1)");
  const auto x = w.samples();
  std::vector<double> y(x.size());
  y[0] = x[0];
  for (std::size_t n = 1; n < x.size(); ++n) y[n] = x[n] - coeff * x[n - 1];
  return Waveform(std::move(y), w.sample_rate_hz());
}

std::vector<Frame> frame(const Waveform& w, std::size_t frame_len, std::size_t hop) {
  if (frame_len < 1 || hop < 1) throw Error("frame: frame length and hop must be at least 1");
  std::vector<Frame> frames;
  const auto x = w.samples();
  if (x.size() < frame_len) return frames;
  const std::size_t count = (x.size() - frame_len) / hop + 1;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * hop;
    frames.push_back(Frame{{x.begin() + start, x.begin() + start + frame_len}, start});
  }
  return frames;
}

Frame window_hamming(const Frame& f) {
  const std::size_t n = f.samples.size();
  if (n < 2) throw Error("window_hamming: frame must hold at least 2 samples");
  Frame out{f.samples, f.start_index};
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] *= 0.54 - 0.46 * std::cos(step * static_cast<double>(i));
  return out;
}

AutocorrSequence autocorrelate(std::span<const double> x, std::size_t max_lag) {
  if (max_lag >= x.size())
    throw Error("autocorrelate: max lag " + std::to_string(max_lag) +
                " must be below frame length " + std::to_string(x.size()));
  AutocorrSequence r;
  r.values.assign(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t n = 0; n + k < x.size(); ++n) acc += x[n] * x[n + k];
    r.values[k] = acc;
  }
  return r;
}

std::vector<Frame> analysis_frames(const Waveform& w, const AnalysisConfig& cfg) {
  cfg.validate();
  const Waveform emphasized = pre_emphasize(w, cfg.preemphasis);
  auto frames = frame(emphasized, cfg.frame_length(w.sample_rate_hz()),
                      cfg.hop_length(w.sample_rate_hz()));
  for (auto& f : frames) f = window_hamming(f);
  return frames;
}

}  // namespace vtract
