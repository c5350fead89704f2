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

#include "vtract/cepstra.hpp"

#include <sstream>

#include "vtract/error.hpp"

namespace vtract {

FeatureSequence::FeatureSequence(std::vector<CepstralVector> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) throw Error("feature sequence: at least one frame is required");
  const std::size_t dim = frames_.front().size();
  for (const auto& f : frames_)
    if (f.size() != dim) throw Error("feature sequence: frames differ in dimension");
}

CepstralVector lpc_to_cepstrum(const PredictorPolynomial& poly, std::size_t q) {
  if (q < 1) throw Error("lpc_to_cepstrum: cepstral dimension must be at least 1");
  if (!is_minimum_phase(poly)) throw Error("lpc_to_cepstrum: polynomial is not minimum phase");
  const auto& alpha = poly.coeffs();
  const std::size_t p = alpha.size();
  CepstralVector c(q, 0.0);
  for (std::size_t n = 1; n <= q; ++n) {
    double acc = n <= p ? -alpha[n - 1] : 0.0;
    const std::size_t lo = n > p ? n - p : 1;
    for (std::size_t k = lo; k < n; ++k)
      acc -= (static_cast<double>(k) / static_cast<double>(n)) * c[k - 1] * alpha[n - k - 1];
    c[n - 1] = acc;
  }
  return c;
}

FeatureSequence extract_features(const Waveform& w, const FeatureConfig& cfg) {
  const auto frames = analysis_frames(w, cfg.analysis);
  std::vector<CepstralVector> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    const auto r = autocorrelate(f, cfg.analysis.order);
    if (!(r.values[0] > 0.0)) continue;
    out.push_back(lpc_to_cepstrum(levinson_durbin(r).polynomial, cfg.cepstral_dim));
  }
  if (out.empty()) throw Error("extract_features: waveform produced no analyzable frames");
  return FeatureSequence(std::move(out));
}

std::string features_to_csv(const FeatureSequence& seq) {
  std::ostringstream s;
  s.precision(10);
  for (std::size_t j = 0; j < seq.dimension(); ++j) s << (j ? "," : "") << 'c' << (j + 1);
  s << '\n';
  for (const auto& f : seq.frames()) {
    for (std::size_t j = 0; j < f.size(); ++j) s << (j ? "," : "") << f[j];
    s << '\n';
  }
  return s.str();
}

}  // namespace vtract
