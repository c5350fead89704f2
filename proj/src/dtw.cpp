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

#include "vtract/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vtract/error.hpp"

namespace vtract {

namespace {

double euclidean(const CepstralVector& x, const CepstralVector& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

double dtw_distance(const FeatureSequence& a, const FeatureSequence& b, const DtwConfig& cfg) {
  if (a.size() == 0 || b.size() == 0) throw Error("dtw_distance: sequences must be non-empty");
  if (a.dimension() != b.dimension())
    throw Error("dtw_distance: feature dimensions differ (" + std::to_string(a.dimension()) + " vs " +
                std::to_string(b.dimension()) + ")");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t gap = n > m ? n - m : m - n;
  if (cfg.band_radius && *cfg.band_radius < gap)
    throw Error("dtw_distance: band radius " + std::to_string(*cfg.band_radius) +
                " cannot bridge a length difference of " + std::to_string(gap));

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m, inf);
  std::vector<double> cur(m, inf);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = 0;
    std::size_t hi = m - 1;
    if (cfg.band_radius) {
      const std::size_t r = *cfg.band_radius;
      lo = i > r ? i - r : 0;
      hi = std::min(m - 1, i + r);
    }
    std::fill(cur.begin(), cur.end(), inf);
    for (std::size_t j = lo; j <= hi; ++j) {
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = inf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, cur[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      }
      cur[j] = best + euclidean(a[i], b[j]);
    }
    std::swap(prev, cur);
  }
  const double total = prev[m - 1];
  return cfg.normalize ? total / static_cast<double>(n + m) : total;
}

std::vector<SpeakerScore> dtw_rank(const FeatureSequence& test, const TemplateMap& templates,
                                   const DtwConfig& cfg, Execution ex) {
  struct Slot {
    const std::string* speaker;
    const FeatureSequence* sequence;
  };
  std::vector<Slot> slots;
  for (const auto& [id, seqs] : templates)
    for (const auto& s : seqs) slots.push_back({&id, &s});
  if (slots.empty()) throw Error("dtw_identify: no templates enrolled");

  std::vector<double> dist(slots.size());
  for_each_index(slots.size(), ex,
                 [&](std::size_t i) { dist[i] = dtw_distance(test, *slots[i].sequence, cfg); });

  std::vector<SpeakerScore> ranked;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (ranked.empty() || ranked.back().speaker_id != *slots[i].speaker)
      ranked.push_back({*slots[i].speaker, dist[i]});
    else
      ranked.back().score = std::min(ranked.back().score, dist[i]);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const SpeakerScore& x, const SpeakerScore& y) { return x.score < y.score; });
  return ranked;
}

SpeakerScore dtw_identify(const FeatureSequence& test, const TemplateMap& templates,
                          const DtwConfig& cfg, Execution ex) {
  return dtw_rank(test, templates, cfg, ex).front();
}

}  // namespace vtract
