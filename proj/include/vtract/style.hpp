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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vtract/formants.hpp"
#include "vtract/lpc.hpp"
#include "vtract/parallel.hpp"
#include "vtract/random.hpp"
#include "vtract/signals.hpp"

namespace vtract {

// Listed in the column order of the recognition tables.
enum class TalkingStyle { normal, shout, slow, loud, soft };

inline constexpr std::array<TalkingStyle, 5> kAllStyles = {
    TalkingStyle::normal, TalkingStyle::shout, TalkingStyle::slow, TalkingStyle::loud,
    TalkingStyle::soft};

const char* to_string(TalkingStyle s);
TalkingStyle parse_style(const std::string& name);
std::size_t style_index(TalkingStyle s);
// Comma-separated style names; "all" selects every style.
std::vector<TalkingStyle> parse_style_list(const std::string& list);

// How a talking style displaces the vocal-tract poles and the prosody.
struct StyleProfile {
  double angle_jitter_rad = 0.0;  // max |pole angle change|
  double radius_jitter = 0.0;     // max relative radius change
  double rate_factor = 1.0;       // duration multiplier
  double gain_factor = 1.0;

  void validate() const;
};

// Shout > Loud > Soft > Slow > Normal in angle and radius displacement.
StyleProfile default_profile(TalkingStyle s);

using ProfileTable = std::array<StyleProfile, kAllStyles.size()>;
ProfileTable default_profiles();

struct SpeakerSpec {
  std::string id;
  AreaFunction base_areas;
  double pitch_hz = 120.0;           // [60, 400]
  double intra_speaker_jitter = 0.0; // max pole-angle wobble between repetitions, rad

  void validate() const;
};

// Each conjugate pair's angle moves by a uniform draw in [-angle_jitter,
// +angle_jitter] and its radius is scaled by 1 + a uniform draw in
// [-radius_jitter, +radius_jitter]; real poles only get the radius change.
// Radii are clamped to 0.998 and angles kept inside (0, pi) so the result is
// a stable, conjugate-symmetric set in the input order.
std::vector<Pole> perturb_poles(const std::vector<Pole>& poles, const StyleProfile& profile, Rng& rng);

inline constexpr double kMaxPoleRadius = 0.998;

enum class Excitation { impulse_train, white_noise };

struct SynthesisOptions {
  Excitation excitation = Excitation::impulse_train;
  double pitch_jitter = 0.01;  // per-utterance relative f0 offset bound
  double cycle_jitter = 0.01;  // per-period relative length wobble bound
  // Source spectral tilt: the excitation passes through 1 / (1 - g z^-1).
  double glottal_pole = 0.95;
  double peak_level = 0.9;
  void validate() const;
};

// Excitation at pitch_hz (or white noise) through the source tilt and the
// all-pole filter 1/A(z). No gain or normalization is applied.
std::vector<double> render_all_pole(const PredictorPolynomial& filter, double pitch_hz, std::size_t samples,
                                    double sample_rate_hz, Rng& rng, const SynthesisOptions& options = {});

struct Utterance {
  std::string speaker_id;
  TalkingStyle style = TalkingStyle::normal;
  std::size_t repetition = 0;
  Waveform waveform;
  // The exact all-pole filter the waveform was rendered through (gain 1).
  PredictorPolynomial filter;
};

// Base tract poles -> intra-speaker wobble -> style displacement -> rebuilt
// all-pole filter driven by the excitation. Duration is scaled by the
// profile's rate factor and the output peak-normalized.
Utterance synthesize_utterance(const SpeakerSpec& speaker, TalkingStyle style,
                               const StyleProfile& profile, double duration_s,
                               double sample_rate_hz, Rng& rng, const SynthesisOptions& options = {});

// Same, with the default profile for the style.
Utterance synthesize_utterance(const SpeakerSpec& speaker, TalkingStyle style, double duration_s,
                               double sample_rate_hz, Rng& rng);

// Exact poles of a speaker's undisturbed tract.
std::vector<Pole> base_poles(const SpeakerSpec& speaker);

struct CorpusConfig {
  std::size_t speakers = 9;
  std::size_t repetitions = 9;
  std::vector<TalkingStyle> styles{kAllStyles.begin(), kAllStyles.end()};
  double sample_rate_hz = 8000.0;
  double duration_s = 0.4;
  std::uint64_t master_seed = 1;
  ProfileTable profiles = default_profiles();
  double speaker_scatter = 0.10;      // relative per-section area scatter
  double intra_speaker_jitter = 0.0;  // see SpeakerSpec
  SynthesisOptions synthesis;

  void validate() const;
};

// Nine-section vowel-like area templates the speakers are drawn around.
const std::vector<AreaFunction>& area_templates();

// Speaker i uses template i mod |templates| with every section scaled by
// 1 + U(-scatter, scatter); pitch drawn per template voice class.
std::vector<SpeakerSpec> generate_speakers(const CorpusConfig& cfg);

struct Corpus {
  CorpusConfig config;
  std::vector<SpeakerSpec> speakers;
  // Sorted by (speaker, style, repetition) with no duplicate keys.
  std::vector<Utterance> utterances;

  double sample_rate_hz() const { return config.sample_rate_hz; }
  const Utterance* find(const std::string& speaker, TalkingStyle style, std::size_t rep) const;
  std::vector<std::string> speaker_ids() const;
};

// speakers x styles x repetitions utterances. Each utterance's random stream
// is derived from (master seed, speaker, style, repetition) only.
Corpus generate_corpus(const CorpusConfig& cfg, Execution ex = Execution::parallel);

// Writes <dir>/<speaker>/<style>/<rep>.wav and <dir>/manifest.json.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
// Reads a directory written by save_corpus. Waveforms come from the WAV
// files (16-bit quantized); filters and speaker specs from the manifest.
Corpus load_corpus(const std::filesystem::path& dir);

std::string corpus_manifest_json(const Corpus& corpus);

}  // namespace vtract
