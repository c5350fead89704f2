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

#include "vtract/style.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "vtract/error.hpp"
#include "vtract/fileio.hpp"
#include "vtract/wav.hpp"
#include "json.hpp"

namespace vtract {

namespace {

constexpr double kMinAngle = 1e-3;

struct VoiceTemplate {
  // Resonances (Hz, bandwidth Hz) at the reference rate of 8 kHz.
  std::array<std::pair<double, double>, 4> resonances;
  double pitch_lo_hz;
  double pitch_hi_hz;
};

// One vowel spoken by three voice classes (an adult male and two adult
// female tracts), each in three tract variants whose resonances are scaled
// by kVariantScale.
constexpr std::array<double, 3> kVariantScale = {0.94, 1.0, 1.06};

const std::vector<VoiceTemplate>& voice_templates() {
  static const std::vector<VoiceTemplate> table = [] {
    const std::array<VoiceTemplate, 3> classes = {{
        {{{{700.0, 80.0}, {1150.0, 90.0}, {2450.0, 120.0}, {3350.0, 160.0}}}, 95.0, 140.0},
        {{{{820.0, 90.0}, {1350.0, 100.0}, {2750.0, 130.0}, {3650.0, 170.0}}}, 180.0, 240.0},
        {{{{760.0, 85.0}, {1550.0, 100.0}, {2600.0, 130.0}, {3500.0, 170.0}}}, 190.0, 250.0},
    }};
    std::vector<VoiceTemplate> out;
    for (double scale : kVariantScale) {
      for (auto t : classes) {
        for (auto& [f, b] : t.resonances) f = std::min(f * scale, 3800.0);
        out.push_back(t);
      }
    }
    return out;
  }();
  return table;
}

AreaFunction template_areas(const VoiceTemplate& t) {
  constexpr double fs = 8000.0;
  std::vector<Pole> poles;
  for (const auto& [f, b] : t.resonances) {
    const Pole p = Pole::polar(std::exp(-std::numbers::pi * b / fs), 2.0 * std::numbers::pi * f / fs);
    poles.push_back(p);
    poles.push_back(p.conj());
  }
  const auto k = predictor_to_reflection(polynomial_from_poles(poles));
  // Glottis-side area 1 cm^2; areas are only meaningful as ratios.
  return reflection_to_area(k, 1.0);
}

double clamp_angle(double theta) { return std::clamp(theta, kMinAngle, std::numbers::pi - kMinAngle); }

}  // namespace

const char* to_string(TalkingStyle s) {
  switch (s) {
    case TalkingStyle::normal: return "normal";
    case TalkingStyle::shout: return "shout";
    case TalkingStyle::slow: return "slow";
    case TalkingStyle::loud: return "loud";
    case TalkingStyle::soft: return "soft";
  }
  return "?";
}

TalkingStyle parse_style(const std::string& name) {
  for (auto s : kAllStyles)
    if (name == to_string(s)) return s;
  throw Error("unknown talking style '" + name + "' (expected normal, shout, slow, loud or soft)");
}

std::size_t style_index(TalkingStyle s) { return static_cast<std::size_t>(s); }

std::vector<TalkingStyle> parse_style_list(const std::string& list) {
  if (list == "all") return {kAllStyles.begin(), kAllStyles.end()};
  std::vector<TalkingStyle> out;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto s = parse_style(item);
    if (std::find(out.begin(), out.end(), s) != out.end())
      throw Error("style '" + item + "' listed twice");
    out.push_back(s);
  }
  if (out.empty()) throw Error("style list is empty");
  std::sort(out.begin(), out.end());
  return out;
}

void StyleProfile::validate() const {
  if (!(angle_jitter_rad >= 0.0)) throw Error("style profile: angle jitter must be non-negative");
  if (!(radius_jitter >= 0.0 && radius_jitter < 1.0))
    throw Error("style profile: radius jitter must lie in [0, 1)");
  if (!(rate_factor > 0.0)) throw Error("style profile: rate factor must be positive");
  if (!(gain_factor > 0.0)) throw Error("style profile: gain factor must be positive");
}

StyleProfile default_profile(TalkingStyle s) {
  switch (s) {
    case TalkingStyle::normal: return {0.0, 0.0, 1.0, 1.0};
    case TalkingStyle::shout: return {0.12, 0.06, 0.9, 2.5};
    case TalkingStyle::slow: return {0.015, 0.01, 1.5, 1.0};
    case TalkingStyle::loud: return {0.08, 0.04, 0.95, 1.8};
    case TalkingStyle::soft: return {0.03, 0.02, 1.0, 0.6};
  }
  throw Error("default_profile: unknown style");
}

ProfileTable default_profiles() {
  ProfileTable t;
  for (auto s : kAllStyles) t[style_index(s)] = default_profile(s);
  return t;
}

void SpeakerSpec::validate() const {
  if (id.empty()) throw Error("speaker: id must be non-empty");
  if (!(pitch_hz >= 60.0 && pitch_hz <= 400.0))
    throw Error("speaker " + id + ": pitch must lie in [60, 400] Hz");
  if (!(intra_speaker_jitter >= 0.0)) throw Error("speaker " + id + ": jitter must be non-negative");
}

std::vector<Pole> perturb_poles(const std::vector<Pole>& poles, const StyleProfile& profile, Rng& rng) {
  profile.validate();
  std::vector<Pole> out(poles.size());
  std::vector<bool> done(poles.size(), false);

  // Upper-half and real poles draw in input order; lower-half poles are
  // paired with the closest unmatched upper partner and mirrored.
  std::vector<std::size_t> uppers;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const Pole& p = poles[i];
    if (!(p.radius() < 1.0)) throw Error("perturb_poles: input pole outside the unit circle");
    if (p.imag < 0.0) continue;
    const double dtheta = rng.uniform(-profile.angle_jitter_rad, profile.angle_jitter_rad);
    const double dr = rng.uniform(-profile.radius_jitter, profile.radius_jitter);
    const double radius = std::min(p.radius() * (1.0 + dr), kMaxPoleRadius);
    if (p.imag == 0.0) {
      out[i] = {p.real >= 0.0 ? radius : -radius, 0.0};
    } else {
      out[i] = Pole::polar(radius, clamp_angle(p.angle_rad() + dtheta));
      uppers.push_back(i);
    }
    done[i] = true;
  }
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (done[i]) continue;
    std::size_t best = poles.size();
    double best_d = 0.0;
    for (std::size_t u : uppers) {
      if (used[u]) continue;
      const double d = std::abs(poles[u].conj().z() - poles[i].z());
      if (best == poles.size() || d < best_d) {
        best = u;
        best_d = d;
      }
    }
    if (best == poles.size()) throw Error("perturb_poles: pole set is not conjugate symmetric");
    used[best] = true;
    out[i] = out[best].conj();
  }
  return out;
}

std::vector<Pole> base_poles(const SpeakerSpec& speaker) {
  return polynomial_roots(reflection_to_predictor(area_to_reflection(speaker.base_areas)));
}

std::vector<double> render_all_pole(const PredictorPolynomial& filter, double pitch_hz, std::size_t samples,
                                    double sample_rate_hz, Rng& rng, const SynthesisOptions& options) {
  if (!(pitch_hz > 0.0)) throw Error("render_all_pole: pitch must be positive");
  if (!(sample_rate_hz > 0.0)) throw Error("render_all_pole: sample rate must be positive");
  options.validate();
  std::vector<double> x(samples, 0.0);
  if (options.excitation == Excitation::impulse_train) {
    const double f0 = pitch_hz * (1.0 + rng.uniform(-options.pitch_jitter, options.pitch_jitter));
    const double period = sample_rate_hz / f0;
    double t = 0.0;
    while (true) {
      const auto idx = static_cast<std::size_t>(std::lround(t));
      if (idx >= samples) break;
      x[idx] = 1.0;
      t += period * (1.0 + rng.uniform(-options.cycle_jitter, options.cycle_jitter));
    }
  } else {
    for (auto& v : x) v = rng.gaussian();
  }
  for (std::size_t i = 1; i < samples; ++i) x[i] += options.glottal_pole * x[i - 1];

  const auto& alpha = filter.coeffs();
  std::vector<double> y(samples, 0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    double acc = x[i];
    for (std::size_t j = 1; j <= alpha.size() && j <= i; ++j) acc -= alpha[j - 1] * y[i - j];
    y[i] = acc;
  }
  return y;
}

void SynthesisOptions::validate() const {
  if (!(pitch_jitter >= 0.0 && pitch_jitter < 1.0)) throw Error("synthesis: pitch jitter must lie in [0, 1)");
  if (!(cycle_jitter >= 0.0 && cycle_jitter < 1.0)) throw Error("synthesis: cycle jitter must lie in [0, 1)");
  if (!(glottal_pole >= 0.0 && glottal_pole < 1.0)) throw Error("synthesis: glottal pole must lie in [0, 1)");
  if (!(peak_level > 0.0)) throw Error("synthesis: peak level must be positive");
}

Utterance synthesize_utterance(const SpeakerSpec& speaker, TalkingStyle style,
                               const StyleProfile& profile, double duration_s,
                               double sample_rate_hz, Rng& rng, const SynthesisOptions& options) {
  speaker.validate();
  profile.validate();
  if (!(duration_s > 0.0)) throw Error("synthesize_utterance: duration must be positive");
  if (!(sample_rate_hz > 0.0)) throw Error("synthesize_utterance: sample rate must be positive");

  auto poles = base_poles(speaker);
  if (speaker.intra_speaker_jitter > 0.0) {
    const StyleProfile wobble{speaker.intra_speaker_jitter, 0.5 * speaker.intra_speaker_jitter, 1.0, 1.0};
    poles = perturb_poles(poles, wobble, rng);
  }
  poles = perturb_poles(poles, profile, rng);
  PredictorPolynomial filter = polynomial_from_poles(poles);

  const auto n = static_cast<std::size_t>(
      std::max(1L, std::lround(duration_s * profile.rate_factor * sample_rate_hz)));
  auto y = render_all_pole(filter, speaker.pitch_hz, n, sample_rate_hz, rng, options);
  double peak = 0.0;
  for (auto& v : y) {
    v *= profile.gain_factor;
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 0.0)
    for (auto& v : y) v *= options.peak_level / peak;

  return Utterance{speaker.id, style, 0, Waveform(std::move(y), sample_rate_hz), std::move(filter)};
}

Utterance synthesize_utterance(const SpeakerSpec& speaker, TalkingStyle style, double duration_s,
                               double sample_rate_hz, Rng& rng) {
  return synthesize_utterance(speaker, style, default_profile(style), duration_s, sample_rate_hz, rng);
}

void CorpusConfig::validate() const {
  if (speakers < 1) throw Error("corpus: need at least one speaker");
  if (repetitions < 1) throw Error("corpus: need at least one repetition");
  if (styles.empty()) throw Error("corpus: need at least one style");
  if (!(sample_rate_hz > 0.0)) throw Error("corpus: sample rate must be positive");
  if (!(duration_s > 0.0)) throw Error("corpus: duration must be positive");
  if (!(speaker_scatter >= 0.0 && speaker_scatter < 1.0))
    throw Error("corpus: speaker scatter must lie in [0, 1)");
  if (!(intra_speaker_jitter >= 0.0)) throw Error("corpus: intra-speaker jitter must be non-negative");
  for (const auto& p : profiles) p.validate();
  synthesis.validate();
}

const std::vector<AreaFunction>& area_templates() {
  static const std::vector<AreaFunction> templates = [] {
    std::vector<AreaFunction> t;
    for (const auto& v : voice_templates()) t.push_back(template_areas(v));
    return t;
  }();
  return templates;
}

std::vector<SpeakerSpec> generate_speakers(const CorpusConfig& cfg) {
  std::vector<SpeakerSpec> out;
  const auto& templates = area_templates();
  for (std::size_t i = 0; i < cfg.speakers; ++i) {
    Rng rng(derive_seed(cfg.master_seed, {0x5350'4b52ULL, i}));
    const std::size_t t = i % templates.size();
    std::vector<double> areas = templates[t].areas();
    for (auto& a : areas) a *= 1.0 + rng.uniform(-cfg.speaker_scatter, cfg.speaker_scatter);
    const auto& voice = voice_templates()[t];
    char id[32];
    std::snprintf(id, sizeof id, "spk%02zu", i + 1);
    out.push_back(SpeakerSpec{id, AreaFunction(std::move(areas)),
                              rng.uniform(voice.pitch_lo_hz, voice.pitch_hi_hz), cfg.intra_speaker_jitter});
  }
  return out;
}

const Utterance* Corpus::find(const std::string& speaker, TalkingStyle style, std::size_t rep) const {
  const auto it = std::lower_bound(
      utterances.begin(), utterances.end(), std::make_tuple(speaker, style, rep),
      [](const Utterance& u, const std::tuple<std::string, TalkingStyle, std::size_t>& key) {
        return std::tie(u.speaker_id, u.style, u.repetition) < key;
      });
  if (it == utterances.end() || it->speaker_id != speaker || it->style != style || it->repetition != rep)
    return nullptr;
  return &*it;
}

std::vector<std::string> Corpus::speaker_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : speakers) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

Corpus generate_corpus(const CorpusConfig& cfg, Execution ex) {
  cfg.validate();
  Corpus corpus;
  corpus.config = cfg;
  std::sort(corpus.config.styles.begin(), corpus.config.styles.end());
  corpus.config.styles.erase(std::unique(corpus.config.styles.begin(), corpus.config.styles.end()),
                             corpus.config.styles.end());
  corpus.speakers = generate_speakers(cfg);

  struct Job {
    std::size_t speaker;
    TalkingStyle style;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < corpus.speakers.size(); ++s)
    for (auto st : corpus.config.styles)
      for (std::size_t r = 0; r < cfg.repetitions; ++r) jobs.push_back({s, st, r});

  std::vector<std::optional<Utterance>> slots(jobs.size());
  for_each_index(jobs.size(), ex, [&](std::size_t i) {
    const Job& job = jobs[i];
    Rng rng(derive_seed(cfg.master_seed, {0x5554'5452ULL, job.speaker, style_index(job.style), job.rep}));
    Utterance u = synthesize_utterance(corpus.speakers[job.speaker], job.style,
                                       cfg.profiles[style_index(job.style)], cfg.duration_s,
                                       cfg.sample_rate_hz, rng, cfg.synthesis);
    u.repetition = job.rep;
    slots[i] = std::move(u);
  });
  corpus.utterances.reserve(jobs.size());
  for (auto& s : slots) corpus.utterances.push_back(std::move(*s));
  std::stable_sort(corpus.utterances.begin(), corpus.utterances.end(),
                   [](const Utterance& a, const Utterance& b) {
                     return std::tie(a.speaker_id, a.style, a.repetition) <
                            std::tie(b.speaker_id, b.style, b.repetition);
                   });
  return corpus;
}

namespace {

using nlohmann::ordered_json;

ordered_json profile_json(const StyleProfile& p) {
  return {{"angle_jitter_rad", p.angle_jitter_rad},
          {"radius_jitter", p.radius_jitter},
          {"rate_factor", p.rate_factor},
          {"gain_factor", p.gain_factor}};
}

std::string utterance_path(const Utterance& u) {
  return u.speaker_id + "/" + to_string(u.style) + "/" + std::to_string(u.repetition) + ".wav";
}

}  // namespace

std::string corpus_manifest_json(const Corpus& corpus) {
  const auto& cfg = corpus.config;
  ordered_json j;
  j["format"] = "vtract-corpus-1";
  j["master_seed"] = cfg.master_seed;
  j["sample_rate_hz"] = cfg.sample_rate_hz;
  j["duration_s"] = cfg.duration_s;
  j["speaker_count"] = cfg.speakers;
  j["repetitions"] = cfg.repetitions;
  j["styles"] = ordered_json::array();
  for (auto s : cfg.styles) j["styles"].push_back(to_string(s));
  j["speaker_scatter"] = cfg.speaker_scatter;
  j["intra_speaker_jitter"] = cfg.intra_speaker_jitter;
  j["synthesis"] = {{"excitation", cfg.synthesis.excitation == Excitation::impulse_train ? "impulse_train" : "white_noise"},
                    {"pitch_jitter", cfg.synthesis.pitch_jitter},
                    {"cycle_jitter", cfg.synthesis.cycle_jitter},
                    {"glottal_pole", cfg.synthesis.glottal_pole},
                    {"peak_level", cfg.synthesis.peak_level}};
  ordered_json profiles;
  for (auto s : kAllStyles) profiles[to_string(s)] = profile_json(cfg.profiles[style_index(s)]);
  j["profiles"] = profiles;
  j["speakers"] = ordered_json::array();
  for (const auto& s : corpus.speakers)
    j["speakers"].push_back({{"id", s.id},
                             {"base_areas", s.base_areas.areas()},
                             {"pitch_hz", s.pitch_hz},
                             {"intra_speaker_jitter", s.intra_speaker_jitter}});
  j["utterances"] = ordered_json::array();
  for (const auto& u : corpus.utterances)
    j["utterances"].push_back({{"speaker", u.speaker_id},
                               {"style", to_string(u.style)},
                               {"repetition", u.repetition},
                               {"path", utterance_path(u)},
                               {"samples", u.waveform.size()},
                               {"filter", u.filter.coeffs()}});
  return j.dump(2) + "\n";
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  for (const auto& u : corpus.utterances) write_wav(dir / utterance_path(u), u.waveform);
  write_file_atomic(dir / "manifest.json", corpus_manifest_json(corpus));
}

Corpus load_corpus(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(manifest_path.string() + ": " + e.what());
  }
  try {
    Corpus c;
    auto& cfg = c.config;
    if (j.at("format") != "vtract-corpus-1") throw Error("unsupported manifest format");
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    cfg.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    cfg.duration_s = j.at("duration_s").get<double>();
    cfg.speakers = j.at("speaker_count").get<std::size_t>();
    cfg.repetitions = j.at("repetitions").get<std::size_t>();
    cfg.styles.clear();
    for (const auto& s : j.at("styles")) cfg.styles.push_back(parse_style(s.get<std::string>()));
    cfg.speaker_scatter = j.at("speaker_scatter").get<double>();
    cfg.intra_speaker_jitter = j.at("intra_speaker_jitter").get<double>();
    const auto& syn = j.at("synthesis");
    cfg.synthesis.excitation =
        syn.at("excitation") == "white_noise" ? Excitation::white_noise : Excitation::impulse_train;
    cfg.synthesis.pitch_jitter = syn.at("pitch_jitter").get<double>();
    cfg.synthesis.cycle_jitter = syn.at("cycle_jitter").get<double>();
    cfg.synthesis.glottal_pole = syn.at("glottal_pole").get<double>();
    cfg.synthesis.peak_level = syn.at("peak_level").get<double>();
    for (auto s : kAllStyles) {
      const auto& p = j.at("profiles").at(to_string(s));
      cfg.profiles[style_index(s)] = {p.at("angle_jitter_rad").get<double>(), p.at("radius_jitter").get<double>(),
                                      p.at("rate_factor").get<double>(), p.at("gain_factor").get<double>()};
    }
    for (const auto& s : j.at("speakers"))
      c.speakers.push_back(SpeakerSpec{s.at("id").get<std::string>(),
                                       AreaFunction(s.at("base_areas").get<std::vector<double>>()),
                                       s.at("pitch_hz").get<double>(),
                                       s.at("intra_speaker_jitter").get<double>()});
    for (const auto& u : j.at("utterances")) {
      Waveform w = read_wav(dir / u.at("path").get<std::string>());
      if (std::abs(w.sample_rate_hz() - cfg.sample_rate_hz) > 0.5)
        throw Error(u.at("path").get<std::string>() + ": sample rate differs from manifest");
      c.utterances.push_back(Utterance{u.at("speaker").get<std::string>(),
                                       parse_style(u.at("style").get<std::string>()),
                                       u.at("repetition").get<std::size_t>(), std::move(w),
                                       PredictorPolynomial(u.at("filter").get<std::vector<double>>())});
    }
    std::sort(c.utterances.begin(), c.utterances.end(), [](const Utterance& a, const Utterance& b) {
      return std::tie(a.speaker_id, a.style, a.repetition) < std::tie(b.speaker_id, b.style, b.repetition);
    });
    for (std::size_t i = 1; i < c.utterances.size(); ++i) {
      const auto& a = c.utterances[i - 1];
      const auto& b = c.utterances[i];
      if (a.speaker_id == b.speaker_id && a.style == b.style && a.repetition == b.repetition)
        throw Error("duplicate utterance " + utterance_path(b));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(manifest_path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(manifest_path.string() + ": " + e.what());
  }
}

}  // namespace vtract
