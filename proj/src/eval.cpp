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

#include "vtract/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "vtract/error.hpp"
#include "vtract/fileio.hpp"
#include "vtract/lpc.hpp"

namespace vtract {

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kCodebookStream = 0x4342'4f4fULL;
constexpr std::uint64_t kModelStream = 0x484d'4d53ULL;

std::set<std::string> ids_with(const Corpus& corpus, TalkingStyle style,
                               const std::vector<std::size_t>& reps) {
  std::set<std::string> out;
  for (const auto& id : corpus.speaker_ids()) {
    bool all = true;
    for (auto r : reps) all = all && corpus.find(id, style, r) != nullptr;
    if (all) out.insert(id);
  }
  return out;
}

ordered_json feature_json(const FeatureConfig& f) {
  return {{"frame_ms", f.analysis.frame_ms},
          {"hop_ms", f.analysis.hop_ms},
          {"preemphasis", f.analysis.preemphasis},
          {"order", f.analysis.order},
          {"cepstral_dim", f.cepstral_dim}};
}

FeatureConfig feature_from_json(const nlohmann::json& j) {
  FeatureConfig f;
  f.analysis.frame_ms = j.at("frame_ms").get<double>();
  f.analysis.hop_ms = j.at("hop_ms").get<double>();
  f.analysis.preemphasis = j.at("preemphasis").get<double>();
  f.analysis.order = j.at("order").get<std::size_t>();
  f.cepstral_dim = j.at("cepstral_dim").get<std::size_t>();
  return f;
}

ordered_json dtw_json(const DtwConfig& d) {
  ordered_json j;
  j["step_pattern"] = "symmetric1";
  if (d.band_radius) j["band_radius"] = *d.band_radius;
  else j["band_radius"] = nullptr;
  j["normalize"] = d.normalize;
  return j;
}

DtwConfig dtw_from_json(const nlohmann::json& j) {
  DtwConfig d;
  if (!j.at("band_radius").is_null()) d.band_radius = j.at("band_radius").get<std::size_t>();
  d.normalize = j.at("normalize").get<bool>();
  return d;
}

}  // namespace

const char* to_string(Recognizer r) { return r == Recognizer::dtw ? "dtw" : "hmm"; }

Recognizer parse_recognizer(const std::string& name) {
  if (name == "dtw") return Recognizer::dtw;
  if (name == "hmm") return Recognizer::hmm;
  throw Error("unknown recognizer '" + name + "' (expected dtw or hmm)");
}

void ExperimentConfig::validate() const {
  if (train_repetitions.empty()) throw Error("experiment: no training repetitions");
  if (test_repetitions.empty()) throw Error("experiment: no test repetitions");
  if (!allow_overlap) {
    for (auto r : test_repetitions)
      if (std::find(train_repetitions.begin(), train_repetitions.end(), r) != train_repetitions.end())
        throw Error("experiment: repetition " + std::to_string(r) + " is in both train and test sets");
  }
  features.analysis.validate();
  if (features.cepstral_dim < 1) throw Error("experiment: cepstral dimension must be at least 1");
  if (hmm.states < 1 || hmm.symbols < 1) throw Error("experiment: HMM needs at least one state and symbol");
}

const StyleResult& StyleReport::at(TalkingStyle s) const {
  for (const auto& r : styles)
    if (r.style == s) return r;
  throw Error(std::string("report has no row for style ") + to_string(s));
}

TrainedRecognizer train_recognizer(const Corpus& corpus, const ExperimentConfig& cfg) {
  cfg.validate();
  const auto ids = corpus.speaker_ids();
  if (ids.empty()) throw Error("experiment: corpus has no speakers");
  const auto have = ids_with(corpus, TalkingStyle::normal, cfg.train_repetitions);
  for (const auto& id : ids)
    if (!have.count(id)) throw Error("experiment: speaker " + id + " lacks Normal-style training repetitions");

  TrainedRecognizer rec;
  rec.kind = cfg.recognizer;
  rec.features = cfg.features;
  rec.dtw = cfg.dtw;

  struct Job {
    std::size_t speaker;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < ids.size(); ++s)
    for (auto r : cfg.train_repetitions) jobs.push_back({s, r});
  std::vector<FeatureSequence> feats(jobs.size());
  for_each_index(jobs.size(), cfg.execution, [&](std::size_t i) {
    const auto* u = corpus.find(ids[jobs[i].speaker], TalkingStyle::normal, jobs[i].rep);
    feats[i] = extract_features(u->waveform, cfg.features);
  });

  if (cfg.recognizer == Recognizer::dtw) {
    for (std::size_t i = 0; i < jobs.size(); ++i) rec.templates[ids[jobs[i].speaker]].push_back(feats[i]);
    return rec;
  }

  std::vector<CepstralVector> pool;
  for (const auto& f : feats) pool.insert(pool.end(), f.frames().begin(), f.frames().end());
  Rng cb_rng(derive_seed(cfg.master_seed, {kCodebookStream}));
  rec.codebook = train_codebook(pool, cfg.hmm.symbols, cb_rng).codebook;

  std::vector<HmmModel> models(ids.size());
  for_each_index(ids.size(), cfg.execution, [&](std::size_t s) {
    std::vector<ObservationSequence> obs;
    for (std::size_t i = 0; i < jobs.size(); ++i)
      if (jobs[i].speaker == s) obs.push_back(quantize(feats[i], rec.codebook));
    Rng rng(derive_seed(cfg.master_seed, {kModelStream, s}));
    models[s] = baum_welch_train(obs, cfg.hmm, rng).model;
  });
  for (std::size_t s = 0; s < ids.size(); ++s) rec.models[ids[s]] = std::move(models[s]);
  return rec;
}

std::vector<RankedSpeaker> rank_speakers(const TrainedRecognizer& rec, const Waveform& w, Execution ex) {
  const FeatureSequence feats = extract_features(w, rec.features);
  std::vector<RankedSpeaker> out;
  if (rec.kind == Recognizer::dtw) {
    for (const auto& s : dtw_rank(feats, rec.templates, rec.dtw, ex)) out.push_back({s.speaker_id, s.score});
  } else {
    for (const auto& s : hmm_rank(quantize(feats, rec.codebook), rec.models, ex))
      out.push_back({s.speaker_id, s.log_likelihood});
  }
  return out;
}

StyleReport run_experiment(const Corpus& corpus, const ExperimentConfig& cfg) {
  const TrainedRecognizer rec = train_recognizer(corpus, cfg);
  StyleReport report;
  report.speakers = corpus.speaker_ids();
  const auto& ids = report.speakers;

  std::vector<const Utterance*> tests;
  for (const auto& u : corpus.utterances)
    if (std::find(cfg.test_repetitions.begin(), cfg.test_repetitions.end(), u.repetition) !=
        cfg.test_repetitions.end())
      tests.push_back(&u);

  std::vector<std::string> predicted(tests.size());
  for_each_index(tests.size(), cfg.execution, [&](std::size_t i) {
    predicted[i] = rank_speakers(rec, tests[i]->waveform, Execution::serial).front().speaker_id;
  });

  std::vector<DisplacementRow> displacement;
  if (cfg.with_displacement)
    displacement = displacement_summary(corpus, cfg.features.analysis, cfg.formant_filter, cfg.execution);

  auto index_of = [&](const std::string& id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  for (auto style : corpus.config.styles) {
    StyleResult r;
    r.style = style;
    r.confusion.assign(ids.size(), std::vector<std::size_t>(ids.size(), 0));
    for (std::size_t i = 0; i < tests.size(); ++i) {
      if (tests[i]->style != style) continue;
      ++r.total;
      if (predicted[i] == tests[i]->speaker_id) ++r.correct;
      ++r.confusion[index_of(tests[i]->speaker_id)][index_of(predicted[i])];
    }
    r.rate = r.total ? static_cast<double>(r.correct) / static_cast<double>(r.total) : 0.0;
    for (const auto& d : displacement)
      if (d.style == style) r.mean_displacement = d.mean_displacement;
    report.styles.push_back(std::move(r));
  }
  return report;
}

LevinsonResult utterance_lpc(const Waveform& w, const AnalysisConfig& analysis) {
  auto frames = analysis_frames(w, analysis);
  if (frames.empty()) throw Error("utterance is shorter than one analysis frame");
  const std::size_t quarter = frames.size() / 4;
  std::vector<Frame> central(frames.begin() + static_cast<std::ptrdiff_t>(quarter),
                             frames.end() - static_cast<std::ptrdiff_t>(quarter));
  return lpc_from_frames(central, analysis.order);
}

FormantSet utterance_formants(const Waveform& w, const AnalysisConfig& analysis,
                              const FormantFilterConfig& filter) {
  return extract_formants(utterance_lpc(w, analysis).polynomial, w.sample_rate_hz(), filter);
}

std::vector<DisplacementRow> displacement_summary(const Corpus& corpus, const AnalysisConfig& analysis,
                                                  const FormantFilterConfig& filter, Execution ex) {
  if (corpus.utterances.empty()) throw Error("displacement_summary: corpus is empty");
  std::vector<FormantSet> sets(corpus.utterances.size());
  for_each_index(corpus.utterances.size(), ex, [&](std::size_t i) {
    sets[i] = utterance_formants(corpus.utterances[i].waveform, analysis, filter);
  });

  std::map<std::string, FormantSet> baseline;
  for (const auto& id : corpus.speaker_ids()) {
    std::vector<const FormantSet*> normals;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& u = corpus.utterances[i];
      if (u.speaker_id != id || u.style != TalkingStyle::normal) continue;
      if (sets[i].empty())
        throw Error("displacement_summary: Normal utterance " + std::to_string(u.repetition) + " of " + id +
                    " yields no formants");
      normals.push_back(&sets[i]);
    }
    if (normals.empty()) throw Error("displacement_summary: speaker " + id + " has no Normal utterances");
    std::size_t shared = normals.front()->size();
    for (const auto* s : normals) shared = std::min(shared, s->size());
    FormantSet mean;
    mean.sample_rate_hz = corpus.sample_rate_hz();
    mean.formants.assign(shared, Formant{});
    for (const auto* s : normals)
      for (std::size_t k = 0; k < shared; ++k) {
        mean.formants[k].frequency_hz += s->formants[k].frequency_hz / static_cast<double>(normals.size());
        mean.formants[k].bandwidth_hz += s->formants[k].bandwidth_hz / static_cast<double>(normals.size());
      }
    baseline[id] = std::move(mean);
  }

  std::vector<DisplacementRow> rows;
  for (auto style : corpus.config.styles) {
    DisplacementRow row;
    row.style = style;
    double bw_sum = 0.0;
    std::size_t bw_count = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& u = corpus.utterances[i];
      if (u.style != style) continue;
      ++row.utterances;
      const auto& base = baseline.at(u.speaker_id);
      if (sets[i].empty()) {
        // Every resonance was displaced out of the analysis band.
        row.mean_displacement += 1.0;
        row.mean_f1_displacement += 1.0;
        continue;
      }
      const auto d = formant_displacement(sets[i], base);
      row.mean_displacement += d.mean_displacement;
      row.mean_f1_displacement += d.relative_frequency_shift.front();
      for (double b : d.bandwidth_delta_hz) {
        bw_sum += b;
        ++bw_count;
      }
    }
    if (row.utterances) {
      row.mean_displacement /= static_cast<double>(row.utterances);
      row.mean_f1_displacement /= static_cast<double>(row.utterances);
    }
    row.mean_bandwidth_delta_hz = bw_count ? bw_sum / static_cast<double>(bw_count) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("spearman: need two equal-length samples of size >= 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ordered_json experiment_config_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["recognizer"] = to_string(cfg.recognizer);
  j["master_seed"] = cfg.master_seed;
  j["train_repetitions"] = cfg.train_repetitions;
  j["test_repetitions"] = cfg.test_repetitions;
  j["allow_overlap"] = cfg.allow_overlap;
  j["features"] = feature_json(cfg.features);
  j["dtw"] = dtw_json(cfg.dtw);
  j["hmm"] = {{"states", cfg.hmm.states},
              {"symbols", cfg.hmm.symbols},
              {"iterations", cfg.hmm.iterations},
              {"topology", to_string(cfg.hmm.topology)},
              {"emission_floor", cfg.hmm.emission_floor}};
  j["formant_filter"] = {{"min_frequency_hz", cfg.formant_filter.min_frequency_hz},
                         {"nyquist_margin_hz", cfg.formant_filter.nyquist_margin_hz},
                         {"max_bandwidth_hz", cfg.formant_filter.max_bandwidth_hz}};
  return j;
}

ordered_json report_json(const StyleReport& report, const ExperimentConfig& cfg, const Corpus& corpus) {
  ordered_json j;
  j["format"] = "vtract-report-1";
  j["config"] = experiment_config_json(cfg);
  j["corpus"] = {{"master_seed", corpus.config.master_seed},
                 {"speakers", corpus.speakers.size()},
                 {"repetitions", corpus.config.repetitions},
                 {"sample_rate_hz", corpus.config.sample_rate_hz},
                 {"duration_s", corpus.config.duration_s}};
  j["seeds"] = {{"master", cfg.master_seed},
                {"codebook", derive_seed(cfg.master_seed, {kCodebookStream})}};
  j["speakers"] = report.speakers;
  j["styles"] = ordered_json::array();
  for (const auto& r : report.styles)
    j["styles"].push_back({{"style", to_string(r.style)},
                           {"rate", r.rate},
                           {"correct", r.correct},
                           {"total", r.total},
                           {"mean_displacement", r.mean_displacement},
                           {"confusion", r.confusion}});
  return j;
}

std::string report_csv(const StyleReport& report) {
  std::ostringstream s;
  s.precision(6);
  s << "style,rate\n";
  for (const auto& r : report.styles) s << to_string(r.style) << ',' << r.rate << '\n';
  return s.str();
}

std::string displacement_csv(const std::vector<DisplacementRow>& rows) {
  std::ostringstream s;
  s.precision(6);
  s << "style,utterances,mean_displacement,mean_f1_displacement,mean_bandwidth_delta_hz\n";
  for (const auto& r : rows)
    s << to_string(r.style) << ',' << r.utterances << ',' << r.mean_displacement << ','
      << r.mean_f1_displacement << ',' << r.mean_bandwidth_delta_hz << '\n';
  return s.str();
}

void save_recognizer(const TrainedRecognizer& rec, const std::filesystem::path& dir) {
  ordered_json meta;
  meta["format"] = "vtract-recognizer-1";
  meta["recognizer"] = to_string(rec.kind);
  meta["features"] = feature_json(rec.features);
  meta["dtw"] = dtw_json(rec.dtw);
  if (rec.kind == Recognizer::dtw) {
    ordered_json t;
    for (const auto& [id, seqs] : rec.templates) {
      t[id] = ordered_json::array();
      for (const auto& s : seqs) t[id].push_back(s.frames());
    }
    write_file_atomic(dir / "templates.json", t.dump() + "\n");
  } else {
    write_file_atomic(dir / "codebook.json", to_json(rec.codebook).dump(2) + "\n");
    ordered_json m;
    for (const auto& [id, model] : rec.models) m[id] = to_json(model);
    write_file_atomic(dir / "models.json", m.dump(2) + "\n");
  }
  write_file_atomic(dir / "recognizer.json", meta.dump(2) + "\n");
}

TrainedRecognizer load_recognizer(const std::filesystem::path& dir) {
  try {
    TrainedRecognizer rec;
    const auto meta = nlohmann::json::parse(read_file(dir / "recognizer.json"));
    if (meta.at("format") != "vtract-recognizer-1") throw Error("unsupported recognizer format");
    rec.kind = parse_recognizer(meta.at("recognizer").get<std::string>());
    rec.features = feature_from_json(meta.at("features"));
    rec.dtw = dtw_from_json(meta.at("dtw"));
    if (rec.kind == Recognizer::dtw) {
      const auto t = nlohmann::json::parse(read_file(dir / "templates.json"));
      for (const auto& [id, seqs] : t.items())
        for (const auto& s : seqs) rec.templates[id].emplace_back(s.get<std::vector<CepstralVector>>());
      if (rec.templates.empty()) throw Error("no templates enrolled");
    } else {
      rec.codebook = codebook_from_json(nlohmann::json::parse(read_file(dir / "codebook.json")));
      const auto m = nlohmann::json::parse(read_file(dir / "models.json"));
      for (const auto& [id, model] : m.items()) rec.models[id] = hmm_model_from_json(model);
      if (rec.models.empty()) throw Error("no models enrolled");
    }
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(dir.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(dir.string() + ": " + e.what());
  }
}

}  // namespace vtract
