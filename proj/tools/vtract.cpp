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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vtract/cepstra.hpp"
#include "vtract/error.hpp"
#include "vtract/eval.hpp"
#include "vtract/fileio.hpp"
#include "vtract/formants.hpp"
#include "vtract/lpc.hpp"
#include "vtract/wav.hpp"

namespace fs = std::filesystem;
using namespace vtract;

namespace {

struct CorpusFlags {
  std::uint64_t seed = 1;
  std::size_t speakers = 9;
  std::size_t reps = 9;
  std::string styles = "all";
  double duration = 0.4;
  double sample_rate = 8000.0;
  double scatter = 0.10;
  double jitter = 0.0;
  double glottal_pole = 0.95;
  std::string excitation = "impulse";
};

struct AnalysisFlags {
  std::size_t order = 8;
  double frame_ms = 30.0;
  double hop_ms = 10.0;
  double preemphasis = 0.95;
  std::size_t cepstral_dim = 12;
  double min_freq = 50.0;
  double margin = 50.0;
  double max_bw = 700.0;
};

std::string execution_name = "parallel";

void add_corpus_flags(CLI::App* app, CorpusFlags& f) {
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--speakers", f.speakers, "Number of speakers")->check(CLI::PositiveNumber);
  app->add_option("--reps", f.reps, "Repetitions per style")->check(CLI::PositiveNumber);
  app->add_option("--styles", f.styles, "Comma-separated styles or 'all'");
  app->add_option("--duration", f.duration, "Nominal utterance duration, s")->check(CLI::PositiveNumber);
  app->add_option("--sample-rate", f.sample_rate, "Sample rate, Hz")->check(CLI::PositiveNumber);
  app->add_option("--scatter", f.scatter, "Relative per-section area scatter")->check(CLI::Range(0.0, 0.99));
  app->add_option("--speaker-jitter", f.jitter, "Intra-speaker pole angle wobble, rad");
  app->add_option("--glottal-pole", f.glottal_pole, "Source tilt pole")->check(CLI::Range(0.0, 0.999));
  app->add_option("--excitation", f.excitation, "impulse or noise")->check(CLI::IsMember({"impulse", "noise"}));
}

void add_analysis_flags(CLI::App* app, AnalysisFlags& f) {
  app->add_option("--order", f.order, "LPC order")->check(CLI::PositiveNumber);
  app->add_option("--frame-ms", f.frame_ms, "Analysis frame length, ms")->check(CLI::PositiveNumber);
  app->add_option("--hop-ms", f.hop_ms, "Analysis hop, ms")->check(CLI::PositiveNumber);
  app->add_option("--preemphasis", f.preemphasis, "Pre-emphasis coefficient")->check(CLI::Range(0.0, 0.999));
  app->add_option("--cepstral-dim", f.cepstral_dim, "Cepstral coefficients per frame")->check(CLI::PositiveNumber);
  app->add_option("--min-freq", f.min_freq, "Drop poles below this frequency, Hz");
  app->add_option("--nyquist-margin", f.margin, "Drop poles within this distance of Nyquist, Hz");
  app->add_option("--max-bw", f.max_bw, "Drop poles wider than this bandwidth, Hz");
}

CorpusConfig corpus_config(const CorpusFlags& f) {
  CorpusConfig cfg;
  cfg.master_seed = f.seed;
  cfg.speakers = f.speakers;
  cfg.repetitions = f.reps;
  cfg.styles = parse_style_list(f.styles);
  cfg.duration_s = f.duration;
  cfg.sample_rate_hz = f.sample_rate;
  cfg.speaker_scatter = f.scatter;
  cfg.intra_speaker_jitter = f.jitter;
  cfg.synthesis.glottal_pole = f.glottal_pole;
  cfg.synthesis.excitation = f.excitation == "noise" ? Excitation::white_noise : Excitation::impulse_train;
  cfg.validate();
  return cfg;
}

AnalysisConfig analysis_config(const AnalysisFlags& f) {
  AnalysisConfig a;
  a.order = f.order;
  a.frame_ms = f.frame_ms;
  a.hop_ms = f.hop_ms;
  a.preemphasis = f.preemphasis;
  a.validate();
  return a;
}

FormantFilterConfig filter_config(const AnalysisFlags& f) { return {f.min_freq, f.margin, f.max_bw}; }

void echo_config(const CLI::App* sub) {
  std::cerr << "# resolved configuration [" << sub->get_name() << "]\n";
  std::istringstream lines(sub->config_to_str(true, false));
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) std::cerr << "#   " << line << '\n';
}

void emit(const std::string& target, const std::string& text) {
  if (target == "-") {
    std::cout << text;
  } else {
    write_file_atomic(target, text);
  }
}

std::string spectrum_csv(const PredictorPolynomial& poly, std::size_t points, double fs) {
  std::ostringstream s;
  s.precision(10);
  s << "frequency_hz,magnitude_db\n";
  for (const auto& p : frequency_response(poly, points, fs)) s << p.frequency_hz << ',' << p.magnitude_db << '\n';
  return s.str();
}

std::vector<std::size_t> parse_reps(const std::string& list) {
  std::vector<std::size_t> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error("invalid repetition index '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error("empty repetition list");
  return out;
}

std::string rate_table(const StyleReport& report, Recognizer kind) {
  std::ostringstream s;
  s << "Recognition rate (" << to_string(kind) << ")\n";
  char line[96];
  std::snprintf(line, sizeof line, "%-8s %8s %8s %8s\n", "style", "rate", "correct", "total");
  s << line;
  for (const auto& r : report.styles) {
    std::snprintf(line, sizeof line, "%-8s %7.1f%% %8zu %8zu\n", to_string(r.style), 100.0 * r.rate, r.correct,
                  r.total);
    s << line;
  }
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vocal-tract LPC analysis and talking-style speaker identification"};
  app.set_config("--config", "", "INI/TOML file with defaults; [subcommand] sections, flags override");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.add_option("--execution", execution_name, "parallel or serial")
      ->check(CLI::IsMember({"parallel", "serial"}));

  // synth-corpus
  CorpusFlags synth_flags;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth-corpus", "Synthesize a multi-style corpus");
  synth->add_option("--out", synth_out, "Output directory")->required();
  add_corpus_flags(synth, synth_flags);

  // analyze
  AnalysisFlags an_flags;
  std::string an_wav, an_area, an_formants = "-", an_cepstra, an_spectrum;
  double an_area_fs = 8000.0;
  std::size_t an_points = 512;
  auto* analyze = app.add_subcommand("analyze", "Formants, cepstra and LPC spectrum of a WAV or area file");
  auto* wav_opt = analyze->add_option("--wav", an_wav, "Input WAV (mono 16-bit PCM)")->check(CLI::ExistingFile);
  auto* area_opt = analyze->add_option("--area", an_area, "Area function file, one area per line")
                       ->check(CLI::ExistingFile);
  wav_opt->excludes(area_opt);
  analyze->add_option("--area-sample-rate", an_area_fs, "Sample rate assumed for --area, Hz")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--formants", an_formants, "Formant CSV destination ('-' for stdout)");
  analyze->add_option("--cepstra", an_cepstra, "Cepstral CSV destination");
  analyze->add_option("--spectrum", an_spectrum, "LPC magnitude response CSV destination");
  analyze->add_option("--spectrum-points", an_points, "Points in the spectrum CSV")->check(CLI::PositiveNumber);
  add_analysis_flags(analyze, an_flags);

  // identify
  std::string id_recognizer = "dtw", id_models, id_input;
  auto* identify = app.add_subcommand("identify", "Rank enrolled speakers for one utterance");
  identify->add_option("--recognizer", id_recognizer, "dtw or hmm")->check(CLI::IsMember({"dtw", "hmm"}));
  identify->add_option("--models", id_models, "Directory written by 'experiment' (models/)")->required();
  identify->add_option("--input", id_input, "Input WAV")->required()->check(CLI::ExistingFile);

  // experiment
  CorpusFlags ex_corpus;
  AnalysisFlags ex_analysis;
  std::string ex_dir, ex_out, ex_recognizer = "dtw", ex_train = "0,1,2,3,4", ex_test = "5,6,7,8";
  std::string ex_topology = "left_to_right";
  bool ex_synth = false, ex_overlap = false, ex_no_displacement = false;
  std::size_t ex_band = 0, ex_states = 5, ex_symbols = 32, ex_iterations = 15;
  double ex_floor = 1e-6;
  auto* experiment = app.add_subcommand("experiment", "Train on Normal style, test every style");
  auto* corpus_opt = experiment->add_option("--corpus", ex_dir, "Corpus directory from synth-corpus")
                         ->check(CLI::ExistingDirectory);
  auto* synth_flag = experiment->add_flag("--synth", ex_synth, "Synthesize the corpus in memory");
  corpus_opt->excludes(synth_flag);
  experiment->add_option("--out", ex_out, "Output directory")->required();
  experiment->add_option("--recognizer", ex_recognizer, "dtw or hmm")->check(CLI::IsMember({"dtw", "hmm"}));
  experiment->add_option("--train-reps", ex_train, "Comma-separated training repetitions");
  experiment->add_option("--test-reps", ex_test, "Comma-separated test repetitions");
  experiment->add_flag("--allow-overlap", ex_overlap, "Permit shared train/test repetitions");
  experiment->add_flag("--no-displacement", ex_no_displacement, "Skip the formant displacement analysis");
  experiment->add_option("--band", ex_band, "DTW Sakoe-Chiba radius (0 = off)");
  experiment->add_option("--states", ex_states, "HMM states")->check(CLI::PositiveNumber);
  experiment->add_option("--symbols", ex_symbols, "VQ codebook size")->check(CLI::PositiveNumber);
  experiment->add_option("--iterations", ex_iterations, "Baum-Welch iterations");
  experiment->add_option("--topology", ex_topology, "left_to_right or ergodic")
      ->check(CLI::IsMember({"left_to_right", "ergodic"}));
  experiment->add_option("--emission-floor", ex_floor, "HMM emission floor");
  add_corpus_flags(experiment, ex_corpus);
  add_analysis_flags(experiment, ex_analysis);

  CLI11_PARSE(app, argc, argv);

  try {
    const Execution ex = parse_execution(execution_name);

    if (*synth) {
      echo_config(synth);
      const auto corpus = generate_corpus(corpus_config(synth_flags), ex);
      save_corpus(corpus, synth_out);
      std::cout << corpus.utterances.size() << " utterances written to " << synth_out << '\n';
      return 0;
    }

    if (*analyze) {
      if (an_wav.empty() && an_area.empty()) throw Error("analyze: one of --wav or --area is required");
      echo_config(analyze);
      const auto analysis = analysis_config(an_flags);
      const auto filter = filter_config(an_flags);
      PredictorPolynomial poly({0.0});
      double fs = an_area_fs;
      std::string cepstra;
      if (!an_area.empty()) {
        poly = reflection_to_predictor(area_to_reflection(read_area_function(an_area)));
        std::vector<CepstralVector> one{lpc_to_cepstrum(poly, an_flags.cepstral_dim)};
        cepstra = features_to_csv(FeatureSequence(std::move(one)));
      } else {
        const auto w = read_wav(an_wav);
        fs = w.sample_rate_hz();
        poly = utterance_lpc(w, analysis).polynomial;
        if (!an_cepstra.empty()) cepstra = features_to_csv(extract_features(w, {analysis, an_flags.cepstral_dim}));
      }
      const auto formants = extract_formants(poly, fs, filter);
      if (!an_cepstra.empty()) emit(an_cepstra, cepstra);
      if (!an_spectrum.empty()) emit(an_spectrum, spectrum_csv(poly, an_points, fs));
      emit(an_formants, formants_to_csv(formants));
      return 0;
    }

    if (*identify) {
      echo_config(identify);
      const auto rec = load_recognizer(id_models);
      if (rec.kind != parse_recognizer(id_recognizer))
        throw Error("identify: models in " + id_models + " were trained for " + to_string(rec.kind) +
                    ", not " + id_recognizer);
      const auto ranked = rank_speakers(rec, read_wav(id_input), ex);
      std::cout << "rank,speaker,score\n";
      std::cout.precision(10);
      for (std::size_t i = 0; i < ranked.size(); ++i)
        std::cout << i + 1 << ',' << ranked[i].speaker_id << ',' << ranked[i].score << '\n';
      return 0;
    }

    if (*experiment) {
      if (ex_dir.empty() && !ex_synth) throw Error("experiment: one of --corpus or --synth is required");
      echo_config(experiment);
      ExperimentConfig cfg;
      cfg.recognizer = parse_recognizer(ex_recognizer);
      cfg.train_repetitions = parse_reps(ex_train);
      cfg.test_repetitions = parse_reps(ex_test);
      cfg.allow_overlap = ex_overlap;
      cfg.features = {analysis_config(ex_analysis), ex_analysis.cepstral_dim};
      if (ex_band > 0) cfg.dtw.band_radius = ex_band;
      cfg.hmm.states = ex_states;
      cfg.hmm.symbols = ex_symbols;
      cfg.hmm.iterations = ex_iterations;
      cfg.hmm.topology = parse_topology(ex_topology);
      cfg.hmm.emission_floor = ex_floor;
      cfg.formant_filter = filter_config(ex_analysis);
      cfg.with_displacement = !ex_no_displacement;
      cfg.master_seed = ex_corpus.seed;
      cfg.execution = ex;
      cfg.validate();

      const Corpus corpus = ex_synth ? generate_corpus(corpus_config(ex_corpus), ex) : load_corpus(ex_dir);
      const auto report = run_experiment(corpus, cfg);
      const fs::path out = ex_out;
      write_file_atomic(out / "report.json", report_json(report, cfg, corpus).dump(2) + "\n");
      write_file_atomic(out / "report.csv", report_csv(report));
      if (cfg.with_displacement)
        write_file_atomic(out / "displacement.csv",
                          displacement_csv(displacement_summary(corpus, cfg.features.analysis, cfg.formant_filter, ex)));
      save_recognizer(train_recognizer(corpus, cfg), out / "models");
      std::cout << rate_table(report, cfg.recognizer);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
