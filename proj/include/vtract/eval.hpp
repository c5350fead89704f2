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
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vtract/cepstra.hpp"
#include "vtract/dtw.hpp"
#include "vtract/formants.hpp"
#include "vtract/hmm.hpp"
#include "vtract/parallel.hpp"
#include "vtract/style.hpp"
#include "json.hpp"

namespace vtract {

enum class Recognizer { dtw, hmm };

const char* to_string(Recognizer r);
Recognizer parse_recognizer(const std::string& name);

struct ExperimentConfig {
  Recognizer recognizer = Recognizer::dtw;
  std::vector<std::size_t> train_repetitions{0, 1, 2, 3, 4};
  std::vector<std::size_t> test_repetitions{5, 6, 7, 8};
  // Train and test repetition sets must be disjoint unless this is set.
  bool allow_overlap = false;
  FeatureConfig features;
  DtwConfig dtw;
  HmmTrainingConfig hmm;
  FormantFilterConfig formant_filter;
  bool with_displacement = true;
  std::uint64_t master_seed = 1;
  Execution execution = Execution::parallel;

  void validate() const;
};

struct StyleResult {
  TalkingStyle style = TalkingStyle::normal;
  std::size_t correct = 0;
  std::size_t total = 0;
  double rate = 0.0;
  double mean_displacement = 0.0;
  // confusion[true][predicted], speakers in StyleReport::speakers order.
  std::vector<std::vector<std::size_t>> confusion;
};

struct StyleReport {
  std::vector<std::string> speakers;
  std::vector<StyleResult> styles;

  const StyleResult& at(TalkingStyle s) const;
};

// Everything a recognizer learns from the Normal-style training repetitions.
struct TrainedRecognizer {
  Recognizer kind = Recognizer::dtw;
  FeatureConfig features;
  DtwConfig dtw;
  TemplateMap templates;
  Codebook codebook;
  std::map<std::string, HmmModel> models;
};

// Throws Error if some speaker lacks Normal-style training repetitions.
TrainedRecognizer train_recognizer(const Corpus& corpus, const ExperimentConfig& cfg);

struct RankedSpeaker {
  std::string speaker_id;
  double score;  // DTW distance (lower is better) or HMM log-likelihood
};

// All enrolled speakers, best first.
std::vector<RankedSpeaker> rank_speakers(const TrainedRecognizer& rec, const Waveform& w,
                                         Execution ex = Execution::serial);

// Trains on Normal-style training repetitions, scores every test repetition
// of every style present in the corpus and tallies per-style rates.
StyleReport run_experiment(const Corpus& corpus, const ExperimentConfig& cfg);

struct DisplacementRow {
  TalkingStyle style = TalkingStyle::normal;
  std::size_t utterances = 0;
  double mean_displacement = 0.0;     // averaged over shared formant indices
  double mean_f1_displacement = 0.0;  // first formant only
  double mean_bandwidth_delta_hz = 0.0;
};

// LPC model of one utterance from the averaged autocorrelation of the
// central half of its analysis frames.
LevinsonResult utterance_lpc(const Waveform& w, const AnalysisConfig& analysis);

// Pole extraction on utterance_lpc.
FormantSet utterance_formants(const Waveform& w, const AnalysisConfig& analysis,
                              const FormantFilterConfig& filter);

// Per-style displacement of every utterance's formants from the same
// speaker's mean Normal-style formants. Throws Error if a speaker has no
// Normal utterances or a Normal utterance yields no formants.
std::vector<DisplacementRow> displacement_summary(const Corpus& corpus, const AnalysisConfig& analysis,
                                                  const FormantFilterConfig& filter = {},
                                                  Execution ex = Execution::parallel);

// Spearman rank correlation with average ranks for ties. Returns 0 when
// either input is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::ordered_json experiment_config_json(const ExperimentConfig& cfg);
nlohmann::ordered_json report_json(const StyleReport& report, const ExperimentConfig& cfg,
                                   const Corpus& corpus);
// "style,rate" rows in table order.
std::string report_csv(const StyleReport& report);
std::string displacement_csv(const std::vector<DisplacementRow>& rows);

// Writes templates (DTW) or codebook and models (HMM) under dir.
void save_recognizer(const TrainedRecognizer& rec, const std::filesystem::path& dir);
TrainedRecognizer load_recognizer(const std::filesystem::path& dir);

}  // namespace vtract
