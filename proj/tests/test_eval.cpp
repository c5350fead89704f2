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

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "vtract/error.hpp"
#include "vtract/eval.hpp"

using namespace vtract;

namespace {

Corpus small_corpus(std::size_t speakers, std::uint64_t seed = 1) {
  CorpusConfig cfg;
  cfg.speakers = speakers;
  cfg.master_seed = seed;
  return generate_corpus(cfg);
}

void check_report_invariants(const StyleReport& report, std::size_t tests_per_speaker) {
  for (const auto& r : report.styles) {
    CHECK(r.total == report.speakers.size() * tests_per_speaker);
    CHECK(r.rate >= 0.0);
    CHECK(r.rate <= 1.0);
    CHECK(r.rate == static_cast<double>(r.correct) / static_cast<double>(r.total));
    std::size_t diagonal = 0;
    for (std::size_t i = 0; i < r.confusion.size(); ++i) {
      std::size_t row = 0;
      for (auto v : r.confusion[i]) row += v;
      CHECK(row == tests_per_speaker);
      diagonal += r.confusion[i][i];
    }
    CHECK(diagonal == r.correct);
  }
}

}  // namespace

TEST_CASE("experiment configuration") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.test_repetitions = {4, 5};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("both train and test"), Error);
  cfg.allow_overlap = true;
  CHECK_NOTHROW(cfg.validate());
  cfg.train_repetitions.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_recognizer("hmm") == Recognizer::hmm);
  CHECK_THROWS_AS(parse_recognizer("gmm"), Error);
}

TEST_CASE("testing on the training set gives a perfect Normal row") {
  const auto corpus = small_corpus(9);
  ExperimentConfig cfg;
  cfg.allow_overlap = true;
  cfg.test_repetitions = cfg.train_repetitions;
  cfg.with_displacement = false;
  const auto report = run_experiment(corpus, cfg);
  CHECK(report.at(TalkingStyle::normal).rate == 1.0);
  check_report_invariants(report, cfg.test_repetitions.size());
}

TEST_CASE("a single speaker is always recognized") {
  const auto corpus = small_corpus(1);
  for (auto kind : {Recognizer::dtw, Recognizer::hmm}) {
    ExperimentConfig cfg;
    cfg.recognizer = kind;
    cfg.with_displacement = false;
    const auto report = run_experiment(corpus, cfg);
    REQUIRE(report.styles.size() == 5);
    for (const auto& r : report.styles) CHECK(r.rate == 1.0);
  }
}

TEST_CASE("run_experiment is deterministic and mode independent") {
  const auto corpus = small_corpus(4, 5);
  for (auto kind : {Recognizer::dtw, Recognizer::hmm}) {
    ExperimentConfig cfg;
    cfg.recognizer = kind;
    cfg.execution = Execution::serial;
    const auto serial = run_experiment(corpus, cfg);
    cfg.execution = Execution::parallel;
    const auto parallel = run_experiment(corpus, cfg);
    const auto again = run_experiment(corpus, cfg);
    CHECK(report_json(serial, cfg, corpus).dump() == report_json(parallel, cfg, corpus).dump());
    CHECK(report_json(parallel, cfg, corpus).dump() == report_json(again, cfg, corpus).dump());
    check_report_invariants(serial, cfg.test_repetitions.size());
  }
}

TEST_CASE("missing Normal training data") {
  CorpusConfig cc;
  cc.speakers = 2;
  cc.styles = {TalkingStyle::shout};
  const auto corpus = generate_corpus(cc);
  CHECK_THROWS_WITH_AS(run_experiment(corpus, ExperimentConfig{}), doctest::Contains("Normal"), Error);

  cc.styles = {TalkingStyle::normal};
  cc.repetitions = 3;
  CHECK_THROWS_AS(run_experiment(generate_corpus(cc), ExperimentConfig{}), Error);
}

TEST_CASE("displacement summary") {
  const auto corpus = small_corpus(9);
  const auto rows = displacement_summary(corpus, AnalysisConfig{});
  REQUIRE(rows.size() == 5);
  const auto row = [&](TalkingStyle s) {
    return *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.style == s; });
  };
  CHECK(row(TalkingStyle::normal).utterances == 81);
  CHECK(row(TalkingStyle::normal).mean_displacement <= 0.01);
  CHECK(row(TalkingStyle::shout).mean_displacement > row(TalkingStyle::slow).mean_displacement);
  CHECK(row(TalkingStyle::shout).mean_displacement >= row(TalkingStyle::loud).mean_displacement);
  CHECK(row(TalkingStyle::loud).mean_displacement > row(TalkingStyle::soft).mean_displacement);
  CHECK(row(TalkingStyle::soft).mean_displacement >= row(TalkingStyle::slow).mean_displacement);

  const auto serial = displacement_summary(corpus, AnalysisConfig{}, {}, Execution::serial);
  CHECK(displacement_csv(serial) == displacement_csv(rows));
  CHECK(displacement_csv(rows).rfind("style,", 0) == 0);
}

TEST_CASE("utterance formants track the synthesis filter") {
  const auto corpus = small_corpus(9);
  for (const auto& u : corpus.utterances) {
    // Low-pitch voices: spk01, spk04, spk07.
    const bool low_pitch = (std::stoi(u.speaker_id.substr(3)) - 1) % 3 == 0;
    if (u.style != TalkingStyle::normal || !low_pitch) continue;
    const auto est = utterance_formants(u.waveform, AnalysisConfig{}, {});
    const auto truth = extract_formants(u.filter, corpus.sample_rate_hz());
    REQUIRE_FALSE(est.empty());
    CHECK(std::abs(est.formants[0].frequency_hz - truth.formants[0].frequency_hz) <=
          0.02 * truth.formants[0].frequency_hz);
  }
}

TEST_CASE("spearman") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 1, 1}, {1, 2, 3}) == 0.0);
  // Ties take the average rank: x ranks (1.5,1.5,3), y ranks (1,2,3).
  CHECK(spearman({5, 5, 9}, {1, 2, 3}) == doctest::Approx(0.8660254037844386));
  CHECK_THROWS_AS(spearman({1, 2}, {1}), Error);
}

TEST_CASE("report serialization") {
  const auto corpus = small_corpus(2);
  ExperimentConfig cfg;
  const auto report = run_experiment(corpus, cfg);
  const auto csv = report_csv(report);
  CHECK(csv.rfind("style,rate\nnormal,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  const auto j = report_json(report, cfg, corpus);
  CHECK(j.at("config").at("recognizer") == "dtw");
  CHECK(j.dump().find("timestamp") == std::string::npos);
}

TEST_CASE("recognizer save and load") {
  const auto corpus = small_corpus(3);
  const auto dir = std::filesystem::temp_directory_path() / "vtract_test_recognizer";
  for (auto kind : {Recognizer::dtw, Recognizer::hmm}) {
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg;
    cfg.recognizer = kind;
    const auto rec = train_recognizer(corpus, cfg);
    save_recognizer(rec, dir);
    const auto back = load_recognizer(dir);
    CHECK(back.kind == kind);
    for (const auto& u : corpus.utterances) {
      if (u.repetition != 6) continue;
      const auto a = rank_speakers(rec, u.waveform);
      const auto b = rank_speakers(back, u.waveform);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].speaker_id == b[i].speaker_id);
        CHECK(a[i].score == doctest::Approx(b[i].score).epsilon(1e-12));
      }
    }
    if (kind == Recognizer::dtw) {
      const auto* train = corpus.find("spk02", TalkingStyle::normal, 1);
      const auto top = rank_speakers(back, train->waveform).front();
      CHECK(top.speaker_id == "spk02");
      CHECK(top.score == 0.0);
    }
  }
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_recognizer(dir), Error);
}
