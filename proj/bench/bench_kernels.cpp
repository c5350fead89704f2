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

#include <benchmark/benchmark.h>

#include "vtract/dtw.hpp"
#include "vtract/eval.hpp"
#include "vtract/style.hpp"

using namespace vtract;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

const Corpus& default_corpus() {
  static const Corpus corpus = generate_corpus(CorpusConfig{});
  return corpus;
}

void BM_GenerateCorpus(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_corpus(CorpusConfig{}, mode(state)));
  state.SetLabel(to_string(mode(state)));
}

void BM_DtwRank(benchmark::State& state) {
  const auto& corpus = default_corpus();
  ExperimentConfig cfg;
  const auto rec = train_recognizer(corpus, cfg);
  const auto probe = extract_features(corpus.find("spk04", TalkingStyle::shout, 7)->waveform, cfg.features);
  for (auto _ : state) benchmark::DoNotOptimize(dtw_rank(probe, rec.templates, cfg.dtw, mode(state)));
  state.SetLabel(to_string(mode(state)));
}

void BM_RunExperiment(benchmark::State& state) {
  const auto& corpus = default_corpus();
  ExperimentConfig cfg;
  cfg.recognizer = state.range(1) == 0 ? Recognizer::dtw : Recognizer::hmm;
  cfg.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(corpus, cfg));
  state.SetLabel(std::string(to_string(cfg.execution)) + "/" + to_string(cfg.recognizer));
}

}  // namespace

BENCHMARK(BM_GenerateCorpus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DtwRank)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RunExperiment)->Args({0, 0})->Args({1, 0})->Args({0, 1})->Args({1, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
