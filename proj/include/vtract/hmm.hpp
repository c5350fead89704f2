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
#include <map>
#include <string>
#include <vector>

#include "vtract/cepstra.hpp"
#include "vtract/parallel.hpp"
#include "vtract/random.hpp"
#include "json.hpp"

namespace vtract {

// Vector-quantizer codebook in cepstral space.
struct Codebook {
  std::vector<CepstralVector> centroids;

  std::size_t size() const { return centroids.size(); }
  std::size_t dimension() const { return centroids.empty() ? 0 : centroids.front().size(); }
};

struct CodebookTraining {
  Codebook codebook;
  // Mean squared quantization error after every assignment pass.
  std::vector<double> distortion_history;
};

// LBG-style growth: start from the global mean, repeatedly split the cell
// with the largest distortion and run Lloyd iterations until M centroids
// remain. Runs sharing a seed are nested, so the final distortion is
// non-increasing in M. Throws Error if fewer than M distinct vectors exist.
CodebookTraining train_codebook(const std::vector<CepstralVector>& features, std::size_t m, Rng& rng);

double quantization_distortion(const std::vector<CepstralVector>& features, const Codebook& cb);

struct ObservationSequence {
  std::vector<std::size_t> symbols;
};

// Nearest centroid per frame; ties go to the lower index.
ObservationSequence quantize(const FeatureSequence& seq, const Codebook& cb);
std::size_t nearest_centroid(const CepstralVector& v, const Codebook& cb);

// Discrete-observation HMM, matrices row-major.
struct HmmModel {
  std::vector<double> initial;                  // N
  std::vector<std::vector<double>> transition;  // N x N
  std::vector<std::vector<double>> emission;    // N x M

  std::size_t states() const { return initial.size(); }
  std::size_t symbols() const { return emission.empty() ? 0 : emission.front().size(); }
  // Throws Error unless the shapes agree, every entry is a finite
  // non-negative number and every distribution sums to 1 within tol.
  void validate(double tol = 1e-9) const;
};

// log P(obs | model) by the scaled forward recursion. Returns -infinity when
// the observation sequence has zero probability under the model.
double forward_log_likelihood(const HmmModel& model, const ObservationSequence& obs);

enum class Topology { left_to_right, ergodic };

struct HmmTrainingConfig {
  std::size_t states = 5;
  std::size_t symbols = 32;
  std::size_t iterations = 15;
  Topology topology = Topology::left_to_right;
  // Emission probabilities are floored at this value and renormalized after
  // every re-estimation. Zero disables flooring.
  double emission_floor = 1e-6;
};

struct HmmTraining {
  HmmModel model;
  // Total training log-likelihood of the initial model and of the model
  // after each iteration (iterations + 1 entries).
  std::vector<double> log_likelihood_history;
};

// Random initialization followed by Baum-Welch re-estimation.
HmmTraining baum_welch_train(const std::vector<ObservationSequence>& sequences,
                             const HmmTrainingConfig& cfg, Rng& rng);

struct ModelScore {
  std::string speaker_id;
  double log_likelihood;
};

// Descending log-likelihood, ties broken by speaker id.
std::vector<ModelScore> hmm_rank(const ObservationSequence& obs,
                                 const std::map<std::string, HmmModel>& models,
                                 Execution ex = Execution::serial);
ModelScore hmm_identify(const ObservationSequence& obs, const std::map<std::string, HmmModel>& models,
                        Execution ex = Execution::serial);

nlohmann::ordered_json to_json(const HmmModel& m);
HmmModel hmm_model_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Codebook& cb);
Codebook codebook_from_json(const nlohmann::json& j);

const char* to_string(Topology t);
Topology parse_topology(const std::string& name);

}  // namespace vtract
