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

#include "vtract/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vtract/error.hpp"

namespace vtract {

namespace {

double squared_distance(const CepstralVector& x, const CepstralVector& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

struct Assignment {
  std::vector<std::size_t> cell;
  std::vector<double> cost;  // squared distance to the assigned centroid
  double mean = 0.0;
};

Assignment assign(const std::vector<CepstralVector>& x, const Codebook& cb) {
  Assignment a;
  a.cell.resize(x.size());
  a.cost.resize(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t best = 0;
    double best_d = squared_distance(x[i], cb.centroids[0]);
    for (std::size_t c = 1; c < cb.size(); ++c) {
      const double d = squared_distance(x[i], cb.centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    a.cell[i] = best;
    a.cost[i] = best_d;
    total += best_d;
  }
  a.mean = total / static_cast<double>(x.size());
  return a;
}

void normalize_row(std::vector<double>& row) {
  const double s = std::accumulate(row.begin(), row.end(), 0.0);
  for (auto& v : row) v /= s;
}

void floor_row(std::vector<double>& row, double floor) {
  if (floor <= 0.0) return;
  for (auto& v : row) v = std::max(v, floor);
  normalize_row(row);
}

}  // namespace

CodebookTraining train_codebook(const std::vector<CepstralVector>& features, std::size_t m, Rng& rng) {
  if (m < 1) throw Error("train_codebook: codebook size must be at least 1");
  if (features.empty()) throw Error("train_codebook: no training vectors");
  const std::size_t dim = features.front().size();
  for (const auto& f : features)
    if (f.size() != dim) throw Error("train_codebook: training vectors differ in dimension");
  {
    auto sorted = features;
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (distinct < m)
      throw Error("train_codebook: " + std::to_string(distinct) + " distinct vectors cannot fill " +
                  std::to_string(m) + " centroids");
  }

  constexpr std::size_t kMaxLloydPasses = 60;
  constexpr double kRelativeTolerance = 1e-7;

  CodebookTraining out;
  Codebook& cb = out.codebook;
  CepstralVector mean(dim, 0.0);
  for (const auto& f : features)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += f[d];
  for (auto& v : mean) v /= static_cast<double>(features.size());
  cb.centroids.push_back(mean);
  Assignment a = assign(features, cb);
  out.distortion_history.push_back(a.mean);

  while (cb.size() < m) {
    // Split the cell with the largest total distortion; the parent centroid stays.
    std::vector<double> cell_cost(cb.size(), 0.0);
    for (std::size_t i = 0; i < features.size(); ++i) cell_cost[a.cell[i]] += a.cost[i];
    const std::size_t target = static_cast<std::size_t>(
        std::max_element(cell_cost.begin(), cell_cost.end()) - cell_cost.begin());
    // New centroid: a member of that cell drawn in proportion to its squared error.
    double pick = rng.uniform() * cell_cost[target];
    std::size_t chosen = features.size();
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (a.cell[i] != target || a.cost[i] <= 0.0) continue;
      chosen = i;
      pick -= a.cost[i];
      if (pick < 0.0) break;
    }
    const CepstralVector child = features[chosen];
    cb.centroids.push_back(child);

    for (std::size_t pass = 0; pass < kMaxLloydPasses; ++pass) {
      const Assignment next = assign(features, cb);
      const double before = out.distortion_history.back();
      a = next;
      out.distortion_history.push_back(a.mean);

      std::vector<CepstralVector> sums(cb.size(), CepstralVector(dim, 0.0));
      std::vector<std::size_t> counts(cb.size(), 0);
      for (std::size_t i = 0; i < features.size(); ++i) {
        ++counts[a.cell[i]];
        for (std::size_t d = 0; d < dim; ++d) sums[a.cell[i]][d] += features[i][d];
      }
      std::vector<double> cost = a.cost;
      bool reseeded = false;
      for (std::size_t c = 0; c < cb.size(); ++c) {
        if (counts[c] > 0) {
          for (std::size_t d = 0; d < dim; ++d) cb.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
          continue;
        }
        // Empty cell: move it onto the worst-quantized vector.
        const auto worst = static_cast<std::size_t>(std::max_element(cost.begin(), cost.end()) - cost.begin());
        if (cost[worst] > 0.0) {
          cb.centroids[c] = features[worst];
          cost[worst] = 0.0;
          reseeded = true;
        }
      }
      if (!reseeded && before - a.mean <= kRelativeTolerance * before) break;
    }
    a = assign(features, cb);
    out.distortion_history.push_back(a.mean);
  }
  return out;
}

double quantization_distortion(const std::vector<CepstralVector>& features, const Codebook& cb) {
  if (features.empty() || cb.size() == 0) throw Error("quantization_distortion: empty input");
  return assign(features, cb).mean;
}

std::size_t nearest_centroid(const CepstralVector& v, const Codebook& cb) {
  if (cb.size() == 0) throw Error("quantize: empty codebook");
  if (v.size() != cb.dimension())
    throw Error("quantize: frame dimension " + std::to_string(v.size()) + " does not match codebook dimension " +
                std::to_string(cb.dimension()));
  std::size_t best = 0;
  double best_d = squared_distance(v, cb.centroids[0]);
  for (std::size_t c = 1; c < cb.size(); ++c) {
    const double d = squared_distance(v, cb.centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

ObservationSequence quantize(const FeatureSequence& seq, const Codebook& cb) {
  ObservationSequence obs;
  obs.symbols.reserve(seq.size());
  for (const auto& f : seq.frames()) obs.symbols.push_back(nearest_centroid(f, cb));
  return obs;
}

void HmmModel::validate(double tol) const {
  const std::size_t n = initial.size();
  if (n == 0) throw Error("hmm: model has no states");
  if (transition.size() != n || emission.size() != n) throw Error("hmm: matrix shapes disagree");
  const std::size_t m = emission.front().size();
  if (m == 0) throw Error("hmm: model has no symbols");
  auto check = [tol](const std::vector<double>& row, std::size_t width, const char* what) {
    if (row.size() != width) throw Error(std::string("hmm: ragged ") + what);
    double s = 0.0;
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(std::string("hmm: invalid probability in ") + what);
      s += v;
    }
    if (std::abs(s - 1.0) > tol) throw Error(std::string("hmm: ") + what + " does not sum to 1");
  };
  check(initial, n, "initial distribution");
  for (const auto& row : transition) check(row, n, "transition row");
  for (const auto& row : emission) check(row, m, "emission row");
}

double forward_log_likelihood(const HmmModel& model, const ObservationSequence& obs) {
  const std::size_t n = model.states();
  const std::size_t m = model.symbols();
  if (obs.symbols.empty()) throw Error("forward_log_likelihood: empty observation sequence");
  for (auto s : obs.symbols)
    if (s >= m) throw Error("forward_log_likelihood: symbol " + std::to_string(s) + " outside alphabet");

  std::vector<double> alpha(n), next(n);
  double log_likelihood = 0.0;
  for (std::size_t t = 0; t < obs.symbols.size(); ++t) {
    const std::size_t o = obs.symbols[t];
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double acc;
      if (t == 0) {
        acc = model.initial[j];
      } else {
        acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += alpha[i] * model.transition[i][j];
      }
      next[j] = acc * model.emission[j][o];
      scale += next[j];
    }
    if (!(scale > 0.0)) return -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) alpha[j] = next[j] / scale;
    log_likelihood += std::log(scale);
  }
  return log_likelihood;
}

namespace {

HmmModel random_model(const HmmTrainingConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.states;
  const std::size_t m = cfg.symbols;
  HmmModel model;
  model.initial.assign(n, 0.0);
  model.transition.assign(n, std::vector<double>(n, 0.0));
  model.emission.assign(n, std::vector<double>(m, 0.0));
  if (cfg.topology == Topology::left_to_right) {
    model.initial[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 == n) {
        model.transition[i][i] = 1.0;
      } else {
        const double stay = rng.uniform(0.5, 0.9);
        model.transition[i][i] = stay;
        model.transition[i][i + 1] = 1.0 - stay;
      }
    }
  } else {
    for (auto& v : model.initial) v = rng.uniform(0.5, 1.5);
    normalize_row(model.initial);
    for (auto& row : model.transition) {
      for (auto& v : row) v = rng.uniform(0.5, 1.5);
      normalize_row(row);
    }
  }
  for (auto& row : model.emission) {
    for (auto& v : row) v = rng.uniform(0.5, 1.5);
    normalize_row(row);
  }
  return model;
}

}  // namespace

HmmTraining baum_welch_train(const std::vector<ObservationSequence>& sequences,
                             const HmmTrainingConfig& cfg, Rng& rng) {
  if (sequences.empty()) throw Error("baum_welch_train: no training sequences");
  if (cfg.states < 1 || cfg.symbols < 1) throw Error("baum_welch_train: need at least one state and symbol");
  for (const auto& seq : sequences) {
    if (seq.symbols.empty()) throw Error("baum_welch_train: empty training sequence");
    for (auto s : seq.symbols)
      if (s >= cfg.symbols) throw Error("baum_welch_train: symbol outside alphabet");
  }
  const std::size_t n = cfg.states;
  const std::size_t m = cfg.symbols;

  HmmTraining out;
  out.model = random_model(cfg, rng);
  HmmModel& model = out.model;

  std::vector<std::vector<double>> alpha, beta;
  std::vector<double> scale;
  for (std::size_t iter = 0; iter <= cfg.iterations; ++iter) {
    std::vector<double> init_acc(n, 0.0);
    std::vector<std::vector<double>> trans_num(n, std::vector<double>(n, 0.0));
    std::vector<double> trans_den(n, 0.0);
    std::vector<std::vector<double>> emit_num(n, std::vector<double>(m, 0.0));
    std::vector<double> emit_den(n, 0.0);
    double total = 0.0;
    std::size_t used = 0;

    for (const auto& seq : sequences) {
      const auto& o = seq.symbols;
      const std::size_t T = o.size();
      alpha.assign(T, std::vector<double>(n, 0.0));
      beta.assign(T, std::vector<double>(n, 0.0));
      scale.assign(T, 0.0);
      bool vanished = false;
      for (std::size_t t = 0; t < T && !vanished; ++t) {
        double c = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          if (t == 0) {
            acc = model.initial[j];
          } else {
            for (std::size_t i = 0; i < n; ++i) acc += alpha[t - 1][i] * model.transition[i][j];
          }
          alpha[t][j] = acc * model.emission[j][o[t]];
          c += alpha[t][j];
        }
        if (!(c > 0.0)) {
          vanished = true;
          break;
        }
        for (auto& v : alpha[t]) v /= c;
        scale[t] = c;
      }
      if (vanished) {
        total = -std::numeric_limits<double>::infinity();
        continue;
      }
      for (double c : scale) total += std::log(c);
      ++used;

      std::fill(beta[T - 1].begin(), beta[T - 1].end(), 1.0);
      for (std::size_t t = T - 1; t-- > 0;) {
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j)
            acc += model.transition[i][j] * model.emission[j][o[t + 1]] * beta[t + 1][j];
          beta[t][i] = acc / scale[t + 1];
        }
      }
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
          const double gamma = alpha[t][i] * beta[t][i];
          if (t == 0) init_acc[i] += gamma;
          emit_num[i][o[t]] += gamma;
          emit_den[i] += gamma;
          if (t + 1 < T) {
            trans_den[i] += gamma;
            for (std::size_t j = 0; j < n; ++j)
              trans_num[i][j] += alpha[t][i] * model.transition[i][j] * model.emission[j][o[t + 1]] *
                                 beta[t + 1][j] / scale[t + 1];
          }
        }
      }
    }
    out.log_likelihood_history.push_back(total);
    if (iter == cfg.iterations || used == 0) break;

    const double init_sum = std::accumulate(init_acc.begin(), init_acc.end(), 0.0);
    if (init_sum > 0.0)
      for (std::size_t i = 0; i < n; ++i) model.initial[i] = init_acc[i] / init_sum;
    for (std::size_t i = 0; i < n; ++i) {
      if (trans_den[i] > 0.0) {
        for (std::size_t j = 0; j < n; ++j) model.transition[i][j] = trans_num[i][j] / trans_den[i];
        normalize_row(model.transition[i]);
      }
      if (emit_den[i] > 0.0) {
        for (std::size_t k = 0; k < m; ++k) model.emission[i][k] = emit_num[i][k] / emit_den[i];
        normalize_row(model.emission[i]);
      }
      floor_row(model.emission[i], cfg.emission_floor);
    }
  }
  return out;
}

std::vector<ModelScore> hmm_rank(const ObservationSequence& obs,
                                 const std::map<std::string, HmmModel>& models, Execution ex) {
  if (models.empty()) throw Error("hmm_identify: no models enrolled");
  std::vector<const std::pair<const std::string, HmmModel>*> entries;
  for (const auto& e : models) entries.push_back(&e);
  std::vector<ModelScore> ranked(entries.size());
  for_each_index(entries.size(), ex, [&](std::size_t i) {
    ranked[i] = {entries[i]->first, forward_log_likelihood(entries[i]->second, obs)};
  });
  std::stable_sort(ranked.begin(), ranked.end(), [](const ModelScore& a, const ModelScore& b) {
    return a.log_likelihood > b.log_likelihood;
  });
  return ranked;
}

ModelScore hmm_identify(const ObservationSequence& obs, const std::map<std::string, HmmModel>& models,
                        Execution ex) {
  return hmm_rank(obs, models, ex).front();
}

nlohmann::ordered_json to_json(const HmmModel& m) {
  return {{"states", m.states()},
          {"symbols", m.symbols()},
          {"initial", m.initial},
          {"transition", m.transition},
          {"emission", m.emission}};
}

HmmModel hmm_model_from_json(const nlohmann::json& j) {
  HmmModel m;
  try {
    m.initial = j.at("initial").get<std::vector<double>>();
    m.transition = j.at("transition").get<std::vector<std::vector<double>>>();
    m.emission = j.at("emission").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("hmm model json: ") + e.what());
  }
  m.validate(1e-6);
  return m;
}

nlohmann::ordered_json to_json(const Codebook& cb) {
  return {{"size", cb.size()}, {"dimension", cb.dimension()}, {"centroids", cb.centroids}};
}

Codebook codebook_from_json(const nlohmann::json& j) {
  Codebook cb;
  try {
    cb.centroids = j.at("centroids").get<std::vector<CepstralVector>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("codebook json: ") + e.what());
  }
  if (cb.centroids.empty()) throw Error("codebook json: no centroids");
  for (const auto& c : cb.centroids)
    if (c.size() != cb.dimension()) throw Error("codebook json: ragged centroids");
  return cb;
}

const char* to_string(Topology t) { return t == Topology::left_to_right ? "left_to_right" : "ergodic"; }

Topology parse_topology(const std::string& name) {
  if (name == "left_to_right") return Topology::left_to_right;
  if (name == "ergodic") return Topology::ergodic;
  throw Error("unknown HMM topology '" + name + "' (expected left_to_right or ergodic)");
}

}  // namespace vtract
