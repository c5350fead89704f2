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

#include "vtract/lpc.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "vtract/error.hpp"
#include "vtract/fileio.hpp"

namespace vtract {

PredictorPolynomial::PredictorPolynomial(std::vector<double> coeffs, double gain)
    : coeffs_(std::move(coeffs)), gain_(gain) {
  if (coeffs_.empty()) throw Error("predictor polynomial: order must be at least 1");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw Error("predictor polynomial: non-finite coefficient");
  if (!(gain_ > 0.0) || !std::isfinite(gain_))
    throw Error("predictor polynomial: gain must be positive and finite");
}

std::vector<double> PredictorPolynomial::denominator() const {
  std::vector<double> d;
  d.reserve(coeffs_.size() + 1);
  d.push_back(1.0);
  d.insert(d.end(), coeffs_.begin(), coeffs_.end());
  return d;
}

AreaFunction::AreaFunction(std::vector<double> areas) : areas_(std::move(areas)) {
  if (areas_.size() < 2) throw Error("area function: at least two sections are required");
  for (std::size_t i = 0; i < areas_.size(); ++i) {
    if (!(areas_[i] > 0.0) || !std::isfinite(areas_[i]))
      throw Error("area function: section " + std::to_string(i + 1) + " is not a positive finite area");
  }
}

LevinsonResult levinson_durbin(const AutocorrSequence& r) {
  const auto& v = r.values;
  if (v.size() < 2) throw Error("levinson_durbin: need autocorrelation lags 0..p with p >= 1");
  if (!(v[0] > 0.0)) throw Error("levinson_durbin: zero-lag energy r[0] must be positive");
  const std::size_t p = v.size() - 1;

  std::vector<double> a(p, 0.0);
  std::vector<double> prev(p, 0.0);
  std::vector<double> k(p, 0.0);
  double energy = v[0];
  for (std::size_t m = 1; m <= p; ++m) {
    double acc = v[m];
    for (std::size_t i = 1; i < m; ++i) acc += a[i - 1] * v[m - i];
    const double km = -acc / energy;
    if (!std::isfinite(km) || std::abs(km) >= 1.0) {
      std::ostringstream msg;
      msg << "levinson_durbin: singular recursion at stage " << m << " of " << p
          << " (reflection coefficient " << km << ")";
      throw Error(msg.str());
    }
    prev = a;
    for (std::size_t i = 1; i < m; ++i) a[i - 1] = prev[i - 1] + km * prev[m - i - 1];
    a[m - 1] = km;
    k[m - 1] = km;
    energy *= 1.0 - km * km;
    if (!(energy > 0.0)) {
      throw Error("levinson_durbin: prediction error vanished at stage " + std::to_string(m) +
                  " (perfectly predictable input)");
    }
  }
  return LevinsonResult{PredictorPolynomial(std::move(a), std::sqrt(energy)), energy,
                        ReflectionCoeffs{std::move(k)}};
}

ReflectionCoeffs area_to_reflection(const AreaFunction& a) {
  const auto& A = a.areas();
  ReflectionCoeffs k;
  k.values.resize(A.size() - 1);
  for (std::size_t i = 0; i + 1 < A.size(); ++i) k.values[i] = (A[i] - A[i + 1]) / (A[i] + A[i + 1]);
  return k;
}

AreaFunction reflection_to_area(const ReflectionCoeffs& k, double first_area) {
  std::vector<double> A;
  A.reserve(k.values.size() + 1);
  A.push_back(first_area);
  for (double ki : k.values) {
    if (!(std::abs(ki) < 1.0)) throw Error("reflection_to_area: |k| must be below 1");
    A.push_back(A.back() * (1.0 - ki) / (1.0 + ki));
  }
  return AreaFunction(std::move(A));
}

PredictorPolynomial reflection_to_predictor(const ReflectionCoeffs& k, double gain) {
  const std::size_t p = k.values.size();
  if (p == 0) throw Error("reflection_to_predictor: need at least one coefficient");
  std::vector<double> a(p, 0.0);
  std::vector<double> prev(p, 0.0);
  for (std::size_t m = 1; m <= p; ++m) {
    const double km = k.values[m - 1];
    if (!(std::abs(km) < 1.0))
      throw Error("reflection_to_predictor: |k_" + std::to_string(m) + "| must be below 1");
    prev = a;
    for (std::size_t i = 1; i < m; ++i) a[i - 1] = prev[i - 1] + km * prev[m - i - 1];
    a[m - 1] = km;
  }
  return PredictorPolynomial(std::move(a), gain);
}

ReflectionCoeffs predictor_to_reflection(const PredictorPolynomial& poly) {
  std::vector<double> a = poly.coeffs();
  const std::size_t p = a.size();
  ReflectionCoeffs k;
  k.values.assign(p, 0.0);
  std::vector<double> prev(p);
  for (std::size_t m = p; m >= 1; --m) {
    const double km = a[m - 1];
    if (!(std::abs(km) < 1.0)) {
      std::ostringstream msg;
      msg << "predictor_to_reflection: polynomial is not minimum phase (|k_" << m << "| = "
          << std::abs(km) << ")";
      throw Error(msg.str());
    }
    k.values[m - 1] = km;
    const double denom = 1.0 - km * km;
    prev = a;
    for (std::size_t i = 1; i < m; ++i) a[i - 1] = (prev[i - 1] - km * prev[m - i - 1]) / denom;
  }
  return k;
}

bool is_minimum_phase(const PredictorPolynomial& p) {
  try {
    predictor_to_reflection(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<SpectrumPoint> frequency_response(const PredictorPolynomial& p, std::size_t n_points,
                                              double sample_rate_hz) {
  if (n_points < 2) throw Error("frequency_response: need at least two points");
  if (!(sample_rate_hz > 0.0)) throw Error("frequency_response: sample rate must be positive");
  const auto den = p.denominator();
  std::vector<SpectrumPoint> out;
  out.reserve(n_points);
  for (std::size_t j = 0; j < n_points; ++j) {
    const double omega = std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_points - 1);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < den.size(); ++i)
      acc += den[i] * std::polar(1.0, -omega * static_cast<double>(i));
    out.push_back({0.5 * sample_rate_hz * static_cast<double>(j) / static_cast<double>(n_points - 1),
                   20.0 * std::log10(p.gain() / std::abs(acc))});
  }
  return out;
}

AreaFunction parse_area_function(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> areas;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size())
      throw Error("area file line " + std::to_string(line_no) + ": '" + token + "' is not a number");
    if (!(value > 0.0) || !std::isfinite(value))
      throw Error("area file line " + std::to_string(line_no) + ": area must be positive");
    areas.push_back(value);
  }
  if (areas.size() < 2)
    throw Error("area file: need at least two sections, found " + std::to_string(areas.size()));
  return AreaFunction(std::move(areas));
}

AreaFunction read_area_function(const std::filesystem::path& path) {
  try {
    return parse_area_function(read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

LevinsonResult lpc_from_frames(const std::vector<Frame>& frames, std::size_t order) {
  if (frames.empty()) throw Error("lpc_from_frames: no frames to analyze");
  AutocorrSequence sum;
  sum.values.assign(order + 1, 0.0);
  for (const auto& f : frames) {
    const auto r = autocorrelate(f, order);
    for (std::size_t k = 0; k <= order; ++k) sum.values[k] += r.values[k];
  }
  for (auto& v : sum.values) v /= static_cast<double>(frames.size());
  if (!(sum.values[0] > 0.0)) throw Error("lpc_from_frames: frames carry no energy");
  return levinson_durbin(sum);
}

}  // namespace vtract
