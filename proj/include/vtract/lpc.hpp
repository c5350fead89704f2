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
#include <filesystem>
#include <string>
#include <vector>

#include "vtract/signals.hpp"

namespace vtract {

// All-pole vocal-tract model H(z) = gain / A(z) with
//
//     A(z) = 1 + alpha_1 z^-1 + ... + alpha_p z^-p.
//
// Note the "+" convention: many texts write 1 - sum a_i z^-i, in which case
// alpha_i = -a_i. Every routine in this library uses the "+" form.
class PredictorPolynomial {
 public:
  // Throws Error unless coeffs is non-empty and finite and gain > 0.
  PredictorPolynomial(std::vector<double> coeffs, double gain = 1.0);

  const std::vector<double>& coeffs() const { return coeffs_; }
  double gain() const { return gain_; }
  std::size_t order() const { return coeffs_.size(); }

  // Denominator coefficients [1, alpha_1, ..., alpha_p].
  std::vector<double> denominator() const;

 private:
  std::vector<double> coeffs_;
  double gain_;
};

// Lattice (tube junction) reflection coefficients k_1..k_p; |k_i| < 1.
struct ReflectionCoeffs {
  std::vector<double> values;
};

// Cross-sectional areas A_1..A_{p+1} of p+1 cylindrical sections, glottis
// first. Every area is positive.
class AreaFunction {
 public:
  explicit AreaFunction(std::vector<double> areas);

  const std::vector<double>& areas() const { return areas_; }
  std::size_t sections() const { return areas_.size(); }

 private:
  std::vector<double> areas_;
};

struct LevinsonResult {
  PredictorPolynomial polynomial;
  double residual_energy;
  ReflectionCoeffs reflection;
};

// Autocorrelation-method LPC by the Levinson-Durbin recursion. The returned
// gain is sqrt(residual_energy). Throws Error naming the failing stage if
// r[0] <= 0 or a reflection coefficient reaches magnitude 1.
LevinsonResult levinson_durbin(const AutocorrSequence& r);

// k_i = (A_i - A_{i+1}) / (A_i + A_{i+1}).
ReflectionCoeffs area_to_reflection(const AreaFunction& a);

// Inverse of area_to_reflection given the glottal area A_1.
AreaFunction reflection_to_area(const ReflectionCoeffs& k, double first_area = 1.0);

// Step-up recursion: a_i^(m) = a_i^(m-1) + k_m a_{m-i}^(m-1), a_m^(m) = k_m.
PredictorPolynomial reflection_to_predictor(const ReflectionCoeffs& k, double gain = 1.0);

// Step-down recursion. Throws Error if the polynomial is not minimum phase.
ReflectionCoeffs predictor_to_reflection(const PredictorPolynomial& p);

// True when every root of A(z) lies strictly inside the unit circle.
bool is_minimum_phase(const PredictorPolynomial& p);

struct SpectrumPoint {
  double frequency_hz;
  double magnitude_db;
};

// 20 log10(gain / |A(e^jw)|) at n_points frequencies evenly spaced over
// [0, sample_rate_hz / 2], both ends included.
std::vector<SpectrumPoint> frequency_response(const PredictorPolynomial& p, std::size_t n_points,
                                              double sample_rate_hz);

// Plain-text area function: one positive decimal per line, glottis first.
// Blank lines and lines starting with '#' are skipped.
AreaFunction parse_area_function(const std::string& text);
AreaFunction read_area_function(const std::filesystem::path& path);

// Biased autocorrelation averaged over a set of analysis frames, followed by
// Levinson-Durbin. Throws Error if the frames carry no energy.
LevinsonResult lpc_from_frames(const std::vector<Frame>& frames, std::size_t order);

}  // namespace vtract
