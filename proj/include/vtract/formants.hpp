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

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "vtract/lpc.hpp"

namespace vtract {

// A root of A(z) in the z-plane.
struct Pole {
  double real = 0.0;
  double imag = 0.0;

  static Pole polar(double radius, double angle_rad);

  std::complex<double> z() const { return {real, imag}; }
  double radius() const { return std::hypot(real, imag); }
  // In (-pi, pi].
  double angle_rad() const { return std::atan2(imag, real); }
  Pole conj() const { return {real, -imag}; }
};

struct Formant {
  double frequency_hz = 0.0;
  double bandwidth_hz = 0.0;
};

// Formants in strictly ascending frequency order.
struct FormantSet {
  std::vector<Formant> formants;
  double sample_rate_hz = 0.0;

  std::size_t size() const { return formants.size(); }
  bool empty() const { return formants.empty(); }
};

struct FormantFilterConfig {
  double min_frequency_hz = 50.0;
  double nyquist_margin_hz = 50.0;
  double max_bandwidth_hz = 700.0;
};

// All p roots of z^p A(z) from the eigenvalues of its companion matrix,
// polished by guarded Newton steps. Sorted by angle, then radius. Throws
// Error if the eigen-solver fails or a root's residual exceeds
// 1e-8 * max(1, max |alpha_i|).
std::vector<Pole> polynomial_roots(const PredictorPolynomial& poly);

// Monic real polynomial with the given roots. Complex roots must come in
// conjugate pairs; the imaginary residue of the expansion is discarded.
PredictorPolynomial polynomial_from_poles(const std::vector<Pole>& poles, double gain = 1.0);

// F = theta fs / (2 pi), B = -ln|z| fs / pi. Requires 0 < |z| <= 1 and
// 0 < theta <= pi.
Formant pole_to_formant(const Pole& z, double sample_rate_hz);

// Upper half-plane poles mapped through pole_to_formant, filtered to
// [min_frequency, fs/2 - margin] with bandwidth <= max_bandwidth and sorted
// ascending. Throws Error if a root lies outside the unit circle.
FormantSet extract_formants(const PredictorPolynomial& poly, double sample_rate_hz,
                            const FormantFilterConfig& cfg = {});

struct DisplacementReport {
  // |F_i(styled) - F_i(normal)| / F_i(normal) over shared indices.
  std::vector<double> relative_frequency_shift;
  // B_i(styled) - B_i(normal), Hz.
  std::vector<double> bandwidth_delta_hz;
  double mean_displacement = 0.0;
};

DisplacementReport formant_displacement(const FormantSet& styled, const FormantSet& normal);

// "index,frequency_hz,bandwidth_hz" with a header row; index is 1-based.
std::string formants_to_csv(const FormantSet& set);

}  // namespace vtract
