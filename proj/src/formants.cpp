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

#include "vtract/formants.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vtract/error.hpp"

namespace vtract {

namespace {

using cplx = std::complex<double>;

// Evaluates z^p + alpha_1 z^(p-1) + ... + alpha_p and its derivative.
void evaluate_monic(const std::vector<double>& alpha, cplx z, cplx& value, cplx& slope) {
  value = 1.0;
  slope = 0.0;
  for (double a : alpha) {
    slope = slope * z + value;
    value = value * z + a;
  }
}

std::string describe(const PredictorPolynomial& poly) {
  std::ostringstream s;
  s.precision(17);
  s << "[1";
  for (double a : poly.coeffs()) s << ", " << a;
  s << "]";
  return s.str();
}

}  // namespace

Pole Pole::polar(double radius, double angle_rad) {
  return {radius * std::cos(angle_rad), radius * std::sin(angle_rad)};
}

std::vector<Pole> polynomial_roots(const PredictorPolynomial& poly) {
  const auto& alpha = poly.coeffs();
  const std::size_t p = alpha.size();

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) companion(0, static_cast<Eigen::Index>(j)) = -alpha[j];
  for (std::size_t i = 1; i < p; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw Error("polynomial_roots: eigenvalue iteration did not converge for A(z) = " + describe(poly));

  double scale = 1.0;
  for (double a : alpha) scale = std::max(scale, std::abs(a));
  const double tolerance = 1e-8 * scale;

  std::vector<Pole> roots;
  roots.reserve(p);
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    cplx z = solver.eigenvalues()[i];
    cplx value, slope;
    evaluate_monic(alpha, z, value, slope);
    for (int step = 0; step < 3 && std::abs(value) > 0.0 && std::abs(slope) > 0.0; ++step) {
      const cplx candidate = z - value / slope;
      cplx cv, cs;
      evaluate_monic(alpha, candidate, cv, cs);
      if (!(std::abs(cv) < std::abs(value))) break;
      z = candidate;
      value = cv;
      slope = cs;
    }
    if (!(std::abs(value) <= tolerance))
      throw Error("polynomial_roots: root residual too large for A(z) = " + describe(poly));
    roots.push_back({z.real(), z.imag()});
  }
  // Polishing acts on each member of a conjugate pair separately; restore
  // exact symmetry by rebuilding lower-half roots from their partners.
  std::vector<Pole> upper;
  std::vector<Pole> real_roots;
  for (const auto& r : roots) {
    if (r.imag > 0.0) upper.push_back(r);
    else if (r.imag == 0.0) real_roots.push_back(r);
  }
  if (2 * upper.size() + real_roots.size() == p) {
    roots = real_roots;
    for (const auto& u : upper) {
      roots.push_back(u);
      roots.push_back(u.conj());
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Pole& a, const Pole& b) {
    const double ta = a.angle_rad(), tb = b.angle_rad();
    if (ta != tb) return ta < tb;
    return a.radius() < b.radius();
  });
  return roots;
}

PredictorPolynomial polynomial_from_poles(const std::vector<Pole>& poles, double gain) {
  if (poles.empty()) throw Error("polynomial_from_poles: need at least one pole");
  std::vector<cplx> c{1.0};
  for (const auto& pole : poles) {
    const cplx z = pole.z();
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= z * c[i];
    }
    c = std::move(next);
  }
  std::vector<double> alpha(poles.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = c[i + 1].real();
  return PredictorPolynomial(std::move(alpha), gain);
}

Formant pole_to_formant(const Pole& z, double sample_rate_hz) {
  const double radius = z.radius();
  const double angle = z.angle_rad();
  if (radius == 0.0) throw Error("pole_to_formant: pole at the origin has undefined bandwidth");
  if (!(radius <= 1.0)) throw Error("pole_to_formant: pole lies outside the unit circle");
  if (!(angle > 0.0)) throw Error("pole_to_formant: pole must lie in the upper half plane");
  return {angle * sample_rate_hz / (2.0 * std::numbers::pi),
          -std::log(radius) * sample_rate_hz / std::numbers::pi};
}

FormantSet extract_formants(const PredictorPolynomial& poly, double sample_rate_hz,
                            const FormantFilterConfig& cfg) {
  FormantSet set;
  set.sample_rate_hz = sample_rate_hz;
  const double upper_limit = 0.5 * sample_rate_hz - cfg.nyquist_margin_hz;
  for (const auto& pole : polynomial_roots(poly)) {
    if (pole.radius() >= 1.0)
      throw Error("extract_formants: unstable model, pole radius " + std::to_string(pole.radius()));
    if (!(pole.imag > 0.0)) continue;
    const Formant f = pole_to_formant(pole, sample_rate_hz);
    if (f.frequency_hz < cfg.min_frequency_hz || f.frequency_hz > upper_limit) continue;
    if (f.bandwidth_hz > cfg.max_bandwidth_hz) continue;
    set.formants.push_back(f);
  }
  std::sort(set.formants.begin(), set.formants.end(), [](const Formant& a, const Formant& b) {
    if (a.frequency_hz != b.frequency_hz) return a.frequency_hz < b.frequency_hz;
    return a.bandwidth_hz < b.bandwidth_hz;
  });
  // Repeated roots would break strict ordering; keep the narrower one.
  set.formants.erase(std::unique(set.formants.begin(), set.formants.end(),
                                 [](const Formant& a, const Formant& b) {
                                   return a.frequency_hz == b.frequency_hz;
                                 }),
                     set.formants.end());
  return set;
}

DisplacementReport formant_displacement(const FormantSet& styled, const FormantSet& normal) {
  if (styled.empty() || normal.empty())
    throw Error("formant_displacement: both formant sets must be non-empty");
  DisplacementReport report;
  const std::size_t n = std::min(styled.size(), normal.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = styled.formants[i];
    const auto& r = normal.formants[i];
    const double shift = std::abs(s.frequency_hz - r.frequency_hz) / r.frequency_hz;
    report.relative_frequency_shift.push_back(shift);
    report.bandwidth_delta_hz.push_back(s.bandwidth_hz - r.bandwidth_hz);
    sum += shift;
  }
  report.mean_displacement = sum / static_cast<double>(n);
  return report;
}

std::string formants_to_csv(const FormantSet& set) {
  std::ostringstream s;
  s.precision(10);
  s << "index,frequency_hz,bandwidth_hz\n";
  for (std::size_t i = 0; i < set.formants.size(); ++i)
    s << (i + 1) << ',' << set.formants[i].frequency_hz << ',' << set.formants[i].bandwidth_hz << '\n';
  return s.str();
}

}  // namespace vtract
