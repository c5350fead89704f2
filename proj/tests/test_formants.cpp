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
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "vtract/error.hpp"
#include "vtract/formants.hpp"

using namespace vtract;
using cplx = std::complex<double>;

namespace {

PredictorPolynomial from_roots(const std::vector<cplx>& roots) {
  return PredictorPolynomial(oracle::expand_roots(roots));
}

}  // namespace

TEST_CASE("polynomial_roots worked examples") {
  SUBCASE("linear") {
    const auto r = polynomial_roots(PredictorPolynomial({-0.5}));
    REQUIRE(r.size() == 1);
    CHECK(r[0].real == doctest::Approx(0.5));
    CHECK(r[0].imag == 0.0);
  }
  SUBCASE("conjugate pair at 0.9 e^{+-j pi/4}") {
    const auto pair = std::polar(0.9, std::numbers::pi / 4);
    const auto r = polynomial_roots(from_roots({pair, std::conj(pair)}));
    REQUIRE(r.size() == 2);
    CHECK(r[1].radius() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r[1].angle_rad() == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
    CHECK(r[0].real == r[1].real);
    CHECK(r[0].imag == -r[1].imag);
  }
  SUBCASE("A(z) = 1 puts every root at the origin") {
    const auto r = polynomial_roots(PredictorPolynomial({0, 0, 0, 0}));
    REQUIRE(r.size() == 4);
    for (const auto& z : r) CHECK(z.radius() <= 1e-12);
  }
}

TEST_CASE("roots reproduce random stable polynomials") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + rng.below(12);
    const auto alpha = oracle::random_stable_alpha(p, rng, 0.95);
    const auto roots = polynomial_roots(PredictorPolynomial(alpha));
    REQUIRE(roots.size() == p);
    std::vector<cplx> zs;
    for (const auto& z : roots) zs.push_back(z.z());
    const auto rebuilt = oracle::expand_roots(zs);
    double scale = 1.0;
    for (double a : alpha) scale = std::max(scale, std::abs(a));
    for (std::size_t i = 0; i < p; ++i) CHECK(std::abs(rebuilt[i] - alpha[i]) <= 1e-8 * scale);
    std::size_t upper = 0, lower = 0;
    for (const auto& z : roots) {
      upper += z.imag > 0;
      lower += z.imag < 0;
    }
    CHECK(upper == lower);
  }
}

TEST_CASE("polynomial_from_poles inverts polynomial_roots") {
  Rng rng(78);
  for (int trial = 0; trial < 50; ++trial) {
    const auto alpha = oracle::random_stable_alpha(1 + rng.below(10), rng);
    const auto back = polynomial_from_poles(polynomial_roots(PredictorPolynomial(alpha))).coeffs();
    for (std::size_t i = 0; i < alpha.size(); ++i) CHECK(back[i] == doctest::Approx(alpha[i]).epsilon(1e-9));
  }
}

TEST_CASE("pole_to_formant") {
  const auto quarter = pole_to_formant(Pole::polar(0.9, std::numbers::pi / 2), 8000.0);
  CHECK(quarter.frequency_hz == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(pole_to_formant(Pole::polar(1.0, 1.0), 8000.0).bandwidth_hz == doctest::Approx(0.0));
  // -ln(0.95) * 8000 / pi evaluated to 17 digits.
  CHECK(pole_to_formant(Pole::polar(0.95, 0.3), 8000.0).bandwidth_hz ==
        doctest::Approx(130.61730158794316).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(pole_to_formant(Pole{0.0, 0.0}, 8000.0), doctest::Contains("origin"), Error);
  CHECK_THROWS_AS(pole_to_formant(Pole::polar(1.1, 0.5), 8000.0), Error);
  CHECK_THROWS_AS(pole_to_formant(Pole::polar(0.5, -0.5), 8000.0), Error);
}

TEST_CASE("pole_to_formant ranges and monotone bandwidth") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const double theta = rng.uniform(1e-6, std::numbers::pi - 1e-6);
    const double r = rng.uniform(1e-3, 0.999999);
    const auto f = pole_to_formant(Pole::polar(r, theta), 8000.0);
    CHECK(f.frequency_hz > 0.0);
    CHECK(f.frequency_hz < 4000.0);
    CHECK(f.bandwidth_hz > 0.0);
    const auto g = pole_to_formant(Pole::polar(r + 0.5 * (1.0 - r), theta), 8000.0);
    CHECK(g.bandwidth_hz < f.bandwidth_hz);
  }
}

TEST_CASE("extract_formants recovers constructed resonances") {
  const double fs = 8000.0;
  SUBCASE("two resonances") {
    auto roots = oracle::resonance(500, 60, fs);
    const auto second = oracle::resonance(1500, 90, fs);
    roots.insert(roots.end(), second.begin(), second.end());
    const auto set = extract_formants(from_roots(roots), fs);
    REQUIRE(set.size() == 2);
    CHECK(set.formants[0].frequency_hz == doctest::Approx(500).epsilon(1e-6));
    CHECK(set.formants[0].bandwidth_hz == doctest::Approx(60).epsilon(1e-6));
    CHECK(set.formants[1].frequency_hz == doctest::Approx(1500).epsilon(1e-6));
    CHECK(set.formants[1].bandwidth_hz == doctest::Approx(90).epsilon(1e-6));
  }
  SUBCASE("flat model has no formants") {
    CHECK(extract_formants(PredictorPolynomial({0, 0, 0, 0}), fs).empty());
  }
  SUBCASE("filter rules") {
    auto roots = oracle::resonance(1000, 900, fs);
    const auto ok = oracle::resonance(2000, 100, fs);
    const auto low = oracle::resonance(30, 50, fs);
    const auto high = oracle::resonance(3980, 50, fs);
    for (const auto* extra : {&ok, &low, &high}) roots.insert(roots.end(), extra->begin(), extra->end());
    const auto set = extract_formants(from_roots(roots), fs);
    REQUIRE(set.size() == 1);
    CHECK(set.formants[0].frequency_hz == doctest::Approx(2000));
    FormantFilterConfig wide{10.0, 10.0, 1000.0};
    CHECK(extract_formants(from_roots(roots), fs, wide).size() == 4);
  }
  SUBCASE("random pole sets in band come back exactly and sorted") {
    Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<cplx> roots;
      std::vector<std::pair<double, double>> truth;
      const std::size_t pairs = 1 + rng.below(5);
      for (std::size_t i = 0; i < pairs; ++i) {
        const double f = rng.uniform(100, 3900);
        const double b = rng.uniform(20, 600);
        truth.emplace_back(f, b);
        const auto pr = oracle::resonance(f, b, fs);
        roots.insert(roots.end(), pr.begin(), pr.end());
      }
      std::sort(truth.begin(), truth.end());
      const auto set = extract_formants(from_roots(roots), fs);
      REQUIRE(set.size() == pairs);
      for (std::size_t i = 0; i < pairs; ++i) {
        CHECK(set.formants[i].frequency_hz == doctest::Approx(truth[i].first).epsilon(1e-6));
        CHECK(set.formants[i].bandwidth_hz == doctest::Approx(truth[i].second).epsilon(1e-6));
        if (i) CHECK(set.formants[i].frequency_hz > set.formants[i - 1].frequency_hz);
      }
    }
  }
  SUBCASE("unstable model is rejected") {
    CHECK_THROWS_AS(extract_formants(PredictorPolynomial({-2.5, 1.0}), fs), Error);
  }
}

TEST_CASE("formant_displacement") {
  FormantSet normal{{{500, 60}, {1500, 90}}, 8000};
  CHECK(formant_displacement(normal, normal).mean_displacement == 0.0);

  FormantSet one{{{550, 70}}, 8000};
  FormantSet base{{{500, 60}}, 8000};
  const auto d = formant_displacement(one, base);
  CHECK(d.mean_displacement == doctest::Approx(0.10));
  CHECK(d.bandwidth_delta_hz[0] == doctest::Approx(10.0));

  FormantSet styled{{{550, 60}, {1500, 90}}, 8000};
  CHECK(formant_displacement(styled, normal).mean_displacement == doctest::Approx(0.05));

  // Only shared indices are compared.
  CHECK(formant_displacement(one, normal).relative_frequency_shift.size() == 1);
  CHECK_THROWS_AS(formant_displacement(FormantSet{{}, 8000}, normal), Error);
}

TEST_CASE("formant csv") {
  FormantSet set{{{500, 60}, {1500.5, 90.25}}, 8000};
  CHECK(formants_to_csv(set) == "index,frequency_hz,bandwidth_hz\n1,500,60\n2,1500.5,90.25\n");
}
