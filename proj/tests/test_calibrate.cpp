// Copyright 2026 The streamopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>

#include "streamopt/calibrate.hpp"
#include "streamopt/error.hpp"
#include "test_support.hpp"

using namespace streamopt;
using doctest::Approx;

TEST_CASE("fit_linear recovers an exact line") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * v + 1.0);
  const auto r = fit_linear(x, y);
  CHECK(std::abs(r.slope - 2.0) <= 1e-12);
  CHECK(std::abs(r.intercept - 1.0) <= 1e-12);
  CHECK(std::abs(r.r_squared - 1.0) <= 1e-12);
  CHECK(r.n_points == 5);
  CHECK(r.time_uncertainty == 0.02);
}

TEST_CASE("fit_linear on constant y") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{7, 7, 7, 7};
  const auto r = fit_linear(x, y);
  CHECK(r.slope == 0.0);
  CHECK(r.intercept == 7.0);
  CHECK(r.r_squared == 0.0);
}

TEST_CASE("fit_linear errors") {
  const std::vector<double> x{1, 1, 1}, y{1, 2, 3}, short_y{1, 2};
  CHECK_THROWS_AS(fit_linear(x, y), Error);
  CHECK_THROWS_AS(fit_linear(y, short_y), Error);
  CHECK_THROWS_AS(fit_linear(std::vector<double>{1}, std::vector<double>{1}), Error);
}

TEST_CASE("fit_linear: scale equivariance and R^2 equals squared correlation") {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(25), y(25);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = n(rng) * 10.0;
      y[i] = 0.7 * x[i] + 3.0 * n(rng) + 1.0;
    }
    const auto r = fit_linear(x, y);
    CHECK(r.r_squared <= 1.0);

    const double a = -3.5;
    std::vector<double> ay;
    for (double v : y) ay.push_back(a * v);
    const auto scaled = fit_linear(x, ay);
    CHECK(scaled.slope == Approx(a * r.slope).epsilon(1e-12));
    CHECK(scaled.intercept == Approx(a * r.intercept).epsilon(1e-10));
    CHECK(scaled.r_squared == Approx(r.r_squared).epsilon(1e-12));

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= 25;
    my /= 25;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    CHECK(std::abs(r.r_squared - corr * corr) <= 1e-12);
  }
}

TEST_CASE("t_real worked example and identities") {
  std::vector<MeasurementRecord> recs(2);
  recs[0].n_lines = 2;
  recs[0].measured_time = 19.0;
  recs[1].n_lines = 1;
  recs[1].measured_time = 14.0;
  CHECK(t_real(recs, 9.0) == 25.0);
  CHECK(t_real(recs, 0.0) == 2 * 19.0 + 14.0);
  std::swap(recs[0], recs[1]);
  CHECK(t_real(recs, 9.0) == 25.0);

  std::vector<MeasurementRecord> one(1);
  one[0].n_lines = 7;
  one[0].measured_time = 9.0 + 1.5;
  CHECK(t_real(one, 9.0) == Approx(7 * 1.5));
}

TEST_CASE("t_real is linear in the measured times") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(10.0, 30.0);
  std::vector<MeasurementRecord> a(6), b(6), sum(6);
  for (std::size_t i = 0; i < 6; ++i) {
    a[i].n_lines = b[i].n_lines = sum[i].n_lines = i + 1;
    a[i].measured_time = u(rng);
    b[i].measured_time = u(rng);
    sum[i].measured_time = a[i].measured_time + b[i].measured_time;
  }
  CHECK(t_real(sum, 0.0) == Approx(t_real(a, 0.0) + t_real(b, 0.0)).epsilon(1e-12));
}

TEST_CASE("t_real rejects times below the initialisation time") {
  std::vector<MeasurementRecord> recs(1);
  recs[0].scheme_id = "opt";
  recs[0].stream_id = "3";
  recs[0].n_lines = 1;
  recs[0].measured_time = 8.0;
  try {
    t_real(recs, 9.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("stream '3'") != std::string::npos);
  }
}

TEST_CASE("calibration links measurements to model terms") {
  auto catalog = LineCatalog::from_lines({{"a", 1.0, true, false, "A"},
                                          {"b", 1.0, true, true, "B"},
                                          {"c", 1.0, true, false, "C"}});
  EventLineIncidence inc{6, 3, {{0, 0}, {1, 0}, {2, 1}, {3, 1}, {4, 2}, {5, 0}, {5, 2}}};
  const auto d = Dataset::build(inc, catalog);
  const std::map<std::string, Scheme> schemes{{"split", Scheme{3, {0, 1, 2}}},
                                              {"pair", Scheme{2, {0, 0, 1}}}};

  // Synthesise exact measurements: time = t0 + 0.5 * events, size = model S.
  std::vector<MeasurementRecord> recs;
  for (const auto& [id, scheme] : schemes) {
    const auto cost = cost_T(d, scheme);
    const auto size = cost_S(d, scheme);
    for (std::size_t s = 0; s < scheme.n_streams; ++s) {
      MeasurementRecord r;
      r.scheme_id = id;
      r.stream_id = std::to_string(s);
      r.n_lines = cost.per_stream[s].n_lines;
      r.measured_time = 9.0 + 0.5 * cost.per_stream[s].expected_events;
      r.measured_size = 1.1 * size.per_stream[s] + 3.0;
      recs.push_back(r);
    }
  }
  attach_model_terms(d, schemes, recs);
  const auto pooled = calibrate(recs, true, 9.0);
  REQUIRE(pooled.size() == 1);
  CHECK(pooled[0].label == "*");
  CHECK(pooled[0].n_records == 5);
  CHECK(pooled[0].time_fit.slope == Approx(0.5));
  CHECK(pooled[0].time_fit.r_squared == Approx(1.0));
  CHECK(pooled[0].size_fit.slope == Approx(1.1));
  CHECK(pooled[0].size_fit.intercept == Approx(3.0));
  CHECK(pooled[0].t_real == Approx(t_real(recs, 9.0)));

  const auto per = calibrate(recs, false, 9.0);
  REQUIRE(per.size() == 2);
  CHECK(per[0].label == recs.front().scheme_id);
  CHECK(per[0].n_records + per[1].n_records == 5);

  auto bad = recs;
  bad[0].n_lines += 1;
  CHECK_THROWS_AS(attach_model_terms(d, schemes, bad), Error);
  bad = recs;
  bad[0].stream_id = "9";
  CHECK_THROWS_AS(attach_model_terms(d, schemes, bad), Error);
  bad = recs;
  bad[0].scheme_id = "missing";
  CHECK_THROWS_AS(attach_model_terms(d, schemes, bad), Error);

  std::vector<MeasurementRecord> bare(2);
  CHECK_THROWS_AS(calibrate(bare, true, 0.0), Error);
}
