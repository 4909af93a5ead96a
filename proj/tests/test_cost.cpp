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

#include <numeric>
#include <random>

#include "streamopt/cost.hpp"
#include "streamopt/error.hpp"
#include "test_support.hpp"

using namespace streamopt;
using doctest::Approx;

namespace {

Dataset three_line_instance() {
  // l1:{e1,e3}, l2:{e1,e2}, l3:{e2}; one module per line.
  auto catalog = LineCatalog::from_lines({{"l1", 1.0, true, false, "l1"},
                                          {"l2", 1.0, true, false, "l2"},
                                          {"l3", 1.0, true, false, "l3"}});
  return Dataset::build({3, 3, {{0, 0}, {2, 0}, {0, 1}, {1, 1}, {1, 2}}}, catalog);
}

}  // namespace

TEST_CASE("cost_T: two streams of direct counts") {
  auto catalog = LineCatalog::from_lines({{"a1", 1.0, true, false, "A"},
                                          {"a2", 1.0, true, false, "A"},
                                          {"b1", 1.0, true, false, "B"}});
  EventLineIncidence inc{15, 3, {}};
  for (Index e = 0; e < 10; ++e) inc.entries.emplace_back(e, e % 2);
  for (Index e = 10; e < 15; ++e) inc.entries.emplace_back(e, 2);
  const auto d = Dataset::build(inc, catalog);
  const auto cost = cost_T(d, Scheme{2, {0, 1}});
  CHECK(cost.total == 25.0);
  CHECK(cost.per_stream[0].n_lines == 2);
  CHECK(cost.per_stream[0].expected_events == 10.0);
  CHECK(cost.per_stream[1].contribution == 5.0);
}

TEST_CASE("cost_T: prescaled lines enter through expectations") {
  auto catalog = LineCatalog::from_lines({{"x", 0.5, true, false, "X"},
                                          {"y", 0.5, true, false, "Y"}});
  const auto d = Dataset::build({1, 2, {{0, 0}, {0, 1}}}, catalog);
  const auto cost = cost_T(d, Scheme{1, {0, 0}});
  CHECK(cost.per_stream[0].expected_events == Approx(0.75));
  CHECK(cost.total == Approx(1.5));
}

TEST_CASE("cost_T: three-line instance against set enumeration") {
  const auto d = three_line_instance();
  const Scheme chosen{2, {1, 0, 0}};  // {l2,l3} | {l1}
  CHECK(cost_T(d, chosen).total == 6.0);

  // Every partition of three lines into at most two streams.
  const std::vector<Scheme> all = {
      {2, {0, 0, 0}}, {2, {0, 0, 1}}, {2, {0, 1, 0}}, {2, {0, 1, 1}}};
  double best = 1e300;
  for (const auto& s : all) best = std::min(best, testing::set_union_T(d, s));
  CHECK(best == 6.0);
}

TEST_CASE("cost_T rejects a scheme that leaves a module unassigned") {
  const auto d = three_line_instance();
  CHECK_THROWS_AS(cost_T(d, Scheme{2, {0, Scheme::unassigned, 1}}), Error);
  CHECK_THROWS_AS(cost_S(d, Scheme{2, {0, 1}}), Error);
}

TEST_CASE("cost_S: Turbo and PersistReco terms") {
  auto catalog = LineCatalog::from_lines({{"t1", 1.0, true, false, "A"},
                                          {"t2", 1.0, true, false, "A"},
                                          {"tp", 1.0, true, true, "A"},
                                          {"other", 1.0, true, false, "B"}});
  const auto d = Dataset::build({2, 4, {{0, 0}, {0, 1}, {0, 2}, {1, 3}}}, catalog);
  const auto s = cost_S(d, Scheme{2, {0, 1}});
  CHECK(s.per_stream[0] == 80.0);  // event 1 passes nothing in stream 0
  CHECK(s.per_stream[1] == 10.0);
  CHECK(s.total == 90.0);

  const auto custom = cost_S(d, Scheme{2, {0, 1}}, SizeModel{1.0, 2.0});
  CHECK(custom.per_stream[0] == 5.0);
}

TEST_CASE("cost_S: a PersistReco-only line contributes no Turbo term") {
  auto catalog = LineCatalog::from_lines({{"p", 1.0, false, true, "A"}});
  const auto d = Dataset::build({1, 1, {{0, 0}}}, catalog);
  CHECK(cost_S(d, Scheme{1, {0}}).total == 50.0);
}

TEST_CASE("cost_S: prescaled PersistReco line matches Monte-Carlo sampling") {
  auto catalog = LineCatalog::from_lines({{"tp", 0.5, true, true, "A"}});
  const auto d = Dataset::build({1, 1, {{0, 0}}}, catalog);
  const double analytic = cost_S(d, Scheme{1, {0}}).total;
  CHECK(analytic == Approx(30.0));

  std::mt19937_64 rng(2024);
  std::bernoulli_distribution keep(0.5);
  const int n = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double size = keep(rng) ? 60.0 : 0.0;
    sum += size;
    sum_sq += size * size;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - analytic) < 3.0 * se);
}

TEST_CASE("extreme schemes bound T and S") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    testing::RandomShape shape;
    shape.n_lines = 8;
    shape.n_modules = 4;
    shape.prescaled_fraction = trial % 2 ? 0.5 : 0.0;
    const auto d = testing::random_dataset(rng, shape);
    const auto ext = extreme_schemes(d);
    CHECK(ext.per_unit.n_streams == 4);
    CHECK(ext.single_stream.n_streams == 1);
    const double t_min = cost_T(d, ext.per_unit).total;
    const double s_min = cost_S(d, ext.single_stream).total;
    for (int k = 0; k < 10; ++k) {
      const auto s = testing::random_scheme(rng, 4, 1 + k % 4);
      CHECK(t_min <= cost_T(d, s).total * (1 + 1e-12));
      CHECK(s_min <= cost_S(d, s).total * (1 + 1e-12));
    }
  }
}

TEST_CASE("with unit prescales the expected event count is the set-union count") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = testing::random_dataset(rng, {});
    const auto s = testing::random_scheme(rng, d.n_modules(), 3);
    CHECK(cost_T(d, s).total == testing::set_union_T(d, s));
  }
}

TEST_CASE("cost_T is invariant under stream relabeling and event reordering") {
  std::mt19937_64 rng(33);
  testing::RandomShape shape;
  shape.prescaled_fraction = 0.5;
  auto [inc, cat] = testing::random_raw(rng, shape);
  const auto d = Dataset::build(inc, cat);
  const auto s = testing::random_scheme(rng, d.n_modules(), 3);
  const double base = cost_T(d, s).total;

  Scheme relabeled = s;
  for (auto& v : relabeled.stream_of_unit) v = (v + 1) % 3;
  CHECK(cost_T(d, relabeled).total == Approx(base).epsilon(1e-12));

  std::vector<Index> perm(inc.n_events);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  auto shuffled = inc;
  for (auto& [e, l] : shuffled.entries) e = perm[e];
  CHECK(cost_T(Dataset::build(shuffled, cat), s).total == Approx(base).epsilon(1e-12));
}
