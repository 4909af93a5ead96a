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

#include "streamopt/cost.hpp"
#include "streamopt/error.hpp"
#include "streamopt/relax.hpp"
#include "test_support.hpp"

using namespace streamopt;
using doctest::Approx;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
  Matrix m(values.size(), values.begin()->size());
  std::size_t r = 0;
  for (const auto& row : values) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix random_logits(std::mt19937_64& rng, std::size_t units, std::size_t streams,
                     double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(units, streams);
  for (double& v : m.data()) v = n(rng);
  return m;
}

// Central differences of the relaxed loss with respect to each logit.
Matrix finite_difference_gradient(const RelaxedProblem& p, const Matrix& logits, double h) {
  Matrix g(logits.rows(), logits.cols());
  for (std::size_t u = 0; u < logits.rows(); ++u)
    for (std::size_t s = 0; s < logits.cols(); ++s) {
      Matrix plus = logits, minus = logits;
      plus(u, s) += h;
      minus(u, s) -= h;
      const double fp = relaxed_loss(p, SoftAssignment::from_logits(plus)).value;
      const double fm = relaxed_loss(p, SoftAssignment::from_logits(minus)).value;
      g(u, s) = (fp - fm) / (2.0 * h);
    }
  return g;
}

double max_relative_error(const Matrix& analytic, const Matrix& reference) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < analytic.data().size(); ++i) {
    diff = std::max(diff, std::abs(analytic.data()[i] - reference.data()[i]));
    scale = std::max(scale, std::abs(reference.data()[i]));
  }
  return diff / std::max(scale, 1e-300);
}

}  // namespace

TEST_CASE("softmax_rows closed forms") {
  const auto p = softmax_rows(rows({{0.0, 0.0}, {0.0, std::log(3.0)}}));
  CHECK(p(0, 0) == Approx(0.5));
  CHECK(p(0, 1) == Approx(0.5));
  CHECK(p(1, 0) == Approx(0.25));
  CHECK(p(1, 1) == Approx(0.75));
}

TEST_CASE("softmax_rows is shift invariant and stable for large logits") {
  std::mt19937_64 rng(1);
  const auto base = random_logits(rng, 6, 4);
  for (double c : {-700.0, -3.0, 5.0, 800.0}) {
    Matrix shifted = base;
    for (double& v : shifted.data()) v += c;
    const auto a = softmax_rows(base), b = softmax_rows(shifted);
    for (std::size_t i = 0; i < a.data().size(); ++i)
      CHECK(b.data()[i] == Approx(a.data()[i]).epsilon(1e-9));
  }
}

TEST_CASE("softmax rows are stochastic with entries in (0,1)") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = softmax_rows(random_logits(rng, 7, 5, 3.0));
    for (std::size_t r = 0; r < p.rows(); ++r) {
      double sum = 0.0;
      for (double v : p.row(r)) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("softmax_rows rejects non-finite logits") {
  CHECK_THROWS_AS(softmax_rows(rows({{0.0, NAN}})), Error);
  CHECK_THROWS_AS(softmax_rows(rows({{INFINITY, 0.0}})), Error);
}

TEST_CASE("expected_lines") {
  const std::vector<double> one_module{3.0};
  CHECK(expected_lines(one_module, rows({{0.5, 0.5}})) == std::vector<double>{1.5, 1.5});
  const std::vector<double> two{2.0, 1.0};
  CHECK(expected_lines(two, rows({{1, 0}, {0, 1}})) == std::vector<double>{2.0, 1.0});
  CHECK_THROWS_AS(expected_lines(two, rows({{1, 0}})), Error);
}

TEST_CASE("expected_events") {
  const auto single = ModuleIncidence::from_dense(rows({{1.0}}));
  CHECK(expected_events(single, rows({{0.5, 0.5}})) == std::vector<double>{0.5, 0.5});

  const auto pair = ModuleIncidence::from_dense(rows({{1.0, 0.5}}));
  const auto ev = expected_events(pair, rows({{1, 0}, {1, 0}}));
  CHECK(ev[0] == 1.0);
  CHECK(ev[1] == 0.0);
  CHECK_THROWS_AS(expected_events(pair, rows({{1, 0}})), Error);
}

TEST_CASE("relaxed loss of a half-split single line differs from E[T]") {
  RelaxedProblem p{ModuleIncidence::from_dense(rows({{1.0}})), {1.0}};
  const auto loss = relaxed_loss(p, SoftAssignment::from_probabilities(rows({{0.5, 0.5}})));
  CHECK(loss.value == Approx(0.5));
  // Rounded to either stream, T = 1 * 1 = 1; its expectation is 1.
  const double e_t = 0.5 * 1.0 + 0.5 * 1.0;
  CHECK(loss.value != Approx(e_t));
}

TEST_CASE("uniform probabilities over k streams with a single module") {
  Matrix d(6, 1);
  const double vals[] = {1.0, 0.5, 0.25, 1.0, 0.0, 0.75};
  double total = 0.0;
  for (int e = 0; e < 6; ++e) total += d(e, 0) = vals[e];
  for (std::size_t k : {1u, 2u, 5u}) {
    RelaxedProblem p{ModuleIncidence::from_dense(d), {4.0}};
    Matrix probs(1, k, 1.0 / static_cast<double>(k));
    const auto loss = relaxed_loss(p, SoftAssignment::from_probabilities(probs));
    CHECK(loss.value == Approx(4.0 / static_cast<double>(k) * total));
  }
}

TEST_CASE("one-hot relaxed loss equals the discrete cost") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    testing::RandomShape shape;
    shape.n_lines = 10;
    shape.n_modules = 5;
    shape.prescaled_fraction = trial % 2 ? 0.7 : 0.0;
    const auto d = testing::random_dataset(rng, shape);
    const auto p = RelaxedProblem::from_dataset(d);
    const auto s = testing::random_scheme(rng, 5, 3);
    const double relaxed = relaxed_loss(p, SoftAssignment::from_scheme(s)).value;
    CHECK(testing::close_rel(relaxed, cost_T(d, s).total, 1e-9));
  }
}

TEST_CASE("module folding reduces to the line-level relaxation") {
  // One module per line and unit prescales: compare with the line-level
  // formula evaluated directly on the event x line incidence.
  std::mt19937_64 rng(4);
  testing::RandomShape shape;
  shape.n_lines = shape.n_modules = 6;
  const auto d = testing::random_dataset(rng, shape);
  const auto soft = SoftAssignment::from_logits(random_logits(rng, 6, 3));
  const auto& L = soft.probabilities();

  double direct = 0.0;
  for (std::size_t s = 0; s < 3; ++s) {
    double lines = 0.0;
    for (std::size_t l = 0; l < 6; ++l) lines += L(d.module_of_line(static_cast<Index>(l)), s);
    double events = 0.0;
    for (std::size_t e = 0; e < d.n_events(); ++e) {
      double prod = 1.0;
      for (Index l : d.event_lines(static_cast<Index>(e)))
        prod *= 1.0 - d.line(l).prescale * L(d.module_of_line(l), s);
      events += 1.0 - prod;
    }
    direct += lines * events;
  }
  CHECK(relaxed_loss(RelaxedProblem::from_dataset(d), soft).value ==
        Approx(direct).epsilon(1e-12));
}

TEST_CASE("relaxed loss value equals the per-stream product sum") {
  std::mt19937_64 rng(5);
  const auto d = testing::random_dataset(rng, {});
  const auto loss = relaxed_loss(RelaxedProblem::from_dataset(d),
                                 SoftAssignment::from_logits(random_logits(rng, 4, 3)));
  double sum = 0.0;
  for (std::size_t s = 0; s < 3; ++s)
    sum += loss.per_stream_expected_lines[s] * loss.per_stream_expected_events[s];
  CHECK(loss.value == Approx(sum).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    testing::RandomShape shape;
    shape.n_events = 80;
    shape.n_lines = 9;
    shape.n_modules = 5;
    shape.prescaled_fraction = 0.5;
    const auto d = testing::random_dataset(rng, shape);
    const auto p = RelaxedProblem::from_dataset(d);
    const auto logits = random_logits(rng, 5, 3);
    const auto analytic = loss_gradient(p, SoftAssignment::from_logits(logits));
    const auto numeric = finite_difference_gradient(p, logits, 1e-5);
    CHECK(max_relative_error(analytic, numeric) < 1e-5);
  }
}

TEST_CASE("gradient is constant across streams for identical modules at uniform logits") {
  Matrix d(5, 3);
  for (std::size_t e = 0; e < 5; ++e)
    for (std::size_t m = 0; m < 3; ++m) d(e, m) = e % 2 ? 1.0 : 0.5;
  RelaxedProblem p{ModuleIncidence::from_dense(d), {2.0, 2.0, 2.0}};
  const auto g = loss_gradient(p, SoftAssignment::from_logits(Matrix(3, 4, 0.3)));
  for (std::size_t u = 0; u < 3; ++u)
    for (std::size_t s = 1; s < 4; ++s) CHECK(g(u, s) == Approx(g(u, 0)));
}

TEST_CASE("gradient vanishes with a single stream") {
  std::mt19937_64 rng(7);
  const auto d = testing::random_dataset(rng, {});
  const auto g = loss_gradient(RelaxedProblem::from_dataset(d),
                               SoftAssignment::from_logits(random_logits(rng, 4, 1)));
  for (double v : g.data()) CHECK(v == 0.0);
}

TEST_CASE("shifting a logit row leaves loss and probability-space gradient unchanged") {
  std::mt19937_64 rng(8);
  const auto d = testing::random_dataset(rng, {});
  const auto p = RelaxedProblem::from_dataset(d);
  const auto logits = random_logits(rng, 4, 3);
  Matrix shifted = logits;
  for (double& v : shifted.row(2)) v += 4.0;
  const auto a = SoftAssignment::from_logits(logits);
  const auto b = SoftAssignment::from_logits(shifted);
  CHECK(relaxed_loss(p, a).value == Approx(relaxed_loss(p, b).value).epsilon(1e-12));
  const auto ga = loss_gradient(p, a), gb = loss_gradient(p, b);
  for (std::size_t i = 0; i < ga.data().size(); ++i)
    CHECK(gb.data()[i] == Approx(ga.data()[i]).epsilon(1e-9));
}

TEST_CASE("from_probabilities validates rows") {
  CHECK_THROWS_AS(SoftAssignment::from_probabilities(rows({{0.6, 0.6}})), Error);
  CHECK_THROWS_AS(SoftAssignment::from_probabilities(rows({{1.2, -0.2}})), Error);
}
