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

#include "streamopt/relax.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "streamopt/error.hpp"

namespace streamopt {

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto in = logits.row(r);
    auto out = probs.row(r);
    double top = -INFINITY;
    for (double a : in) {
      if (!std::isfinite(a)) throw Error(ErrorKind::data, "non-finite logit");
      top = std::max(top, a);
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - top);
      norm += out[c];
    }
    for (double& p : out) p /= norm;
  }
  return probs;
}

SoftAssignment SoftAssignment::from_logits(Matrix logits) {
  SoftAssignment soft;
  soft.probs_ = softmax_rows(logits);
  soft.logits_ = std::move(logits);
  return soft;
}

SoftAssignment SoftAssignment::from_probabilities(Matrix probabilities) {
  SoftAssignment soft;
  soft.logits_ = Matrix(probabilities.rows(), probabilities.cols());
  for (std::size_t r = 0; r < probabilities.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < probabilities.cols(); ++c) {
      const double p = probabilities(r, c);
      if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorKind::data, "probability outside [0,1]");
      sum += p;
      soft.logits_(r, c) = std::log(p);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "probability row " << r << " sums to " << sum;
      throw Error(ErrorKind::data, msg.str());
    }
  }
  soft.probs_ = std::move(probabilities);
  return soft;
}

SoftAssignment SoftAssignment::from_scheme(const Scheme& scheme) {
  Matrix probs(scheme.n_units(), scheme.n_streams);
  for (std::size_t u = 0; u < scheme.n_units(); ++u) {
    const Index s = scheme.stream_of_unit[u];
    if (s >= scheme.n_streams)
      throw Error(ErrorKind::data, "scheme has an unassigned or out-of-range unit");
    probs(u, s) = 1.0;
  }
  return from_probabilities(std::move(probs));
}

RelaxedProblem RelaxedProblem::from_dataset(const Dataset& dataset) {
  RelaxedProblem problem;
  problem.incidence = fold_modules(dataset);
  problem.lines_per_unit.resize(dataset.n_modules());
  for (std::size_t m = 0; m < dataset.n_modules(); ++m)
    problem.lines_per_unit[m] =
        static_cast<double>(dataset.lines_of_module(static_cast<Index>(m)).size());
  return problem;
}

namespace {

void check_units(std::size_t expected, std::size_t rows) {
  if (expected != rows) {
    std::ostringstream msg;
    msg << "assignment has " << rows << " units, expected " << expected;
    throw Error(ErrorKind::data, msg.str());
  }
}

// Per-stream expected event counts; when event_grad is non-null also
// accumulates d(events_s)/d(probs(m, s)) into it.
std::vector<double> event_pass(const ModuleIncidence& incidence, const Matrix& probs,
                               Matrix* event_grad) {
  check_units(incidence.n_modules(), probs.rows());
  const std::size_t n_streams = probs.cols();
  std::vector<CompensatedSum> sums(n_streams);
  std::vector<double> factor, prefix, suffix;

  for (std::size_t r = 0; r < incidence.n_rows(); ++r) {
    const auto mods = incidence.row_modules(r);
    const auto vals = incidence.row_values(r);
    const double w = incidence.row_weight(r);
    const std::size_t k = mods.size();
    factor.resize(k);
    prefix.resize(k + 1);
    suffix.resize(k + 1);

    for (std::size_t s = 0; s < n_streams; ++s) {
      prefix[0] = 1.0;
      for (std::size_t j = 0; j < k; ++j) {
        factor[j] = 1.0 - vals[j] * probs(mods[j], s);
        prefix[j + 1] = prefix[j] * factor[j];
      }
      sums[s].add(w * (1.0 - prefix[k]));
      if (event_grad == nullptr) continue;

      // prod over m' != m of the factors, without dividing by a factor that
      // may be zero.
      suffix[k] = 1.0;
      for (std::size_t j = k; j-- > 0;) suffix[j] = suffix[j + 1] * factor[j];
      for (std::size_t j = 0; j < k; ++j)
        (*event_grad)(mods[j], s) += w * vals[j] * prefix[j] * suffix[j + 1];
    }
  }

  std::vector<double> events(n_streams);
  for (std::size_t s = 0; s < n_streams; ++s) events[s] = sums[s].value();
  return events;
}

}  // namespace

std::vector<double> expected_lines(std::span<const double> lines_per_unit,
                                   const Matrix& probs) {
  check_units(lines_per_unit.size(), probs.rows());
  std::vector<double> lines(probs.cols(), 0.0);
  for (std::size_t u = 0; u < probs.rows(); ++u)
    for (std::size_t s = 0; s < probs.cols(); ++s)
      lines[s] += lines_per_unit[u] * probs(u, s);
  return lines;
}

std::vector<double> expected_events(const ModuleIncidence& incidence,
                                    const Matrix& probs) {
  return event_pass(incidence, probs, nullptr);
}

namespace {

RelaxedLoss combine(std::vector<double> lines, std::vector<double> events) {
  RelaxedLoss loss;
  CompensatedSum total;
  for (std::size_t s = 0; s < lines.size(); ++s) total.add(lines[s] * events[s]);
  loss.value = total.value();
  loss.per_stream_expected_lines = std::move(lines);
  loss.per_stream_expected_events = std::move(events);
  return loss;
}

}  // namespace

RelaxedLoss relaxed_loss(const RelaxedProblem& problem, const SoftAssignment& soft) {
  const Matrix& probs = soft.probabilities();
  return combine(expected_lines(problem.lines_per_unit, probs),
                 expected_events(problem.incidence, probs));
}

RelaxedLoss relaxed_loss_and_gradient(const RelaxedProblem& problem,
                                      const SoftAssignment& soft,
                                      Matrix& logit_gradient) {
  const Matrix& probs = soft.probabilities();
  const std::size_t n_units = probs.rows();
  const std::size_t n_streams = probs.cols();

  auto lines = expected_lines(problem.lines_per_unit, probs);
  Matrix grad(n_units, n_streams);
  auto events = event_pass(problem.incidence, probs, &grad);

  // grad holds d(events_s)/dp; turn it into dLoss/dp.
  for (std::size_t u = 0; u < n_units; ++u)
    for (std::size_t s = 0; s < n_streams; ++s)
      grad(u, s) = problem.lines_per_unit[u] * events[s] + lines[s] * grad(u, s);

  // Softmax Jacobian: dA = p * (dp - <p, dp>).
  logit_gradient = Matrix(n_units, n_streams);
  for (std::size_t u = 0; u < n_units; ++u) {
    double mean = 0.0;
    for (std::size_t s = 0; s < n_streams; ++s) mean += probs(u, s) * grad(u, s);
    for (std::size_t s = 0; s < n_streams; ++s)
      logit_gradient(u, s) = probs(u, s) * (grad(u, s) - mean);
  }
  return combine(std::move(lines), std::move(events));
}

Matrix loss_gradient(const RelaxedProblem& problem, const SoftAssignment& soft) {
  Matrix grad;
  relaxed_loss_and_gradient(problem, soft, grad);
  return grad;
}

}  // namespace streamopt
