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

#ifndef STREAMOPT_RELAX_HPP
#define STREAMOPT_RELAX_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "streamopt/matrix.hpp"
#include "streamopt/model.hpp"
#include "streamopt/module_incidence.hpp"

namespace streamopt {

/// Row-wise softmax with row-max subtraction. Throws Error(data) on
/// non-finite input.
Matrix softmax_rows(const Matrix& logits);

/// Unit x stream logits together with their softmax probabilities.
class SoftAssignment {
 public:
  static SoftAssignment from_logits(Matrix logits);
  /// For hard or externally produced assignments. Rows must be
  /// non-negative and sum to 1; logits are set to log(p).
  static SoftAssignment from_probabilities(Matrix probabilities);
  /// One-hot probabilities of a hard scheme.
  static SoftAssignment from_scheme(const Scheme& scheme);

  std::size_t n_units() const noexcept { return probs_.rows(); }
  std::size_t n_streams() const noexcept { return probs_.cols(); }
  const Matrix& logits() const noexcept { return logits_; }
  const Matrix& probabilities() const noexcept { return probs_; }

 private:
  Matrix logits_;
  Matrix probs_;
};

/// The module incidence plus the line count of every unit; everything the
/// relaxed loss needs.
struct RelaxedProblem {
  ModuleIncidence incidence;
  std::vector<double> lines_per_unit;

  static RelaxedProblem from_dataset(const Dataset& dataset);
  std::size_t n_units() const noexcept { return lines_per_unit.size(); }
};

struct RelaxedLoss {
  double value = 0.0;
  std::vector<double> per_stream_expected_lines;
  std::vector<double> per_stream_expected_events;
};

std::vector<double> expected_lines(std::span<const double> lines_per_unit,
                                   const Matrix& probs);

std::vector<double> expected_events(const ModuleIncidence& incidence,
                                    const Matrix& probs);

RelaxedLoss relaxed_loss(const RelaxedProblem& problem,
                         const SoftAssignment& soft);

/// Gradient of the relaxed loss with respect to the logits.
Matrix loss_gradient(const RelaxedProblem& problem, const SoftAssignment& soft);

/// Loss and logit gradient in a single pass over the events.
RelaxedLoss relaxed_loss_and_gradient(const RelaxedProblem& problem,
                                      const SoftAssignment& soft,
                                      Matrix& logit_gradient);

}  // namespace streamopt

#endif  // STREAMOPT_RELAX_HPP
