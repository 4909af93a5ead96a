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

#ifndef STREAMOPT_MODULE_INCIDENCE_HPP
#define STREAMOPT_MODULE_INCIDENCE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "streamopt/matrix.hpp"
#include "streamopt/model.hpp"

namespace streamopt {

/// Probability that each event is selected by each module, stored as sparse
/// rows. Events with identical rows share one stored row whose weight is
/// their multiplicity; every sum over events is a weighted sum over rows.
class ModuleIncidence {
 public:
  ModuleIncidence() = default;

  /// Each input row lists the nonzero (module, probability) pairs of one
  /// event.
  static ModuleIncidence from_rows(
      std::size_t n_modules,
      const std::vector<std::vector<std::pair<Index, double>>>& events);
  static ModuleIncidence from_dense(const Matrix& values);

  std::size_t n_events() const noexcept { return event_row_.size(); }
  std::size_t n_modules() const noexcept { return n_modules_; }
  std::size_t n_rows() const noexcept { return weight_.size(); }

  std::span<const Index> row_modules(std::size_t r) const {
    return {modules_.data() + start_[r], start_[r + 1] - start_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + start_[r], start_[r + 1] - start_[r]};
  }
  double row_weight(std::size_t r) const { return weight_[r]; }

  /// Selection probability of event e by module m.
  double value(std::size_t e, Index m) const;

  /// Event x module matrix. Throws Error(usage) above max_modules columns.
  Matrix to_dense(std::size_t max_modules = 512) const;

 private:
  std::size_t n_modules_ = 0;
  std::vector<std::size_t> start_{0};
  std::vector<Index> modules_;
  std::vector<double> values_;
  std::vector<double> weight_;
  std::vector<std::size_t> event_row_;
};

/// Folds line-level selections into module-level probabilities:
/// value(e, m) = 1 - prod over lines l of m of (1 - passes(e, l) * prescale(l)).
ModuleIncidence fold_modules(const Dataset& dataset);

}  // namespace streamopt

#endif  // STREAMOPT_MODULE_INCIDENCE_HPP
