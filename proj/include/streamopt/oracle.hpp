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

#ifndef STREAMOPT_ORACLE_HPP
#define STREAMOPT_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "streamopt/cost.hpp"
#include "streamopt/model.hpp"

namespace streamopt {

enum class ObjectiveKind { T, S, weighted };

/// Discrete objective. `weighted` is cost_T + weight * cost_S.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::T;
  double weight = 0.0;
  SizeModel sizes{};

  /// Accepts "T", "S" or "weighted:<w>".
  static Objective parse(std::string_view text);
  double evaluate(const Dataset& dataset, const Scheme& scheme) const;
};

struct OracleLimits {
  std::size_t max_modules = 12;
  std::size_t max_streams = 4;
  std::uint64_t max_evaluations = 10'000'000;
};

struct OracleResult {
  Scheme best_scheme;
  double best_cost = 0.0;
  std::uint64_t n_evaluated = 0;
  std::vector<std::pair<Scheme, double>> ranked_tail;
};

/// Number of partitions of n items into at most k blocks.
std::uint64_t count_partitions(std::size_t n, std::size_t k);

/// Visits every restricted-growth string of length n with values below
/// max_blocks, in lexicographic order. Each string is a canonical set
/// partition: item i belongs to block code[i].
void for_each_set_partition(std::size_t n, std::size_t max_blocks,
                            const std::function<void(std::span<const Index>)>& visit);

/// Exhaustive minimum of the objective over all assignments of modules to
/// at most n_streams streams, up to relabeling. Ties go to the
/// lexicographically smallest canonical assignment. top_k > 0 also keeps
/// the k best schemes in ranked_tail. Throws Error(infeasible) when the
/// instance exceeds the limits.
OracleResult enumerate_optimal(const Dataset& dataset, std::size_t n_streams,
                               const Objective& objective = {},
                               std::size_t top_k = 0,
                               const OracleLimits& limits = {});

struct MonteCarloEstimate {
  std::size_t n_samples = 0;
  double mean_T = 0.0;
  double stderr_T = 0.0;
  double mean_S = 0.0;
  double stderr_S = 0.0;
};

/// Samples every (event, line) prescale decision as an independent
/// Bernoulli draw and measures realized discrete T and S.
MonteCarloEstimate mc_prescale_check(const Dataset& dataset, const Scheme& scheme,
                                     std::size_t n_samples, std::uint64_t seed,
                                     const SizeModel& sizes = {});

}  // namespace streamopt

#endif  // STREAMOPT_ORACLE_HPP
