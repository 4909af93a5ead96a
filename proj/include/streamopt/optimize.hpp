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

#ifndef STREAMOPT_OPTIMIZE_HPP
#define STREAMOPT_OPTIMIZE_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "streamopt/cost.hpp"
#include "streamopt/model.hpp"
#include "streamopt/relax.hpp"

namespace streamopt {

struct OptimizerConfig {
  std::size_t n_streams = 2;
  std::size_t n_restarts = 20;
  std::size_t max_iters = 5000;
  double step_size = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double plateau_tol = 1e-7;
  std::size_t plateau_window = 100;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
  std::size_t n_threads = 0;  // 0: hardware concurrency

  /// Throws Error(usage) on invalid values.
  void validate() const;
};

/// First-order update rule applied to a flat parameter vector.
class UpdateRule {
 public:
  virtual ~UpdateRule() = default;
  virtual void step(std::span<double> params,
                    std::span<const double> gradient) = 0;
};

/// Adam variant with an infinity-norm second moment.
class AdaMax final : public UpdateRule {
 public:
  AdaMax(std::size_t n_params, double step_size, double beta1, double beta2,
         double epsilon);

  void step(std::span<double> params, std::span<const double> gradient) override;

 private:
  double step_size_;
  double beta1_;
  double beta2_;
  double epsilon_;
  double beta1_power_ = 1.0;
  std::vector<double> moment_;
  std::vector<double> inf_norm_;
};

struct RestartSummary {
  bool finite = true;
  double relaxed_loss = 0.0;
  double discrete_cost = 0.0;
  std::size_t iterations = 0;
  double max_row_entropy = 0.0;
  std::size_t n_empty_streams = 0;
};

struct OptimizationResult {
  Scheme best_scheme;
  double best_loss_relaxed = 0.0;
  CostBreakdown best_cost_discrete;
  std::size_t best_restart = 0;
  std::vector<RestartSummary> per_restart;
  std::uint64_t seed = 0;
};

/// Argmax per unit, ties to the lowest stream index.
Scheme round_assignment(const SoftAssignment& soft);

/// Largest Shannon entropy (nats) over the probability rows.
double max_row_entropy(const Matrix& probs);

/// Multi-restart AdaMax descent on the relaxed loss. Restarts are ranked by
/// the discrete cost of their rounded schemes; equal costs go to the lower
/// restart index. Throws Error(infeasible) if n_streams exceeds the number
/// of modules.
OptimizationResult optimize(const Dataset& dataset, const RelaxedProblem& problem,
                            const OptimizerConfig& config);
OptimizationResult optimize(const Dataset& dataset, const OptimizerConfig& config);

struct SweepPoint {
  std::size_t n_streams = 0;
  OptimizationResult result;
  StorageBreakdown storage;
};

std::vector<SweepPoint> sweep_streams(const Dataset& dataset,
                                      std::span<const std::size_t> stream_counts,
                                      const OptimizerConfig& config,
                                      const SizeModel& sizes = {});

}  // namespace streamopt

#endif  // STREAMOPT_OPTIMIZE_HPP
