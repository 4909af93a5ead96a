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

#include "streamopt/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "streamopt/error.hpp"

namespace streamopt {

void OptimizerConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::usage, what); };
  if (n_streams < 1) fail("n_streams must be >= 1");
  if (n_restarts < 1) fail("n_restarts must be >= 1");
  if (max_iters < 1) fail("max_iters must be >= 1");
  if (!(step_size > 0.0)) fail("step_size must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) fail("beta1 must lie in (0,1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) fail("beta2 must lie in (0,1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(plateau_tol > 0.0)) fail("plateau_tol must be positive");
  if (plateau_window < 1) fail("plateau_window must be >= 1");
  if (!(init_scale > 0.0)) fail("init_scale must be positive");
}

AdaMax::AdaMax(std::size_t n_params, double step_size, double beta1, double beta2,
               double epsilon)
    : step_size_(step_size),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      moment_(n_params, 0.0),
      inf_norm_(n_params, 0.0) {}

void AdaMax::step(std::span<double> params, std::span<const double> gradient) {
  beta1_power_ *= beta1_;
  const double rate = step_size_ / (1.0 - beta1_power_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    moment_[i] = beta1_ * moment_[i] + (1.0 - beta1_) * gradient[i];
    inf_norm_[i] = std::max(beta2_ * inf_norm_[i], std::abs(gradient[i]));
    params[i] -= rate * moment_[i] / (inf_norm_[i] + epsilon_);
  }
}

Scheme round_assignment(const SoftAssignment& soft) {
  const Matrix& probs = soft.probabilities();
  Scheme scheme{probs.cols(), std::vector<Index>(probs.rows(), 0)};
  for (std::size_t u = 0; u < probs.rows(); ++u) {
    const auto row = probs.row(u);
    // max_element returns the first maximum, which is the tie-break we want.
    scheme.stream_of_unit[u] =
        static_cast<Index>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return scheme;
}

double max_row_entropy(const Matrix& probs) {
  double worst = 0.0;
  for (std::size_t u = 0; u < probs.rows(); ++u) {
    double h = 0.0;
    for (double p : probs.row(u))
      if (p > 0.0) h -= p * std::log(p);
    worst = std::max(worst, h);
  }
  return worst;
}

namespace {

struct RestartOutcome {
  RestartSummary summary;
  Scheme scheme;
};

RestartOutcome run_restart(const Dataset& dataset, const RelaxedProblem& problem,
                           const OptimizerConfig& config, std::size_t restart) {
  const std::size_t n_units = problem.n_units();
  const std::size_t n_streams = config.n_streams;

  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> init(0.0, config.init_scale);

  Matrix logits(n_units, n_streams);
  for (double& a : logits.data()) a = init(rng);

  AdaMax rule(logits.data().size(), config.step_size, config.beta1, config.beta2,
              config.epsilon);
  std::vector<double> history;
  history.reserve(std::min<std::size_t>(config.max_iters, 1 << 16));
  Matrix grad;

  RestartOutcome out;
  auto& summary = out.summary;
  try {
    for (std::size_t it = 0; it < config.max_iters; ++it) {
      const auto soft = SoftAssignment::from_logits(logits);
      const double loss = relaxed_loss_and_gradient(problem, soft, grad).value;
      summary.iterations = it + 1;
      if (!std::isfinite(loss)) {
        summary.finite = false;
        return out;
      }
      history.push_back(loss);
      if (history.size() > config.plateau_window) {
        const double before = history[history.size() - 1 - config.plateau_window];
        const double scale = std::max(std::abs(before), std::numeric_limits<double>::min());
        if ((before - loss) / scale < config.plateau_tol) break;
      }
      rule.step(logits.data(), grad.data());
    }
    const auto soft = SoftAssignment::from_logits(logits);
    summary.relaxed_loss = relaxed_loss(problem, soft).value;
    summary.max_row_entropy = max_row_entropy(soft.probabilities());
    out.scheme = round_assignment(soft);
  } catch (const Error&) {
    // from_logits rejects non-finite logits.
    summary.finite = false;
    return out;
  }
  if (!std::isfinite(summary.relaxed_loss)) {
    summary.finite = false;
    return out;
  }
  summary.discrete_cost = cost_T(dataset, out.scheme).total;
  summary.n_empty_streams = out.scheme.n_empty_streams();
  return out;
}

}  // namespace

OptimizationResult optimize(const Dataset& dataset, const RelaxedProblem& problem,
                            const OptimizerConfig& config) {
  config.validate();
  const std::size_t n_modules = dataset.n_modules();
  if (problem.n_units() != n_modules)
    throw Error(ErrorKind::data, "relaxed problem does not match the dataset");
  if (config.n_streams > n_modules) {
    std::ostringstream msg;
    msg << "cannot fill " << config.n_streams << " streams with " << n_modules
        << " modules";
    throw Error(ErrorKind::infeasible, msg.str());
  }

  OptimizationResult result;
  result.seed = config.seed;

  if (config.n_streams == 1) {
    result.best_scheme = Scheme{1, std::vector<Index>(n_modules, 0)};
    result.best_cost_discrete = cost_T(dataset, result.best_scheme);
    result.best_loss_relaxed = result.best_cost_discrete.total;
    RestartSummary only;
    only.relaxed_loss = result.best_loss_relaxed;
    only.discrete_cost = result.best_cost_discrete.total;
    result.per_restart.push_back(only);
    return result;
  }

  std::vector<RestartOutcome> outcomes(config.n_restarts);
  std::size_t n_threads = config.n_threads;
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, config.n_restarts);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < config.n_restarts;) {
      try {
        outcomes[r] = run_restart(dataset, problem, config, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    result.per_restart.push_back(outcomes[r].summary);
    const auto& s = outcomes[r].summary;
    if (!s.finite) continue;
    if (!best || s.discrete_cost < outcomes[*best].summary.discrete_cost) best = r;
  }
  if (!best)
    throw Error(ErrorKind::data, "every restart produced a non-finite loss");

  result.best_restart = *best;
  result.best_scheme = outcomes[*best].scheme;
  result.best_loss_relaxed = outcomes[*best].summary.relaxed_loss;
  result.best_cost_discrete = cost_T(dataset, result.best_scheme);
  return result;
}

OptimizationResult optimize(const Dataset& dataset, const OptimizerConfig& config) {
  return optimize(dataset, RelaxedProblem::from_dataset(dataset), config);
}

std::vector<SweepPoint> sweep_streams(const Dataset& dataset,
                                      std::span<const std::size_t> stream_counts,
                                      const OptimizerConfig& config,
                                      const SizeModel& sizes) {
  const auto problem = RelaxedProblem::from_dataset(dataset);
  std::vector<SweepPoint> points;
  points.reserve(stream_counts.size());
  for (std::size_t k : stream_counts) {
    if (k < 1) throw Error(ErrorKind::usage, "stream counts must be >= 1");
    OptimizerConfig cfg = config;
    cfg.n_streams = k;
    SweepPoint point;
    point.n_streams = k;
    point.result = optimize(dataset, problem, cfg);
    point.storage = cost_S(dataset, point.result.best_scheme, sizes);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace streamopt
