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

#include "streamopt/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "streamopt/error.hpp"

namespace streamopt {

Objective Objective::parse(std::string_view text) {
  Objective obj;
  if (text == "T") return obj;
  if (text == "S") {
    obj.kind = ObjectiveKind::S;
    return obj;
  }
  constexpr std::string_view prefix = "weighted:";
  if (text.starts_with(prefix)) {
    const auto tail = text.substr(prefix.size());
    double w = 0.0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), w);
    if (ec == std::errc{} && ptr == tail.data() + tail.size() && std::isfinite(w) &&
        w >= 0.0) {
      obj.kind = ObjectiveKind::weighted;
      obj.weight = w;
      return obj;
    }
  }
  throw Error(ErrorKind::usage,
              "objective must be T, S or weighted:<w> with w >= 0, got '" +
                  std::string(text) + "'");
}

double Objective::evaluate(const Dataset& dataset, const Scheme& scheme) const {
  switch (kind) {
    case ObjectiveKind::T:
      return cost_T(dataset, scheme).total;
    case ObjectiveKind::S:
      return cost_S(dataset, scheme, sizes).total;
    case ObjectiveKind::weighted:
      return cost_T(dataset, scheme).total + weight * cost_S(dataset, scheme, sizes).total;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::uint64_t count_partitions(std::size_t n, std::size_t k) {
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  auto sat_add = [](std::uint64_t a, std::uint64_t b) { return a > cap - b ? cap : a + b; };
  auto sat_mul = [](std::uint64_t a, std::uint64_t b) {
    return (a != 0 && b > cap / a) ? cap : a * b;
  };
  k = std::min(k, n);
  // Stirling numbers of the second kind, row by row.
  std::vector<std::uint64_t> row(k + 1, 0);
  row[0] = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = std::min(i, k); j >= 1; --j)
      row[j] = sat_add(sat_mul(j, row[j]), row[j - 1]);
    row[0] = 0;
  }
  std::uint64_t total = 0;
  for (auto v : row) total = sat_add(total, v);
  return total;
}

void for_each_set_partition(std::size_t n, std::size_t max_blocks,
                            const std::function<void(std::span<const Index>)>& visit) {
  if (n == 0) {
    visit({});
    return;
  }
  if (max_blocks == 0) return;
  std::vector<Index> code(n, 0);
  // prefix_max[i] = max(code[0..i]).
  std::vector<Index> prefix_max(n, 0);
  const Index top = static_cast<Index>(max_blocks - 1);
  while (true) {
    visit(code);
    std::size_t i = n;
    while (--i >= 1) {
      const Index limit = std::min<Index>(prefix_max[i - 1] + 1, top);
      if (code[i] < limit) break;
    }
    if (i == 0) return;
    ++code[i];
    prefix_max[i] = std::max(prefix_max[i - 1], code[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      code[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
}

OracleResult enumerate_optimal(const Dataset& dataset, std::size_t n_streams,
                               const Objective& objective, std::size_t top_k,
                               const OracleLimits& limits) {
  const std::size_t n = dataset.n_modules();
  if (n_streams < 1) throw Error(ErrorKind::usage, "n_streams must be >= 1");
  if (n > limits.max_modules || n_streams > limits.max_streams) {
    std::ostringstream msg;
    msg << "oracle limited to " << limits.max_modules << " modules and "
        << limits.max_streams << " streams (got " << n << " and " << n_streams
        << "); reduce the instance";
    throw Error(ErrorKind::infeasible, msg.str());
  }
  const std::uint64_t count = count_partitions(n, n_streams);
  if (count > limits.max_evaluations) {
    std::ostringstream msg;
    msg << "oracle would evaluate " << count << " schemes, above the cap of "
        << limits.max_evaluations << "; reduce the instance";
    throw Error(ErrorKind::infeasible, msg.str());
  }

  OracleResult result;
  result.best_cost = std::numeric_limits<double>::infinity();
  Scheme scheme{n_streams, std::vector<Index>(n, 0)};
  for_each_set_partition(n, n_streams, [&](std::span<const Index> code) {
    std::copy(code.begin(), code.end(), scheme.stream_of_unit.begin());
    const double cost = objective.evaluate(dataset, scheme);
    ++result.n_evaluated;
    if (cost < result.best_cost) {
      result.best_cost = cost;
      result.best_scheme = scheme;
    }
    if (top_k > 0) {
      auto& tail = result.ranked_tail;
      // upper_bound keeps earlier (lexicographically smaller) schemes first
      // among equal costs.
      auto pos = std::upper_bound(tail.begin(), tail.end(), cost,
                                  [](double c, const auto& e) { return c < e.second; });
      if (static_cast<std::size_t>(pos - tail.begin()) < top_k) {
        tail.emplace(pos, scheme, cost);
        if (tail.size() > top_k) tail.pop_back();
      }
    }
  });
  return result;
}

MonteCarloEstimate mc_prescale_check(const Dataset& dataset, const Scheme& scheme,
                                     std::size_t n_samples, std::uint64_t seed,
                                     const SizeModel& sizes) {
  check_scheme(dataset, scheme);
  if (n_samples < 1) throw Error(ErrorKind::usage, "n_samples must be >= 1");
  const std::size_t n_streams = scheme.n_streams;

  std::vector<double> lines_in(n_streams, 0.0);
  for (std::size_t l = 0; l < dataset.n_lines(); ++l)
    lines_in[scheme.stream_of_unit[dataset.module_of_line(static_cast<Index>(l))]] += 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto kept = [&](double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform(rng) < p;
  };

  std::vector<char> any(n_streams), reco(n_streams);
  std::vector<double> turbo(n_streams);
  double mean_t = 0.0, m2_t = 0.0, mean_s = 0.0, m2_s = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double t = 0.0, size = 0.0;
    for (std::size_t e = 0; e < dataset.n_events(); ++e) {
      std::fill(any.begin(), any.end(), 0);
      std::fill(reco.begin(), reco.end(), 0);
      std::fill(turbo.begin(), turbo.end(), 0.0);
      for (Index l : dataset.event_lines(static_cast<Index>(e))) {
        const LineRecord& line = dataset.line(l);
        if (!kept(line.prescale)) continue;
        const Index s = scheme.stream_of_unit[dataset.module_of_line(l)];
        any[s] = 1;
        if (line.is_turbo) turbo[s] += 1.0;
        if (line.is_persist_reco) reco[s] = 1;
      }
      for (std::size_t s = 0; s < n_streams; ++s) {
        if (any[s]) t += lines_in[s];
        size += sizes.base_kb * turbo[s] + (reco[s] ? sizes.shared_kb : 0.0);
      }
    }
    // Welford updates.
    const double k = static_cast<double>(i + 1);
    const double dt = t - mean_t;
    mean_t += dt / k;
    m2_t += dt * (t - mean_t);
    const double ds = size - mean_s;
    mean_s += ds / k;
    m2_s += ds * (size - mean_s);
  }

  MonteCarloEstimate est;
  est.n_samples = n_samples;
  est.mean_T = mean_t;
  est.mean_S = mean_s;
  if (n_samples > 1) {
    const double n = static_cast<double>(n_samples);
    est.stderr_T = std::sqrt(m2_t / (n - 1.0) / n);
    est.stderr_S = std::sqrt(m2_s / (n - 1.0) / n);
  }
  return est;
}

}  // namespace streamopt
