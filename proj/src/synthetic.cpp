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

#include "streamopt/synthetic.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "streamopt/error.hpp"

namespace streamopt {

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::usage, what); };
  auto rate = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0,1]");
  };
  if (n_events < 1) fail("n_events must be >= 1");
  if (n_modules < 1) fail("n_modules must be >= 1");
  if (n_clusters < 1) fail("n_clusters must be >= 1");
  if (lines_per_module_min < 1 || lines_per_module_max < lines_per_module_min)
    fail("lines per module range must satisfy 1 <= min <= max");
  rate(intra_cluster_pass_rate, "intra_cluster_pass_rate");
  rate(cross_cluster_pass_rate, "cross_cluster_pass_rate");
  rate(prescaled_fraction, "prescaled_fraction");
  rate(prescale_min, "prescale_min");
  rate(turbo_fraction, "turbo_fraction");
  rate(persist_reco_fraction, "persist_reco_fraction");
}

namespace {

std::string padded(std::size_t value, std::size_t width) {
  auto s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

}  // namespace

SyntheticInstance gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> line_count(spec.lines_per_module_min,
                                                        spec.lines_per_module_max);

  const std::size_t width = std::to_string(spec.n_modules - 1).size();
  std::vector<LineRecord> lines;
  std::vector<std::size_t> cluster_of_line;
  std::vector<std::vector<Index>> lines_of_cluster(spec.n_clusters);
  for (std::size_t m = 0; m < spec.n_modules; ++m) {
    const std::string module = "M" + padded(m, width);
    const std::size_t cluster = m % spec.n_clusters;
    const std::size_t n = line_count(rng);
    for (std::size_t j = 0; j < n; ++j) {
      LineRecord rec;
      rec.name = module + "_L" + std::to_string(j);
      rec.module = module;
      if (uniform(rng) < spec.prescaled_fraction)
        rec.prescale = spec.prescale_min + (1.0 - spec.prescale_min) * uniform(rng);
      rec.is_turbo = uniform(rng) < spec.turbo_fraction;
      rec.is_persist_reco = uniform(rng) < spec.persist_reco_fraction;
      lines_of_cluster[cluster].push_back(static_cast<Index>(lines.size()));
      cluster_of_line.push_back(cluster);
      lines.push_back(std::move(rec));
    }
  }

  SyntheticInstance out;
  out.incidence.n_events = spec.n_events;
  out.incidence.n_lines = lines.size();
  std::uniform_int_distribution<std::size_t> pick_cluster(0, spec.n_clusters - 1);
  std::vector<Index> passed;
  constexpr int kMaxRedraws = 1000;
  for (std::size_t e = 0; e < spec.n_events; ++e) {
    const std::size_t cluster = pick_cluster(rng);
    passed.clear();
    for (int attempt = 0; attempt < kMaxRedraws && passed.empty(); ++attempt)
      for (std::size_t l = 0; l < lines.size(); ++l) {
        const double rate = cluster_of_line[l] == cluster ? spec.intra_cluster_pass_rate
                                                          : spec.cross_cluster_pass_rate;
        if (uniform(rng) < rate) passed.push_back(static_cast<Index>(l));
      }
    if (passed.empty()) {
      // Rates too low to ever fire; fall back to one line of the event's own
      // cluster, or any line when the cluster owns no module.
      const auto& own = lines_of_cluster[cluster];
      if (!own.empty())
        passed.push_back(own[std::uniform_int_distribution<std::size_t>(0, own.size() - 1)(rng)]);
      else
        passed.push_back(static_cast<Index>(
            std::uniform_int_distribution<std::size_t>(0, lines.size() - 1)(rng)));
    }
    for (Index l : passed) out.incidence.entries.emplace_back(static_cast<Index>(e), l);
  }

  out.catalog = LineCatalog::from_lines(std::move(lines));
  const std::size_t k = std::min(spec.n_clusters, spec.n_modules);
  out.planted = Scheme{k, std::vector<Index>(spec.n_modules)};
  for (std::size_t m = 0; m < spec.n_modules; ++m)
    out.planted.stream_of_unit[m] = static_cast<Index>(m % spec.n_clusters);
  return out;
}

}  // namespace streamopt
