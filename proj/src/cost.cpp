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

#include "streamopt/cost.hpp"

#include <vector>

#include "streamopt/matrix.hpp"

namespace streamopt {

namespace {

std::vector<std::size_t> lines_per_stream(const Dataset& dataset,
                                          const Scheme& scheme) {
  std::vector<std::size_t> counts(scheme.n_streams, 0);
  for (std::size_t m = 0; m < dataset.n_modules(); ++m)
    counts[scheme.stream_of_unit[m]] +=
        dataset.lines_of_module(static_cast<Index>(m)).size();
  return counts;
}

}  // namespace

CostBreakdown cost_T(const Dataset& dataset, const Scheme& scheme) {
  check_scheme(dataset, scheme);
  const std::size_t n_streams = scheme.n_streams;

  std::vector<CompensatedSum> events(n_streams);
  std::vector<double> miss(n_streams, 1.0);
  std::vector<char> hit(n_streams, 0);
  std::vector<Index> touched;

  for (std::size_t e = 0; e < dataset.n_events(); ++e) {
    for (Index l : dataset.event_lines(static_cast<Index>(e))) {
      const Index s = scheme.stream_of_unit[dataset.module_of_line(l)];
      if (!hit[s]) {
        hit[s] = 1;
        touched.push_back(s);
      }
      miss[s] *= 1.0 - dataset.line(l).prescale;
    }
    for (Index s : touched) {
      events[s].add(1.0 - miss[s]);
      miss[s] = 1.0;
      hit[s] = 0;
    }
    touched.clear();
  }

  const auto n_lines = lines_per_stream(dataset, scheme);
  const auto n_units = scheme.units_per_stream();
  CostBreakdown out;
  out.per_stream.resize(n_streams);
  CompensatedSum total;
  for (std::size_t s = 0; s < n_streams; ++s) {
    auto& sc = out.per_stream[s];
    sc.n_units = n_units[s];
    sc.n_lines = n_lines[s];
    sc.expected_events = events[s].value();
    sc.contribution = static_cast<double>(sc.n_lines) * sc.expected_events;
    total.add(sc.contribution);
  }
  out.total = total.value();
  return out;
}

StorageBreakdown cost_S(const Dataset& dataset, const Scheme& scheme,
                        const SizeModel& sizes) {
  check_scheme(dataset, scheme);
  const std::size_t n_streams = scheme.n_streams;

  std::vector<CompensatedSum> size(n_streams);
  std::vector<double> turbo(n_streams, 0.0);
  std::vector<double> reco_miss(n_streams, 1.0);
  std::vector<char> hit(n_streams, 0);
  std::vector<Index> touched;

  for (std::size_t e = 0; e < dataset.n_events(); ++e) {
    for (Index l : dataset.event_lines(static_cast<Index>(e))) {
      const LineRecord& line = dataset.line(l);
      const Index s = scheme.stream_of_unit[dataset.module_of_line(l)];
      if (!hit[s]) {
        hit[s] = 1;
        touched.push_back(s);
      }
      if (line.is_turbo) turbo[s] += line.prescale;
      if (line.is_persist_reco) reco_miss[s] *= 1.0 - line.prescale;
    }
    for (Index s : touched) {
      size[s].add(sizes.base_kb * turbo[s] + sizes.shared_kb * (1.0 - reco_miss[s]));
      turbo[s] = 0.0;
      reco_miss[s] = 1.0;
      hit[s] = 0;
    }
    touched.clear();
  }

  StorageBreakdown out;
  out.per_stream.resize(n_streams);
  CompensatedSum total;
  for (std::size_t s = 0; s < n_streams; ++s) {
    out.per_stream[s] = size[s].value();
    total.add(out.per_stream[s]);
  }
  out.total = total.value();
  return out;
}

ExtremeSchemes extreme_schemes(const Dataset& dataset) {
  const std::size_t n = dataset.n_modules();
  ExtremeSchemes out;
  out.single_stream = Scheme{1, std::vector<Index>(n, 0)};
  out.per_unit = Scheme{n, std::vector<Index>(n)};
  for (std::size_t m = 0; m < n; ++m) out.per_unit.stream_of_unit[m] = static_cast<Index>(m);
  return out;
}

}  // namespace streamopt
