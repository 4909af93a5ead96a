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

#include "streamopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "streamopt/error.hpp"

namespace streamopt {

LineCatalog LineCatalog::from_lines(std::vector<LineRecord> lines) {
  LineCatalog catalog;
  std::unordered_set<std::string> seen;
  for (const auto& line : lines)
    if (seen.insert(line.module).second) catalog.modules.push_back(line.module);
  catalog.lines = std::move(lines);
  return catalog;
}

std::vector<std::string> validate_dataset(const EventLineIncidence& incidence,
                                          const LineCatalog& catalog) {
  std::vector<std::string> report;

  if (incidence.n_lines != catalog.lines.size()) {
    std::ostringstream msg;
    msg << "incidence declares " << incidence.n_lines << " lines but catalog has "
        << catalog.lines.size();
    report.push_back(msg.str());
  }

  std::unordered_map<std::string, std::size_t> module_index;
  for (std::size_t m = 0; m < catalog.modules.size(); ++m)
    if (!module_index.emplace(catalog.modules[m], m).second)
      report.push_back("duplicate module '" + catalog.modules[m] + "'");

  std::vector<std::size_t> module_size(catalog.modules.size(), 0);
  std::unordered_set<std::string> names;
  for (const auto& line : catalog.lines) {
    if (!names.insert(line.name).second)
      report.push_back("duplicate line name '" + line.name + "'");
    if (!(line.prescale >= 0.0 && line.prescale <= 1.0)) {
      std::ostringstream msg;
      msg << "line '" << line.name << "' has prescale " << line.prescale
          << " outside [0,1]";
      report.push_back(msg.str());
    }
    auto it = module_index.find(line.module);
    if (it == module_index.end())
      report.push_back("line '" + line.name + "' references unknown module '" +
                       line.module + "'");
    else
      ++module_size[it->second];
  }
  for (std::size_t m = 0; m < catalog.modules.size(); ++m)
    if (module_size[m] == 0)
      report.push_back("module '" + catalog.modules[m] + "' contains no lines");

  std::set<std::pair<Index, Index>> seen;
  for (const auto& [event, line] : incidence.entries) {
    if (event >= incidence.n_events) {
      std::ostringstream msg;
      msg << "event index " << event << " out of range (n_events = "
          << incidence.n_events << ")";
      report.push_back(msg.str());
    }
    if (line >= catalog.lines.size()) {
      std::ostringstream msg;
      msg << "line index " << line << " out of range (catalog has "
          << catalog.lines.size() << " lines)";
      report.push_back(msg.str());
    }
    if (!seen.emplace(event, line).second) {
      std::ostringstream msg;
      msg << "duplicate entry (event " << event << ", line " << line << ")";
      report.push_back(msg.str());
    }
  }
  return report;
}

Dataset Dataset::build(const EventLineIncidence& incidence,
                       const LineCatalog& catalog) {
  if (auto report = validate_dataset(incidence, catalog); !report.empty()) {
    std::string what = "invalid dataset:";
    for (const auto& v : report) what += "\n  " + v;
    throw Error(ErrorKind::data, what);
  }

  Dataset d;
  d.catalog_ = catalog;

  std::unordered_map<std::string, Index> module_index;
  for (std::size_t m = 0; m < catalog.modules.size(); ++m)
    module_index.emplace(catalog.modules[m], static_cast<Index>(m));
  const std::size_t n_modules = catalog.modules.size();
  d.module_of_line_.resize(catalog.lines.size());
  d.module_start_.assign(n_modules + 1, 0);
  for (std::size_t l = 0; l < catalog.lines.size(); ++l) {
    const Index m = module_index.at(catalog.lines[l].module);
    d.module_of_line_[l] = m;
    ++d.module_start_[m + 1];
  }
  std::partial_sum(d.module_start_.begin(), d.module_start_.end(),
                   d.module_start_.begin());
  d.module_lines_.resize(catalog.lines.size());
  {
    auto fill = d.module_start_;
    for (std::size_t l = 0; l < catalog.lines.size(); ++l)
      d.module_lines_[fill[d.module_of_line_[l]]++] = static_cast<Index>(l);
  }

  std::vector<std::vector<Index>> rows(incidence.n_events);
  for (const auto& [event, line] : incidence.entries) rows[event].push_back(line);

  for (std::size_t e = 0; e < rows.size(); ++e) {
    auto& row = rows[e];
    if (row.empty()) {
      ++d.n_dropped_;
      continue;
    }
    std::sort(row.begin(), row.end());
    d.event_lines_.insert(d.event_lines_.end(), row.begin(), row.end());
    d.row_start_.push_back(d.event_lines_.size());
    d.source_event_.push_back(static_cast<Index>(e));
  }
  return d;
}

std::vector<std::size_t> Scheme::units_per_stream() const {
  std::vector<std::size_t> counts(n_streams, 0);
  for (Index s : stream_of_unit)
    if (s < n_streams) ++counts[s];
  return counts;
}

std::size_t Scheme::n_empty_streams() const {
  const auto counts = units_per_stream();
  return static_cast<std::size_t>(std::count(counts.begin(), counts.end(), 0u));
}

void check_scheme(const Dataset& dataset, const Scheme& scheme) {
  if (scheme.n_units() != dataset.n_modules()) {
    std::ostringstream msg;
    msg << "scheme assigns " << scheme.n_units() << " units but dataset has "
        << dataset.n_modules() << " modules";
    if (scheme.n_units() < dataset.n_modules())
      msg << "; module '" << dataset.module_name(static_cast<Index>(scheme.n_units()))
          << "' is unassigned";
    throw Error(ErrorKind::data, msg.str());
  }
  if (scheme.n_streams == 0) throw Error(ErrorKind::data, "scheme has no streams");
  for (std::size_t m = 0; m < scheme.n_units(); ++m) {
    const Index s = scheme.stream_of_unit[m];
    if (s == Scheme::unassigned)
      throw Error(ErrorKind::data,
                  "module '" + dataset.module_name(static_cast<Index>(m)) +
                      "' is unassigned");
    if (s >= scheme.n_streams) {
      std::ostringstream msg;
      msg << "module '" << dataset.module_name(static_cast<Index>(m))
          << "' assigned to stream " << s << " but scheme has " << scheme.n_streams
          << " streams";
      throw Error(ErrorKind::data, msg.str());
    }
  }
}

Scheme random_balanced_scheme(std::size_t n_units, std::size_t n_streams,
                              std::uint64_t seed) {
  if (n_streams == 0) throw Error(ErrorKind::usage, "n_streams must be >= 1");
  std::vector<Index> order(n_units);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  Scheme scheme{n_streams, std::vector<Index>(n_units)};
  for (std::size_t i = 0; i < n_units; ++i)
    scheme.stream_of_unit[order[i]] = static_cast<Index>(i % n_streams);
  return scheme;
}

}  // namespace streamopt
