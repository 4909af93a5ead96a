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

#include "streamopt/module_incidence.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "streamopt/error.hpp"

namespace streamopt {

ModuleIncidence ModuleIncidence::from_rows(
    std::size_t n_modules,
    const std::vector<std::vector<std::pair<Index, double>>>& events) {
  ModuleIncidence mi;
  mi.n_modules_ = n_modules;
  mi.event_row_.reserve(events.size());

  std::map<std::vector<std::pair<Index, double>>, std::size_t> row_of;
  std::vector<std::pair<Index, double>> key;
  for (const auto& event : events) {
    key.clear();
    for (const auto& [m, v] : event) {
      if (m >= n_modules) {
        std::ostringstream msg;
        msg << "module index " << m << " out of range (" << n_modules << " modules)";
        throw Error(ErrorKind::data, msg.str());
      }
      if (!(v >= 0.0 && v <= 1.0))
        throw Error(ErrorKind::data, "module selection probability outside [0,1]");
      if (v > 0.0) key.emplace_back(m, v);
    }
    std::sort(key.begin(), key.end());
    auto [it, inserted] = row_of.try_emplace(key, mi.weight_.size());
    if (inserted) {
      for (const auto& [m, v] : key) {
        mi.modules_.push_back(m);
        mi.values_.push_back(v);
      }
      mi.start_.push_back(mi.modules_.size());
      mi.weight_.push_back(0.0);
    }
    mi.weight_[it->second] += 1.0;
    mi.event_row_.push_back(it->second);
  }
  return mi;
}

ModuleIncidence ModuleIncidence::from_dense(const Matrix& values) {
  std::vector<std::vector<std::pair<Index, double>>> events(values.rows());
  for (std::size_t e = 0; e < values.rows(); ++e)
    for (std::size_t m = 0; m < values.cols(); ++m)
      events[e].emplace_back(static_cast<Index>(m), values(e, m));
  return from_rows(values.cols(), events);
}

double ModuleIncidence::value(std::size_t e, Index m) const {
  const std::size_t r = event_row_.at(e);
  const auto mods = row_modules(r);
  const auto it = std::lower_bound(mods.begin(), mods.end(), m);
  if (it == mods.end() || *it != m) return 0.0;
  return row_values(r)[static_cast<std::size_t>(it - mods.begin())];
}

Matrix ModuleIncidence::to_dense(std::size_t max_modules) const {
  if (n_modules_ > max_modules) {
    std::ostringstream msg;
    msg << "refusing to densify " << n_modules_ << " modules (limit " << max_modules
        << ")";
    throw Error(ErrorKind::usage, msg.str());
  }
  Matrix dense(n_events(), n_modules_);
  for (std::size_t e = 0; e < n_events(); ++e) {
    const std::size_t r = event_row_[e];
    const auto mods = row_modules(r);
    const auto vals = row_values(r);
    for (std::size_t j = 0; j < mods.size(); ++j) dense(e, mods[j]) = vals[j];
  }
  return dense;
}

ModuleIncidence fold_modules(const Dataset& dataset) {
  std::vector<std::vector<std::pair<Index, double>>> events(dataset.n_events());
  for (std::size_t e = 0; e < dataset.n_events(); ++e) {
    // Lines are sorted but modules interleave, so gather keep-probabilities
    // per module first.
    std::vector<std::pair<Index, double>> keep;
    for (Index l : dataset.event_lines(static_cast<Index>(e))) {
      const Index m = dataset.module_of_line(l);
      const double miss = 1.0 - dataset.line(l).prescale;
      auto it = std::find_if(keep.begin(), keep.end(),
                             [m](const auto& p) { return p.first == m; });
      if (it == keep.end())
        keep.emplace_back(m, miss);
      else
        it->second *= miss;
    }
    auto& row = events[e];
    row.reserve(keep.size());
    for (const auto& [m, miss] : keep) row.emplace_back(m, 1.0 - miss);
  }
  return ModuleIncidence::from_rows(dataset.n_modules(), events);
}

}  // namespace streamopt
