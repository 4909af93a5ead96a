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

#ifndef STREAMOPT_COST_HPP
#define STREAMOPT_COST_HPP

#include <cstddef>
#include <vector>

#include "streamopt/model.hpp"

namespace streamopt {

/// Per-event storage constants in kB.
struct SizeModel {
  double base_kb = 10.0;    // per passing Turbo line
  double shared_kb = 50.0;  // once per event if any PersistReco line passes
};

struct StreamCost {
  std::size_t n_units = 0;
  std::size_t n_lines = 0;
  double expected_events = 0.0;
  double contribution = 0.0;
};

struct CostBreakdown {
  std::vector<StreamCost> per_stream;
  double total = 0.0;
};

struct StorageBreakdown {
  std::vector<double> per_stream;
  double total = 0.0;
};

/// Expected disk-access cost: for each stream, the number of lines in it
/// times the expected number of distinct events it holds once prescales are
/// applied. Exact event-reads when every prescale is 1.
CostBreakdown cost_T(const Dataset& dataset, const Scheme& scheme);

/// Expected storage size of every stream under the Turbo/PersistReco model.
StorageBreakdown cost_S(const Dataset& dataset, const Scheme& scheme,
                        const SizeModel& sizes = {});

struct ExtremeSchemes {
  Scheme single_stream;
  Scheme per_unit;
};

ExtremeSchemes extreme_schemes(const Dataset& dataset);

}  // namespace streamopt

#endif  // STREAMOPT_COST_HPP
