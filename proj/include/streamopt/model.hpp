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

#ifndef STREAMOPT_MODEL_HPP
#define STREAMOPT_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace streamopt {

using Index = std::uint32_t;

/// Which events pass which lines, as a list of (event, line) pairs.
struct EventLineIncidence {
  std::size_t n_events = 0;
  std::size_t n_lines = 0;
  std::vector<std::pair<Index, Index>> entries;
};

struct LineRecord {
  std::string name;
  double prescale = 1.0;
  bool is_turbo = true;
  bool is_persist_reco = false;
  std::string module;
};

struct LineCatalog {
  std::vector<LineRecord> lines;
  std::vector<std::string> modules;

  /// Builds a catalog whose module list is the order of first appearance.
  static LineCatalog from_lines(std::vector<LineRecord> lines);
};

/// Returns one message per problem found; empty means the dataset is usable.
std::vector<std::string> validate_dataset(const EventLineIncidence& incidence,
                                          const LineCatalog& catalog);

/// A validated, immutable dataset. Events that pass no line are dropped at
/// construction and counted in n_dropped_events().
class Dataset {
 public:
  /// Throws Error(ErrorKind::data) listing every violation.
  static Dataset build(const EventLineIncidence& incidence,
                       const LineCatalog& catalog);

  std::size_t n_events() const noexcept { return row_start_.size() - 1; }
  std::size_t n_lines() const noexcept { return catalog_.lines.size(); }
  std::size_t n_modules() const noexcept { return catalog_.modules.size(); }
  std::size_t n_dropped_events() const noexcept { return n_dropped_; }

  const LineCatalog& catalog() const noexcept { return catalog_; }
  const LineRecord& line(Index l) const { return catalog_.lines[l]; }
  const std::string& module_name(Index m) const { return catalog_.modules[m]; }

  Index module_of_line(Index l) const { return module_of_line_[l]; }
  std::span<const Index> lines_of_module(Index m) const {
    return {module_lines_.data() + module_start_[m],
            module_start_[m + 1] - module_start_[m]};
  }

  /// Sorted lines passed by kept event e.
  std::span<const Index> event_lines(Index e) const {
    return {event_lines_.data() + row_start_[e],
            row_start_[e + 1] - row_start_[e]};
  }
  /// Index of kept event e in the incidence the dataset was built from.
  Index source_event(Index e) const { return source_event_[e]; }

  std::size_t n_entries() const noexcept { return event_lines_.size(); }

 private:
  Dataset() = default;

  LineCatalog catalog_;
  std::vector<Index> module_of_line_;
  std::vector<std::size_t> module_start_;
  std::vector<Index> module_lines_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Index> event_lines_;
  std::vector<Index> source_event_;
  std::size_t n_dropped_ = 0;
};

/// Hard assignment of units (modules) to streams.
struct Scheme {
  static constexpr Index unassigned = std::numeric_limits<Index>::max();

  std::size_t n_streams = 0;
  std::vector<Index> stream_of_unit;

  std::size_t n_units() const noexcept { return stream_of_unit.size(); }
  std::vector<std::size_t> units_per_stream() const;
  std::size_t n_empty_streams() const;

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

/// Throws Error(ErrorKind::data) naming the first module that is unassigned
/// or out of range.
void check_scheme(const Dataset& dataset, const Scheme& scheme);

/// Modules dealt round-robin over n_streams after a seeded shuffle.
Scheme random_balanced_scheme(std::size_t n_units, std::size_t n_streams,
                              std::uint64_t seed);

}  // namespace streamopt

#endif  // STREAMOPT_MODEL_HPP
