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

#ifndef STREAMOPT_FORMATS_HPP
#define STREAMOPT_FORMATS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "streamopt/calibrate.hpp"
#include "streamopt/model.hpp"

namespace streamopt {

// Instance files hold two comma-separated sections, each introduced by its
// header line:
//
//   line,prescale,turbo,persistreco,module
//   Hlt2CharmD0,1,1,0,Charm
//   ...
//   event,line
//   0,Hlt2CharmD0
//
// Blank lines and lines starting with '#' are ignored. Event ids are
// arbitrary tokens numbered in order of first appearance.

struct RawInstance {
  EventLineIncidence incidence;
  LineCatalog catalog;
  std::vector<std::string> event_ids;
};

/// Throws Error(data) with "<source>:<line>:<column>" on malformed input.
RawInstance parse_instance(std::istream& in, std::string_view source = "<input>");
Dataset load_instance(const std::filesystem::path& path);

void write_instance(std::ostream& out, const EventLineIncidence& incidence,
                    const LineCatalog& catalog);

// Scheme files: "# n_streams=<k>", the header "module,stream", then one
// "<module name>,<stream index>" row per module in catalog order.

void write_scheme(std::ostream& out, const Dataset& dataset, const Scheme& scheme);
Scheme parse_scheme(std::istream& in, const Dataset& dataset,
                    std::string_view source = "<input>");
Scheme load_scheme(const std::filesystem::path& path, const Dataset& dataset);

// Measurement files: header "scheme_id,stream_id,n_lines,measured_time_s,
// measured_size_kb" followed by one row per stream.

std::vector<MeasurementRecord> parse_measurements(std::istream& in,
                                                  std::string_view source = "<input>");
std::vector<MeasurementRecord> load_measurements(const std::filesystem::path& path);

/// Writes via a temporary sibling and renames, so the target is either the
/// old file or the complete new one.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace streamopt

#endif  // STREAMOPT_FORMATS_HPP
