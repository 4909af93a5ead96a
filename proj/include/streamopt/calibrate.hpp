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

#ifndef STREAMOPT_CALIBRATE_HPP
#define STREAMOPT_CALIBRATE_HPP

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "streamopt/cost.hpp"
#include "streamopt/model.hpp"

namespace streamopt {

/// Relative run-to-run fluctuation of measured job times, attached to
/// reports as an annotation.
inline constexpr double kDefaultTimeUncertainty = 0.02;

struct MeasurementRecord {
  std::string scheme_id;
  std::string stream_id;
  std::size_t n_lines = 0;
  double measured_time = 0.0;  // s
  double measured_size = 0.0;  // kB
  double model_T_term = std::numeric_limits<double>::quiet_NaN();
  double model_S_term = std::numeric_limits<double>::quiet_NaN();
};

struct CalibrationReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  double time_uncertainty = kDefaultTimeUncertainty;
};

/// Ordinary least squares y = slope * x + intercept. R^2 is 0 when y is
/// constant. Throws Error(data) on length mismatch, fewer than 2 points or
/// constant x.
CalibrationReport fit_linear(std::span<const double> x, std::span<const double> y);

/// Sum over records of n_lines * (measured_time - t_initial). Throws
/// Error(data) naming the first record measured faster than t_initial.
double t_real(std::span<const MeasurementRecord> records, double t_initial);

/// Fills model_T_term and model_S_term from the scheme named by each
/// record's scheme_id; stream_id must be a stream index of that scheme.
void attach_model_terms(const Dataset& dataset,
                        const std::map<std::string, Scheme>& schemes,
                        std::span<MeasurementRecord> records,
                        const SizeModel& sizes = {});

struct CalibrationGroup {
  std::string label;  // scheme id, or "*" when pooled
  std::size_t n_records = 0;
  CalibrationReport time_fit;  // n_lines * (time - t_initial) vs model T term
  CalibrationReport size_fit;  // measured size vs model S term
  double t_real = 0.0;
};

/// One group over all records when pooled, else one per scheme id in order
/// of first appearance. Records must carry model terms.
std::vector<CalibrationGroup> calibrate(std::span<const MeasurementRecord> records,
                                        bool pool_schemes, double t_initial);

}  // namespace streamopt

#endif  // STREAMOPT_CALIBRATE_HPP
