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

#include "streamopt/calibrate.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "streamopt/error.hpp"
#include "streamopt/matrix.hpp"

namespace streamopt {

CalibrationReport fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    std::ostringstream msg;
    msg << "fit_linear: x has " << x.size() << " points, y has " << y.size();
    throw Error(ErrorKind::data, msg.str());
  }
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::data, "fit_linear needs at least 2 points");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw Error(ErrorKind::data, "fit_linear: non-finite input");

  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);

  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (sxx.value() == 0.0)
    throw Error(ErrorKind::data, "fit_linear: x is constant");

  CalibrationReport report;
  report.n_points = n;
  report.slope = sxy.value() / sxx.value();
  report.intercept = my - report.slope * mx;

  CompensatedSum ss_res;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (report.slope * x[i] + report.intercept);
    ss_res.add(r * r);
  }
  const double ss_tot = syy.value();
  report.r_squared = ss_tot > 0.0 ? 1.0 - ss_res.value() / ss_tot : 0.0;
  return report;
}

namespace {

double corrected_term(const MeasurementRecord& rec, double t_initial) {
  if (!(rec.measured_time >= t_initial)) {
    std::ostringstream msg;
    msg << "record (scheme '" << rec.scheme_id << "', stream '" << rec.stream_id
        << "') measured " << rec.measured_time << " s, below t_initial = " << t_initial
        << " s";
    throw Error(ErrorKind::data, msg.str());
  }
  return static_cast<double>(rec.n_lines) * (rec.measured_time - t_initial);
}

}  // namespace

double t_real(std::span<const MeasurementRecord> records, double t_initial) {
  CompensatedSum total;
  for (const auto& rec : records) total.add(corrected_term(rec, t_initial));
  return total.value();
}

void attach_model_terms(const Dataset& dataset,
                        const std::map<std::string, Scheme>& schemes,
                        std::span<MeasurementRecord> records, const SizeModel& sizes) {
  std::map<std::string, std::pair<CostBreakdown, StorageBreakdown>> evaluated;
  for (auto& rec : records) {
    auto scheme = schemes.find(rec.scheme_id);
    if (scheme == schemes.end())
      throw Error(ErrorKind::data, "no scheme given for scheme id '" + rec.scheme_id + "'");
    auto it = evaluated.find(rec.scheme_id);
    if (it == evaluated.end())
      it = evaluated
               .emplace(rec.scheme_id,
                        std::pair{cost_T(dataset, scheme->second),
                                  cost_S(dataset, scheme->second, sizes)})
               .first;
    const auto& [cost, storage] = it->second;

    std::size_t stream = 0;
    const auto& id = rec.stream_id;
    auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), stream);
    if (ec != std::errc{} || ptr != id.data() + id.size() ||
        stream >= cost.per_stream.size())
      throw Error(ErrorKind::data, "stream id '" + id + "' is not a stream index of scheme '" +
                                       rec.scheme_id + "'");
    const auto& sc = cost.per_stream[stream];
    if (sc.n_lines != rec.n_lines) {
      std::ostringstream msg;
      msg << "record (scheme '" << rec.scheme_id << "', stream '" << id << "') lists "
          << rec.n_lines << " lines but the scheme puts " << sc.n_lines
          << " lines in that stream";
      throw Error(ErrorKind::data, msg.str());
    }
    rec.model_T_term = sc.contribution;
    rec.model_S_term = storage.per_stream[stream];
  }
}

namespace {

CalibrationGroup fit_group(std::string label, std::span<const MeasurementRecord* const> recs,
                           double t_initial) {
  std::vector<double> model_t, real_t, model_s, real_s;
  for (const auto* rec : recs) {
    if (std::isnan(rec->model_T_term) || std::isnan(rec->model_S_term))
      throw Error(ErrorKind::data, "record (scheme '" + rec->scheme_id + "', stream '" +
                                       rec->stream_id + "') has no model terms");
    model_t.push_back(rec->model_T_term);
    real_t.push_back(corrected_term(*rec, t_initial));
    model_s.push_back(rec->model_S_term);
    real_s.push_back(rec->measured_size);
  }
  CalibrationGroup group;
  group.label = std::move(label);
  group.n_records = recs.size();
  group.time_fit = fit_linear(model_t, real_t);
  group.size_fit = fit_linear(model_s, real_s);
  CompensatedSum total;
  for (double v : real_t) total.add(v);
  group.t_real = total.value();
  return group;
}

}  // namespace

std::vector<CalibrationGroup> calibrate(std::span<const MeasurementRecord> records,
                                        bool pool_schemes, double t_initial) {
  std::vector<CalibrationGroup> groups;
  if (pool_schemes) {
    std::vector<const MeasurementRecord*> all;
    for (const auto& rec : records) all.push_back(&rec);
    groups.push_back(fit_group("*", all, t_initial));
    return groups;
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<const MeasurementRecord*>> by_scheme;
  for (const auto& rec : records) {
    auto [it, inserted] = by_scheme.try_emplace(rec.scheme_id);
    if (inserted) order.push_back(rec.scheme_id);
    it->second.push_back(&rec);
  }
  for (const auto& id : order) groups.push_back(fit_group(id, by_scheme[id], t_initial));
  return groups;
}

}  // namespace streamopt
