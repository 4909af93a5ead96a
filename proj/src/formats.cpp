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

#include "streamopt/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>
#include <unordered_map>

#include "streamopt/error.hpp"

namespace streamopt {

namespace {

constexpr std::string_view kCatalogHeader = "line,prescale,turbo,persistreco,module";
constexpr std::string_view kIncidenceHeader = "event,line";
constexpr std::string_view kSchemeHeader = "module,stream";
constexpr std::string_view kMeasurementHeader =
    "scheme_id,stream_id,n_lines,measured_time_s,measured_size_kb";

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<Field> split(std::string_view line) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const auto raw = line.substr(start, comma == std::string_view::npos
                                            ? std::string_view::npos
                                            : comma - start);
    std::size_t lead = 0;
    while (lead < raw.size() && (raw[lead] == ' ' || raw[lead] == '\t')) ++lead;
    fields.push_back({trim(raw), start + lead + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

/// Reads lines, skipping blanks and '#' comments, and formats locations.
class LineReader {
 public:
  LineReader(std::istream& in, std::string_view source) : in_(in), source_(source) {}

  /// Next meaningful line; comments are reported through `comment` if given.
  bool next(std::string_view& out, std::string* comment = nullptr) {
    while (std::getline(in_, buffer_)) {
      ++line_no_;
      const auto t = trim(buffer_);
      if (t.empty()) continue;
      if (t.front() == '#') {
        if (comment) *comment = std::string(trim(t.substr(1)));
        continue;
      }
      out = t;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::size_t column, const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ':' << line_no_ << ':' << column << ": " << what;
    throw Error(ErrorKind::data, msg.str());
  }

  std::vector<Field> fields(std::string_view line, std::size_t expected) const {
    auto f = split(line);
    if (f.size() != expected) {
      std::ostringstream msg;
      msg << "expected " << expected << " comma-separated fields, found " << f.size();
      fail(1, msg.str());
    }
    for (const auto& field : f)
      if (field.text.empty()) fail(field.column, "empty field");
    return f;
  }

  double real(const Field& f) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
    if (ec != std::errc{} || ptr != f.text.data() + f.text.size() || !std::isfinite(v))
      fail(f.column, "expected a number, found '" + std::string(f.text) + "'");
    return v;
  }

  std::size_t count(const Field& f) const {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
    if (ec != std::errc{} || ptr != f.text.data() + f.text.size())
      fail(f.column, "expected a non-negative integer, found '" + std::string(f.text) + "'");
    return v;
  }

  bool flag(const Field& f) const {
    if (f.text == "1" || f.text == "true") return true;
    if (f.text == "0" || f.text == "false") return false;
    fail(f.column, "expected a 0/1 flag, found '" + std::string(f.text) + "'");
  }

 private:
  std::istream& in_;
  std::string source_;
  std::string buffer_;
  std::size_t line_no_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  return in;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void check_name(const std::string& name) {
  if (name.empty() || name.find_first_of(",\n\r#") != std::string::npos ||
      trim(name) != name)
    throw Error(ErrorKind::usage, "name '" + name + "' cannot be written as a CSV field");
}

}  // namespace

RawInstance parse_instance(std::istream& in, std::string_view source) {
  LineReader reader(in, source);
  std::string_view line;
  if (!reader.next(line)) reader.fail(1, "empty instance file");
  if (line != kCatalogHeader)
    reader.fail(1, "expected catalog header '" + std::string(kCatalogHeader) + "'");

  RawInstance raw;
  std::vector<LineRecord> lines;
  std::unordered_map<std::string, Index> line_index;
  bool saw_incidence = false;
  while (reader.next(line)) {
    if (line == kIncidenceHeader) {
      saw_incidence = true;
      break;
    }
    const auto f = reader.fields(line, 5);
    LineRecord rec;
    rec.name = std::string(f[0].text);
    rec.prescale = reader.real(f[1]);
    rec.is_turbo = reader.flag(f[2]);
    rec.is_persist_reco = reader.flag(f[3]);
    rec.module = std::string(f[4].text);
    if (!line_index.emplace(rec.name, static_cast<Index>(lines.size())).second)
      reader.fail(f[0].column, "duplicate line name '" + rec.name + "'");
    lines.push_back(std::move(rec));
  }
  if (!saw_incidence)
    reader.fail(1, "missing incidence header '" + std::string(kIncidenceHeader) + "'");
  if (lines.empty()) reader.fail(1, "catalog section lists no lines");

  std::unordered_map<std::string, Index> event_index;
  while (reader.next(line)) {
    const auto f = reader.fields(line, 2);
    auto [ev, inserted] =
        event_index.try_emplace(std::string(f[0].text), static_cast<Index>(raw.event_ids.size()));
    if (inserted) raw.event_ids.emplace_back(f[0].text);
    const auto li = line_index.find(std::string(f[1].text));
    if (li == line_index.end())
      reader.fail(f[1].column, "unknown line '" + std::string(f[1].text) + "'");
    raw.incidence.entries.emplace_back(ev->second, li->second);
  }
  if (raw.incidence.entries.empty()) reader.fail(1, "no events");

  raw.incidence.n_events = raw.event_ids.size();
  raw.incidence.n_lines = lines.size();
  raw.catalog = LineCatalog::from_lines(std::move(lines));
  return raw;
}

Dataset load_instance(const std::filesystem::path& path) {
  auto in = open_input(path);
  const auto raw = parse_instance(in, path.string());
  return Dataset::build(raw.incidence, raw.catalog);
}

void write_instance(std::ostream& out, const EventLineIncidence& incidence,
                    const LineCatalog& catalog) {
  out << kCatalogHeader << '\n';
  for (const auto& line : catalog.lines) {
    check_name(line.name);
    check_name(line.module);
    out << line.name << ',' << format_real(line.prescale) << ',' << (line.is_turbo ? 1 : 0)
        << ',' << (line.is_persist_reco ? 1 : 0) << ',' << line.module << '\n';
  }
  out << kIncidenceHeader << '\n';
  auto entries = incidence.entries;
  std::sort(entries.begin(), entries.end());
  for (const auto& [event, l] : entries) {
    if (l >= catalog.lines.size())
      throw Error(ErrorKind::data, "incidence references a line outside the catalog");
    out << event << ',' << catalog.lines[l].name << '\n';
  }
}

void write_scheme(std::ostream& out, const Dataset& dataset, const Scheme& scheme) {
  check_scheme(dataset, scheme);
  out << "# n_streams=" << scheme.n_streams << '\n' << kSchemeHeader << '\n';
  for (std::size_t m = 0; m < dataset.n_modules(); ++m) {
    const auto& name = dataset.module_name(static_cast<Index>(m));
    check_name(name);
    out << name << ',' << scheme.stream_of_unit[m] << '\n';
  }
}

Scheme parse_scheme(std::istream& in, const Dataset& dataset, std::string_view source) {
  LineReader reader(in, source);
  std::string comment;
  std::string_view line;
  std::optional<std::size_t> declared;
  auto read_declared = [&] {
    constexpr std::string_view key = "n_streams=";
    if (!comment.starts_with(key)) return;
    const std::string_view v = std::string_view(comment).substr(key.size());
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
    if (ec != std::errc{} || ptr != v.data() + v.size() || k == 0)
      reader.fail(1, "malformed n_streams comment");
    declared = k;
    comment.clear();
  };

  if (!reader.next(line, &comment)) reader.fail(1, "empty scheme file");
  read_declared();
  if (line != kSchemeHeader)
    reader.fail(1, "expected scheme header '" + std::string(kSchemeHeader) + "'");

  std::unordered_map<std::string, Index> module_index;
  for (std::size_t m = 0; m < dataset.n_modules(); ++m)
    module_index.emplace(dataset.module_name(static_cast<Index>(m)), static_cast<Index>(m));

  Scheme scheme;
  scheme.stream_of_unit.assign(dataset.n_modules(), Scheme::unassigned);
  std::size_t top = 0;
  while (reader.next(line, &comment)) {
    read_declared();
    const auto f = reader.fields(line, 2);
    const auto it = module_index.find(std::string(f[0].text));
    if (it == module_index.end())
      reader.fail(f[0].column, "unknown module '" + std::string(f[0].text) + "'");
    if (scheme.stream_of_unit[it->second] != Scheme::unassigned)
      reader.fail(f[0].column, "module '" + std::string(f[0].text) + "' assigned twice");
    const std::size_t s = reader.count(f[1]);
    if (s >= Scheme::unassigned) reader.fail(f[1].column, "stream index too large");
    if (declared && s >= *declared)
      reader.fail(f[1].column, "stream index exceeds declared n_streams");
    scheme.stream_of_unit[it->second] = static_cast<Index>(s);
    top = std::max(top, s + 1);
  }
  for (std::size_t m = 0; m < dataset.n_modules(); ++m)
    if (scheme.stream_of_unit[m] == Scheme::unassigned)
      throw Error(ErrorKind::data, std::string(source) + ": module '" +
                                       dataset.module_name(static_cast<Index>(m)) +
                                       "' is unassigned");
  scheme.n_streams = declared.value_or(top);
  return scheme;
}

Scheme load_scheme(const std::filesystem::path& path, const Dataset& dataset) {
  auto in = open_input(path);
  return parse_scheme(in, dataset, path.string());
}

std::vector<MeasurementRecord> parse_measurements(std::istream& in,
                                                  std::string_view source) {
  LineReader reader(in, source);
  std::string_view line;
  if (!reader.next(line)) reader.fail(1, "empty measurement file");
  if (line != kMeasurementHeader)
    reader.fail(1, "expected measurement header '" + std::string(kMeasurementHeader) + "'");
  std::vector<MeasurementRecord> records;
  while (reader.next(line)) {
    const auto f = reader.fields(line, 5);
    MeasurementRecord rec;
    rec.scheme_id = std::string(f[0].text);
    rec.stream_id = std::string(f[1].text);
    rec.n_lines = reader.count(f[2]);
    rec.measured_time = reader.real(f[3]);
    rec.measured_size = reader.real(f[4]);
    if (rec.measured_time < 0.0) reader.fail(f[3].column, "negative measured time");
    if (rec.measured_size < 0.0) reader.fail(f[4].column, "negative measured size");
    records.push_back(std::move(rec));
  }
  if (records.empty()) reader.fail(1, "no measurements");
  return records;
}

std::vector<MeasurementRecord> load_measurements(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_measurements(in, path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorKind::io, "failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot replace '" + path.string() + "'");
  }
}

}  // namespace streamopt
