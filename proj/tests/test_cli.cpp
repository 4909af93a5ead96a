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

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / "streamopt_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

Run run(const std::string& args) {
  const auto log = path("stdout.txt");
  const std::string cmd = std::string("\"") + STREAMOPT_CLI + "\" " + args + " > \"" + log +
                          "\" 2> \"" + path("stderr.txt") + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::string out((std::istreambuf_iterator<char>(in)), {});
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Value on the line "<key>,<value>".
double field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ",", 0) == 0) return std::stod(line.substr(key.size() + 1));
  FAIL("missing key " << key);
  return 0.0;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::string& instance() {
  static const std::string inst = [] {
    const auto p = path("inst.csv");
    const auto r = run("generate --events 1500 --modules 6 --clusters 3 --seed 5 --out " + p +
                       " --baseline-out " + path("base.csv"));
    REQUIRE(r.code == 0);
    return p;
  }();
  return inst;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("").code == 1);
  CHECK(run("evaluate").code == 1);
  CHECK(run("optimize --instance " + instance() + " --streams 0").code == 1);
  CHECK(run("evaluate --instance " + path("absent.csv")).code == 2);
  std::ofstream(path("broken.csv")) << "line,prescale,turbo,persistreco,module\nl,1,1,0,A\n";
  CHECK(run("evaluate --instance " + path("broken.csv")).code == 2);
  CHECK(run("optimize --instance " + instance() + " --streams 7").code == 3);
  CHECK(run("oracle --instance " + instance() + " --streams 2 --objective nonsense").code == 1);
}

TEST_CASE("generate is reproducible") {
  REQUIRE(run("generate --events 400 --modules 5 --seed 11 --out " + path("g1.csv")).code == 0);
  REQUIRE(run("generate --events 400 --modules 5 --seed 11 --out " + path("g2.csv")).code == 0);
  REQUIRE(run("generate --events 400 --modules 5 --seed 12 --out " + path("g3.csv")).code == 0);
  CHECK(slurp(path("g1.csv")) == slurp(path("g2.csv")));
  CHECK(slurp(path("g1.csv")) != slurp(path("g3.csv")));
}

TEST_CASE("evaluate prints both extremes and orders them") {
  const auto r = run("evaluate --instance " + instance());
  REQUIRE(r.code == 0);
  const auto single_at = r.out.find("# single stream");
  const auto per_unit_at = r.out.find("# one stream per module");
  REQUIRE(single_at != std::string::npos);
  REQUIRE(per_unit_at != std::string::npos);
  const double t_single = field(r.out.substr(single_at, per_unit_at - single_at), "T_total");
  const double s_single = field(r.out.substr(single_at, per_unit_at - single_at), "S_total_kb");
  const double t_unit = field(r.out.substr(per_unit_at), "T_total");
  const double s_unit = field(r.out.substr(per_unit_at), "S_total_kb");
  CHECK(t_unit <= t_single);
  CHECK(s_single <= s_unit);
  const auto single_only = run("evaluate --instance " + instance() + " --extreme single");
  CHECK(field(single_only.out, "T_total") == t_single);
}

TEST_CASE("compare of a scheme against itself is the identity") {
  const auto r = run("compare --instance " + instance() + " --baseline " + path("base.csv") +
                     " --scheme " + path("base.csv"));
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2][0] == "candidate");
  CHECK(rows[2][4] == "1");
  CHECK(rows[2][5] == "1");
}

TEST_CASE("optimize writes a scheme and diagnostics that evaluate consistently") {
  const auto out = path("opt.csv");
  const auto r = run("optimize --instance " + instance() + " --streams 3 --restarts 4 --seed 2 --out " + out);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out + ".diagnostics.json"));
  const auto ev = run("evaluate --instance " + instance() + " --scheme " + out);
  REQUIRE(ev.code == 0);
  const auto diag = slurp(out + ".diagnostics.json");
  CHECK(diag.find("\"best_cost_T\"") != std::string::npos);
  const auto again = path("opt2.csv");
  REQUIRE(run("optimize --instance " + instance() +
              " --streams 3 --restarts 4 --seed 2 --threads 1 --out " + again)
              .code == 0);
  CHECK(slurp(out) == slurp(again));
}

TEST_CASE("sweep endpoints agree with evaluate") {
  const auto out = path("sweep.csv");
  REQUIRE(run("sweep --instance " + instance() + " --streams 1,6 --restarts 4 --out " + out).code == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "n_streams");
  const auto single = run("evaluate --instance " + instance() + " --extreme single");
  const auto unit = run("evaluate --instance " + instance() + " --extreme per-unit");
  CHECK(std::stod(rows[1][2]) == field(single.out, "T_total"));
  CHECK(std::stod(rows[1][3]) == field(single.out, "S_total_kb"));
  CHECK(rows[1][5] == "1");
  // Per-unit is the T floor; the optimizer may stop above it.
  CHECK(std::stod(rows[2][2]) >= field(unit.out, "T_total"));
}

TEST_CASE("calibrate reproduces the worked t_real example") {
  std::ofstream(path("m.csv")) << "scheme_id,stream_id,n_lines,measured_time_s,measured_size_kb\n"
                                  "base,0,2,19,100\n"
                                  "base,1,1,14,50\n";
  const auto r = run("calibrate --measurements " + path("m.csv") + " --t-initial 9");
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "base") == 25.0);
}
