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

// Command-line front end. Links only the C interface.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamopt/streamopt.h"

namespace {

struct Failure {
  so_status status;
  std::string message;
};

void check(so_status status) {
  if (status != SO_OK) throw Failure{status, so_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Instance = std::unique_ptr<so_instance, Deleter<so_instance, so_instance_free>>;
using SchemePtr = std::unique_ptr<so_scheme, Deleter<so_scheme, so_scheme_free>>;
using Evaluation = std::unique_ptr<so_evaluation, Deleter<so_evaluation, so_evaluation_free>>;
using Result = std::unique_ptr<so_result, Deleter<so_result, so_result_free>>;
using Measurements =
    std::unique_ptr<so_measurements, Deleter<so_measurements, so_measurements_free>>;
using Calibration = std::unique_ptr<so_calibration, Deleter<so_calibration, so_calibration_free>>;

Instance load_instance(const std::string& path) {
  so_instance* raw = nullptr;
  check(so_instance_load(path.c_str(), &raw));
  Instance inst(raw);
  if (const auto dropped = so_instance_n_dropped_events(raw); dropped > 0)
    std::cerr << "note: dropped " << dropped << " events that pass no line\n";
  return inst;
}

SchemePtr load_scheme(const so_instance* inst, const std::string& path) {
  so_scheme* raw = nullptr;
  check(so_scheme_load(inst, path.c_str(), &raw));
  return SchemePtr(raw);
}

Evaluation evaluate(const so_instance* inst, const so_scheme* scheme,
                    const so_size_model& sizes) {
  so_evaluation* raw = nullptr;
  check(so_evaluate(inst, scheme, &sizes, &raw));
  return Evaluation(raw);
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Failure{SO_ERR_IO, "cannot write '" + path + "'"};
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Failure{SO_ERR_IO, "cannot replace '" + path + "'"};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_evaluation(const so_evaluation* ev, const std::string& title) {
  std::cout << "# " << title << '\n';
  std::cout << "stream,n_units,n_lines,expected_events,T_contribution,size_kb\n";
  for (size_t s = 0; s < so_evaluation_n_streams(ev); ++s) {
    so_stream_stats st{};
    check(so_evaluation_stream(ev, s, &st));
    std::cout << s << ',' << st.n_units << ',' << st.n_lines << ',' << fmt(st.expected_events)
              << ',' << fmt(st.cost_contribution) << ',' << fmt(st.size_kb) << '\n';
  }
  std::cout << "T_total," << fmt(so_evaluation_cost_total(ev)) << '\n';
  std::cout << "S_total_kb," << fmt(so_evaluation_size_total(ev)) << '\n';
}

// "3", "1,2,4" or "1-10".
std::vector<size_t> parse_counts(const std::string& text) {
  std::vector<size_t> counts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        counts.push_back(std::stoul(item));
      } else {
        const size_t lo = std::stoul(item.substr(0, dash));
        const size_t hi = std::stoul(item.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument(item);
        for (size_t k = lo; k <= hi; ++k) counts.push_back(k);
      }
    } catch (const std::logic_error&) {
      throw Failure{SO_ERR_USAGE, "bad stream count list '" + text + "'"};
    }
  }
  if (counts.empty()) throw Failure{SO_ERR_USAGE, "empty stream count list"};
  for (size_t k : counts)
    if (k < 1) throw Failure{SO_ERR_USAGE, "stream counts must be >= 1"};
  return counts;
}

struct Common {
  std::string instance;
  std::string out;
  uint64_t seed = 0;
  so_size_model sizes{};
};

struct OptimizeFlags {
  size_t streams = 0;
  so_optimizer_config config{};
};

void add_optimizer_flags(CLI::App* cmd, OptimizeFlags& f) {
  cmd->add_option("--restarts", f.config.n_restarts, "Independent random restarts")
      ->capture_default_str();
  cmd->add_option("--max-iters", f.config.max_iters, "Iteration cap per restart")
      ->capture_default_str();
  cmd->add_option("--step-size", f.config.step_size, "AdaMax step size")->capture_default_str();
  cmd->add_option("--init-scale", f.config.init_scale, "Std. dev. of initial logits")
      ->capture_default_str();
  cmd->add_option("--plateau-tol", f.config.plateau_tol,
                  "Stop when relative improvement over the window falls below this")
      ->capture_default_str();
  cmd->add_option("--plateau-window", f.config.plateau_window)->capture_default_str();
  cmd->add_option("--threads", f.config.n_threads, "Worker threads (0: all cores)")
      ->capture_default_str();
}

Result run_optimize(const so_instance* inst, OptimizeFlags f, size_t streams, uint64_t seed) {
  f.config.n_streams = streams;
  f.config.seed = seed;
  so_result* raw = nullptr;
  check(so_optimize(inst, &f.config, &raw));
  return Result(raw);
}

SchemePtr best_scheme(const so_result* r) {
  so_scheme* raw = nullptr;
  check(so_result_scheme(r, &raw));
  return SchemePtr(raw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assigns selection-line modules to output streams to minimise analysis read cost"};
  app.require_subcommand(1);
  app.set_version_flag("--version", so_version());

  Common common;
  so_size_model_default(&common.sizes);
  auto add_sizes = [&](CLI::App* cmd) {
    cmd->add_option("--base-kb", common.sizes.base_kb, "kB per passing Turbo line")
        ->capture_default_str();
    cmd->add_option("--shared-kb", common.sizes.shared_kb,
                    "kB shared by passing PersistReco lines")
        ->capture_default_str();
  };
  auto add_instance = [&](CLI::App* cmd) {
    cmd->add_option("--instance", common.instance, "Instance file")->required();
  };

  // generate
  so_synthetic_params synth{};
  so_synthetic_params_default(&synth);
  std::string planted_out;
  auto* gen = app.add_subcommand("generate", "Write a planted-cluster synthetic instance");
  gen->add_option("--events", synth.n_events)->capture_default_str();
  gen->add_option("--modules", synth.n_modules)->capture_default_str();
  gen->add_option("--lines-min", synth.lines_per_module_min)->capture_default_str();
  gen->add_option("--lines-max", synth.lines_per_module_max)->capture_default_str();
  gen->add_option("--clusters", synth.n_clusters)->capture_default_str();
  gen->add_option("--intra", synth.intra_cluster_pass_rate, "Pass rate on own cluster")
      ->capture_default_str();
  gen->add_option("--cross", synth.cross_cluster_pass_rate, "Pass rate on other clusters")
      ->capture_default_str();
  gen->add_option("--prescaled-fraction", synth.prescaled_fraction)->capture_default_str();
  gen->add_option("--prescale-min", synth.prescale_min)->capture_default_str();
  gen->add_option("--turbo-fraction", synth.turbo_fraction)->capture_default_str();
  gen->add_option("--persistreco-fraction", synth.persist_reco_fraction)
      ->capture_default_str();
  gen->add_option("--seed", synth.seed)->capture_default_str();
  gen->add_option("--out", common.out, "Instance file to write")->required();
  gen->add_option("--baseline-out", planted_out, "Write the planted grouping as a scheme");

  // evaluate
  std::string scheme_path, extreme;
  auto* eval = app.add_subcommand("evaluate", "Print T and S of a scheme");
  add_instance(eval);
  add_sizes(eval);
  auto* scheme_opt = eval->add_option("--scheme", scheme_path, "Scheme file");
  eval->add_option("--extreme", extreme, "single or per-unit")
      ->check(CLI::IsMember({"single", "per-unit"}))
      ->excludes(scheme_opt);

  // optimize
  OptimizeFlags opt;
  so_optimizer_config_default(&opt.config);
  auto* optc = app.add_subcommand("optimize", "Optimise a scheme for a given stream count");
  add_instance(optc);
  optc->add_option("--streams", opt.streams, "Number of streams")->required();
  optc->add_option("--seed", common.seed)->capture_default_str();
  optc->add_option("--out", common.out, "Scheme file; diagnostics go to <out>.diagnostics.json");
  add_optimizer_flags(optc, opt);

  // compare
  std::string baseline_path;
  size_t compare_streams = 0;
  auto* cmp = app.add_subcommand(
      "compare", "Normalise a candidate (given or freshly optimised) to a baseline scheme");
  add_instance(cmp);
  add_sizes(cmp);
  cmp->add_option("--baseline", baseline_path, "Baseline scheme file")->required();
  cmp->add_option("--scheme", scheme_path, "Candidate scheme; optimised when omitted");
  cmp->add_option("--streams", compare_streams,
                  "Stream count when optimising (default: baseline's)");
  cmp->add_option("--seed", common.seed)->capture_default_str();
  cmp->add_option("--out", common.out, "Write the candidate scheme here");
  add_optimizer_flags(cmp, opt);

  // sweep
  std::string counts_text;
  auto* sweep = app.add_subcommand("sweep", "Optimise over a range of stream counts");
  add_instance(sweep);
  add_sizes(sweep);
  sweep->add_option("--streams", counts_text, "Counts: '1-10' or '1,2,4'")->required();
  sweep->add_option("--baseline", baseline_path, "Normalise T and S to this scheme");
  sweep->add_option("--seed", common.seed)->capture_default_str();
  sweep->add_option("--out", common.out, "Table file (CSV); stdout when omitted");
  add_optimizer_flags(sweep, opt);

  // random-scheme
  size_t random_streams = 0;
  auto* rnd = app.add_subcommand("random-scheme", "Write a random balanced grouping");
  add_instance(rnd);
  rnd->add_option("--streams", random_streams)->required();
  rnd->add_option("--seed", common.seed)->capture_default_str();
  rnd->add_option("--out", common.out)->required();

  // oracle
  std::string objective_text = "T";
  size_t oracle_streams = 0;
  auto* orc = app.add_subcommand("oracle", "Exhaustive optimum on small instances");
  add_instance(orc);
  add_sizes(orc);
  orc->add_option("--streams", oracle_streams)->required();
  orc->add_option("--objective", objective_text, "T, S or weighted:<w> (T + w*S)")
      ->capture_default_str();
  orc->add_option("--out", common.out, "Scheme file");

  // calibrate
  std::string measurements_path;
  std::vector<std::string> scheme_specs;
  bool pool_schemes = true;
  double t_initial = 9.0;
  auto* cal = app.add_subcommand("calibrate", "Fit model T and S against measurements");
  cal->add_option("--measurements", measurements_path, "Measurement file")->required();
  cal->add_option("--instance", common.instance, "Instance the schemes refer to");
  cal->add_option("--scheme", scheme_specs, "<scheme_id>=<scheme file>, repeatable");
  cal->add_option("--pool-schemes", pool_schemes, "One regression over all schemes")
      ->capture_default_str();
  cal->add_option("--t-initial", t_initial, "Per-job initialisation time (s)")
      ->capture_default_str();
  add_sizes(cal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : SO_ERR_USAGE;
  }

  try {
    if (*gen) {
      so_instance* raw = nullptr;
      so_scheme* planted = nullptr;
      check(so_instance_generate(&synth, &raw, planted_out.empty() ? nullptr : &planted));
      Instance inst(raw);
      SchemePtr planted_scheme(planted);
      check(so_instance_write(raw, common.out.c_str()));
      if (planted) check(so_scheme_write(raw, planted, planted_out.c_str()));
      std::cout << "wrote " << common.out << ": " << so_instance_n_events(raw) << " events, "
                << so_instance_n_lines(raw) << " lines, " << so_instance_n_modules(raw)
                << " modules\n";
    } else if (*eval) {
      auto inst = load_instance(common.instance);
      if (!scheme_path.empty()) {
        auto scheme = load_scheme(inst.get(), scheme_path);
        print_evaluation(evaluate(inst.get(), scheme.get(), common.sizes).get(), scheme_path);
      } else {
        // Both extremes when none is chosen.
        if (extreme.empty() || extreme == "single") {
          so_scheme* raw = nullptr;
          check(so_scheme_single_stream(inst.get(), &raw));
          SchemePtr s(raw);
          print_evaluation(evaluate(inst.get(), raw, common.sizes).get(), "single stream");
        }
        if (extreme.empty() || extreme == "per-unit") {
          so_scheme* raw = nullptr;
          check(so_scheme_per_unit(inst.get(), &raw));
          SchemePtr s(raw);
          print_evaluation(evaluate(inst.get(), raw, common.sizes).get(), "one stream per module");
        }
      }
    } else if (*optc) {
      auto inst = load_instance(common.instance);
      auto result = run_optimize(inst.get(), opt, opt.streams, common.seed);
      auto scheme = best_scheme(result.get());
      if (!common.out.empty()) {
        check(so_result_write_diagnostics(inst.get(), result.get(),
                                          (common.out + ".diagnostics.json").c_str()));
        check(so_scheme_write(inst.get(), scheme.get(), common.out.c_str()));
      }
      std::cout << "streams," << so_scheme_n_streams(scheme.get()) << '\n'
                << "empty_streams," << so_scheme_n_empty_streams(scheme.get()) << '\n'
                << "best_restart," << so_result_best_restart(result.get()) << '\n'
                << "relaxed_loss," << fmt(so_result_relaxed_loss(result.get())) << '\n'
                << "T_total," << fmt(so_result_cost_total(result.get())) << '\n';
      if (so_scheme_n_empty_streams(scheme.get()) > 0)
        std::cerr << "note: " << so_scheme_n_empty_streams(scheme.get())
                  << " stream(s) left empty after rounding\n";
      if (common.out.empty())
        for (size_t m = 0; m < so_scheme_n_units(scheme.get()); ++m) {
          size_t s = 0;
          check(so_scheme_stream_of(scheme.get(), m, &s));
          std::cout << so_instance_module_name(inst.get(), m) << ',' << s << '\n';
        }
    } else if (*cmp) {
      auto inst = load_instance(common.instance);
      auto baseline = load_scheme(inst.get(), baseline_path);
      SchemePtr candidate;
      if (!scheme_path.empty()) {
        candidate = load_scheme(inst.get(), scheme_path);
      } else {
        const size_t k = compare_streams ? compare_streams : so_scheme_n_streams(baseline.get());
        candidate = best_scheme(run_optimize(inst.get(), opt, k, common.seed).get());
      }
      if (!common.out.empty())
        check(so_scheme_write(inst.get(), candidate.get(), common.out.c_str()));
      auto base_ev = evaluate(inst.get(), baseline.get(), common.sizes);
      auto cand_ev = evaluate(inst.get(), candidate.get(), common.sizes);
      const double bt = so_evaluation_cost_total(base_ev.get());
      const double bs = so_evaluation_size_total(base_ev.get());
      const double ct = so_evaluation_cost_total(cand_ev.get());
      const double cs = so_evaluation_size_total(cand_ev.get());
      std::cout << "scheme,streams,T,S_kb,T_norm,S_norm\n"
                << "baseline," << so_scheme_n_streams(baseline.get()) << ',' << fmt(bt) << ','
                << fmt(bs) << ",1,1\n"
                << "candidate," << so_scheme_n_streams(candidate.get()) << ',' << fmt(ct) << ','
                << fmt(cs) << ',' << fmt(ct / bt) << ',' << fmt(cs / bs) << '\n';
    } else if (*sweep) {
      auto inst = load_instance(common.instance);
      const auto counts = parse_counts(counts_text);
      SchemePtr reference;
      std::string reference_name;
      if (!baseline_path.empty()) {
        reference = load_scheme(inst.get(), baseline_path);
        reference_name = "baseline";
      } else {
        so_scheme* raw = nullptr;
        check(so_scheme_single_stream(inst.get(), &raw));
        reference.reset(raw);
        reference_name = "single stream";
      }
      auto ref_ev = evaluate(inst.get(), reference.get(), common.sizes);
      const double rt = so_evaluation_cost_total(ref_ev.get());
      const double rs = so_evaluation_size_total(ref_ev.get());

      std::ostringstream table;
      table << "# normalised to " << reference_name << '\n'
            << "n_streams,non_empty_streams,T,S_kb,relaxed_loss,T_norm,S_norm\n";
      for (size_t k : counts) {
        auto result = run_optimize(inst.get(), opt, k, common.seed);
        auto scheme = best_scheme(result.get());
        auto ev = evaluate(inst.get(), scheme.get(), common.sizes);
        const double t = so_evaluation_cost_total(ev.get());
        const double s = so_evaluation_size_total(ev.get());
        table << k << ',' << k - so_scheme_n_empty_streams(scheme.get()) << ',' << fmt(t) << ','
              << fmt(s) << ',' << fmt(so_result_relaxed_loss(result.get())) << ','
              << fmt(t / rt) << ',' << fmt(s / rs) << '\n';
      }
      if (common.out.empty())
        std::cout << table.str();
      else
        write_text_atomic(common.out, table.str());
    } else if (*rnd) {
      auto inst = load_instance(common.instance);
      so_scheme* raw = nullptr;
      check(so_scheme_random_balanced(inst.get(), random_streams, common.seed, &raw));
      SchemePtr s(raw);
      check(so_scheme_write(inst.get(), raw, common.out.c_str()));
    } else if (*orc) {
      auto inst = load_instance(common.instance);
      so_objective objective{};
      check(so_objective_parse(objective_text.c_str(), &objective));
      so_scheme* raw = nullptr;
      double best = 0.0;
      uint64_t evaluated = 0;
      check(so_oracle(inst.get(), oracle_streams, &objective, &common.sizes, &raw, &best,
                      &evaluated));
      SchemePtr s(raw);
      if (!common.out.empty()) check(so_scheme_write(inst.get(), raw, common.out.c_str()));
      std::cout << "objective," << objective_text << '\n'
                << "best_cost," << fmt(best) << '\n'
                << "schemes_evaluated," << evaluated << '\n';
    } else if (*cal) {
      so_measurements* raw = nullptr;
      check(so_measurements_load(measurements_path.c_str(), &raw));
      Measurements ms(raw);

      std::vector<std::string> ids;
      for (size_t i = 0; i < so_measurements_count(raw); ++i) {
        so_measurement m{};
        check(so_measurements_get(raw, i, &m));
        if (std::find(ids.begin(), ids.end(), m.scheme_id) == ids.end())
          ids.emplace_back(m.scheme_id);
      }
      std::cout << "# t_initial = " << fmt(t_initial) << " s\nscheme_id,T_real\n";
      for (const auto& id : ids) {
        double tr = 0.0;
        check(so_t_real(raw, id.c_str(), t_initial, &tr));
        std::cout << id << ',' << fmt(tr) << '\n';
      }

      if (!scheme_specs.empty()) {
        if (common.instance.empty())
          throw Failure{SO_ERR_USAGE, "--scheme requires --instance"};
        auto inst = load_instance(common.instance);
        std::vector<std::string> scheme_ids;
        std::vector<SchemePtr> schemes;
        for (const auto& spec : scheme_specs) {
          const auto eq = spec.find('=');
          if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
            throw Failure{SO_ERR_USAGE, "--scheme expects <id>=<path>, got '" + spec + "'"};
          scheme_ids.push_back(spec.substr(0, eq));
          schemes.push_back(load_scheme(inst.get(), spec.substr(eq + 1)));
        }
        std::vector<const char*> id_ptrs;
        std::vector<const so_scheme*> scheme_ptrs;
        for (size_t i = 0; i < schemes.size(); ++i) {
          id_ptrs.push_back(scheme_ids[i].c_str());
          scheme_ptrs.push_back(schemes[i].get());
        }
        so_calibration* cal_raw = nullptr;
        check(so_calibrate(inst.get(), raw, id_ptrs.data(), scheme_ptrs.data(), schemes.size(),
                           &common.sizes, pool_schemes ? 1 : 0, t_initial, &cal_raw));
        Calibration calibration(cal_raw);
        std::cout << "# measured time uncertainty "
                  << fmt(100.0 * so_calibration_time_uncertainty(cal_raw)) << "%\n"
                  << "group,n_records,quantity,slope,intercept,r_squared\n";
        for (size_t g = 0; g < so_calibration_n_groups(cal_raw); ++g) {
          so_calibration_group grp{};
          check(so_calibration_group_get(cal_raw, g, &grp));
          std::cout << grp.label << ',' << grp.n_records << ",T," << fmt(grp.time_fit.slope)
                    << ',' << fmt(grp.time_fit.intercept) << ','
                    << fmt(grp.time_fit.r_squared) << '\n'
                    << grp.label << ',' << grp.n_records << ",S," << fmt(grp.size_fit.slope)
                    << ',' << fmt(grp.size_fit.intercept) << ','
                    << fmt(grp.size_fit.r_squared) << '\n';
        }
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    // I/O and internal failures surface as data errors.
    return f.status <= SO_ERR_INFEASIBLE ? static_cast<int>(f.status)
                                          : static_cast<int>(SO_ERR_DATA);
  }
  return 0;
}
