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

#include "streamopt/streamopt.h"

#include <map>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "streamopt/calibrate.hpp"
#include "streamopt/cost.hpp"
#include "streamopt/error.hpp"
#include "streamopt/formats.hpp"
#include "streamopt/optimize.hpp"
#include "streamopt/oracle.hpp"
#include "streamopt/synthetic.hpp"

using namespace streamopt;

struct so_instance {
  Dataset dataset;
};

struct so_scheme {
  Scheme scheme;
};

struct so_evaluation {
  CostBreakdown cost;
  StorageBreakdown storage;
};

struct so_result {
  OptimizationResult result;
  OptimizerConfig config;
};

struct so_measurements {
  std::vector<MeasurementRecord> records;
};

struct so_calibration {
  std::vector<CalibrationGroup> groups;
};

namespace {

thread_local std::string last_error;

so_status fail(so_status status, std::string what) {
  last_error = std::move(what);
  return status;
}

template <class Body>
so_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return SO_OK;
  } catch (const Error& e) {
    return fail(static_cast<so_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SO_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::usage, what);
}

SizeModel size_model(const so_size_model* sizes) {
  SizeModel m;
  if (sizes) {
    m.base_kb = sizes->base_kb;
    m.shared_kb = sizes->shared_kb;
  }
  return m;
}

OptimizerConfig to_config(const so_optimizer_config& c) {
  OptimizerConfig cfg;
  cfg.n_streams = c.n_streams;
  cfg.n_restarts = c.n_restarts;
  cfg.max_iters = c.max_iters;
  cfg.step_size = c.step_size;
  cfg.beta1 = c.beta1;
  cfg.beta2 = c.beta2;
  cfg.epsilon = c.epsilon;
  cfg.plateau_tol = c.plateau_tol;
  cfg.plateau_window = c.plateau_window;
  cfg.init_scale = c.init_scale;
  cfg.seed = c.seed;
  cfg.n_threads = c.n_threads;
  return cfg;
}

template <class T>
std::string serialize(const T& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

so_scheme* new_scheme(Scheme s) { return new so_scheme{std::move(s)}; }

}  // namespace

extern "C" {

const char* so_last_error(void) { return last_error.c_str(); }

const char* so_version(void) { return "1.0.0"; }

void so_size_model_default(so_size_model* sizes) {
  if (!sizes) return;
  const SizeModel m;
  sizes->base_kb = m.base_kb;
  sizes->shared_kb = m.shared_kb;
}

void so_synthetic_params_default(so_synthetic_params* p) {
  if (!p) return;
  const SyntheticSpec s;
  p->n_events = s.n_events;
  p->n_modules = s.n_modules;
  p->lines_per_module_min = s.lines_per_module_min;
  p->lines_per_module_max = s.lines_per_module_max;
  p->n_clusters = s.n_clusters;
  p->intra_cluster_pass_rate = s.intra_cluster_pass_rate;
  p->cross_cluster_pass_rate = s.cross_cluster_pass_rate;
  p->prescaled_fraction = s.prescaled_fraction;
  p->prescale_min = s.prescale_min;
  p->turbo_fraction = s.turbo_fraction;
  p->persist_reco_fraction = s.persist_reco_fraction;
  p->seed = s.seed;
}

so_status so_instance_load(const char* path, so_instance** out) {
  return guarded([&] {
    require(path && out, "so_instance_load: null argument");
    *out = new so_instance{load_instance(path)};
  });
}

so_status so_instance_generate(const so_synthetic_params* p, so_instance** out,
                               so_scheme** planted) {
  return guarded([&] {
    require(p && out, "so_instance_generate: null argument");
    SyntheticSpec spec;
    spec.n_events = p->n_events;
    spec.n_modules = p->n_modules;
    spec.lines_per_module_min = p->lines_per_module_min;
    spec.lines_per_module_max = p->lines_per_module_max;
    spec.n_clusters = p->n_clusters;
    spec.intra_cluster_pass_rate = p->intra_cluster_pass_rate;
    spec.cross_cluster_pass_rate = p->cross_cluster_pass_rate;
    spec.prescaled_fraction = p->prescaled_fraction;
    spec.prescale_min = p->prescale_min;
    spec.turbo_fraction = p->turbo_fraction;
    spec.persist_reco_fraction = p->persist_reco_fraction;
    spec.seed = p->seed;
    auto synth = gen_synthetic(spec);
    auto inst = std::make_unique<so_instance>(
        so_instance{Dataset::build(synth.incidence, synth.catalog)});
    if (planted) *planted = new_scheme(std::move(synth.planted));
    *out = inst.release();
  });
}

so_status so_instance_write(const so_instance* inst, const char* path) {
  return guarded([&] {
    require(inst && path, "so_instance_write: null argument");
    const Dataset& d = inst->dataset;
    EventLineIncidence incidence;
    incidence.n_events = d.n_events();
    incidence.n_lines = d.n_lines();
    for (std::size_t e = 0; e < d.n_events(); ++e)
      for (Index l : d.event_lines(static_cast<Index>(e)))
        incidence.entries.emplace_back(static_cast<Index>(e), l);
    write_file_atomic(path, serialize([&](std::ostream& o) {
                        write_instance(o, incidence, d.catalog());
                      }));
  });
}

void so_instance_free(so_instance* inst) { delete inst; }

size_t so_instance_n_events(const so_instance* inst) {
  return inst ? inst->dataset.n_events() : 0;
}
size_t so_instance_n_lines(const so_instance* inst) {
  return inst ? inst->dataset.n_lines() : 0;
}
size_t so_instance_n_modules(const so_instance* inst) {
  return inst ? inst->dataset.n_modules() : 0;
}
size_t so_instance_n_dropped_events(const so_instance* inst) {
  return inst ? inst->dataset.n_dropped_events() : 0;
}
const char* so_instance_module_name(const so_instance* inst, size_t module) {
  if (!inst || module >= inst->dataset.n_modules()) return nullptr;
  return inst->dataset.module_name(static_cast<Index>(module)).c_str();
}

so_status so_scheme_load(const so_instance* inst, const char* path, so_scheme** out) {
  return guarded([&] {
    require(inst && path && out, "so_scheme_load: null argument");
    *out = new_scheme(load_scheme(path, inst->dataset));
  });
}

so_status so_scheme_write(const so_instance* inst, const so_scheme* scheme, const char* path) {
  return guarded([&] {
    require(inst && scheme && path, "so_scheme_write: null argument");
    write_file_atomic(path, serialize([&](std::ostream& o) {
                        write_scheme(o, inst->dataset, scheme->scheme);
                      }));
  });
}

so_status so_scheme_single_stream(const so_instance* inst, so_scheme** out) {
  return guarded([&] {
    require(inst && out, "so_scheme_single_stream: null argument");
    *out = new_scheme(extreme_schemes(inst->dataset).single_stream);
  });
}

so_status so_scheme_per_unit(const so_instance* inst, so_scheme** out) {
  return guarded([&] {
    require(inst && out, "so_scheme_per_unit: null argument");
    *out = new_scheme(extreme_schemes(inst->dataset).per_unit);
  });
}

so_status so_scheme_random_balanced(const so_instance* inst, size_t n_streams, uint64_t seed,
                                    so_scheme** out) {
  return guarded([&] {
    require(inst && out, "so_scheme_random_balanced: null argument");
    if (n_streams > inst->dataset.n_modules())
      throw Error(ErrorKind::infeasible, "more streams than modules");
    *out = new_scheme(random_balanced_scheme(inst->dataset.n_modules(), n_streams, seed));
  });
}

void so_scheme_free(so_scheme* scheme) { delete scheme; }

size_t so_scheme_n_streams(const so_scheme* scheme) {
  return scheme ? scheme->scheme.n_streams : 0;
}
size_t so_scheme_n_units(const so_scheme* scheme) {
  return scheme ? scheme->scheme.n_units() : 0;
}
size_t so_scheme_n_empty_streams(const so_scheme* scheme) {
  return scheme ? scheme->scheme.n_empty_streams() : 0;
}
so_status so_scheme_stream_of(const so_scheme* scheme, size_t unit, size_t* stream) {
  return guarded([&] {
    require(scheme && stream, "so_scheme_stream_of: null argument");
    require(unit < scheme->scheme.n_units(), "so_scheme_stream_of: unit out of range");
    *stream = scheme->scheme.stream_of_unit[unit];
  });
}

so_status so_evaluate(const so_instance* inst, const so_scheme* scheme,
                      const so_size_model* sizes, so_evaluation** out) {
  return guarded([&] {
    require(inst && scheme && out, "so_evaluate: null argument");
    auto cost = cost_T(inst->dataset, scheme->scheme);
    auto storage = cost_S(inst->dataset, scheme->scheme, size_model(sizes));
    *out = new so_evaluation{std::move(cost), std::move(storage)};
  });
}

double so_evaluation_cost_total(const so_evaluation* ev) { return ev ? ev->cost.total : 0.0; }
double so_evaluation_size_total(const so_evaluation* ev) {
  return ev ? ev->storage.total : 0.0;
}
size_t so_evaluation_n_streams(const so_evaluation* ev) {
  return ev ? ev->cost.per_stream.size() : 0;
}
so_status so_evaluation_stream(const so_evaluation* ev, size_t stream, so_stream_stats* out) {
  return guarded([&] {
    require(ev && out, "so_evaluation_stream: null argument");
    require(stream < ev->cost.per_stream.size(), "so_evaluation_stream: stream out of range");
    const auto& sc = ev->cost.per_stream[stream];
    *out = so_stream_stats{sc.n_units, sc.n_lines, sc.expected_events, sc.contribution,
                           ev->storage.per_stream[stream]};
  });
}
void so_evaluation_free(so_evaluation* ev) { delete ev; }

void so_optimizer_config_default(so_optimizer_config* c) {
  if (!c) return;
  const OptimizerConfig d;
  *c = so_optimizer_config{d.n_streams,    d.n_restarts,  d.max_iters,  d.step_size,
                           d.beta1,        d.beta2,       d.epsilon,    d.plateau_tol,
                           d.plateau_window, d.init_scale, d.seed,       d.n_threads};
}

so_status so_optimize(const so_instance* inst, const so_optimizer_config* config,
                      so_result** out) {
  return guarded([&] {
    require(inst && config && out, "so_optimize: null argument");
    const auto cfg = to_config(*config);
    *out = new so_result{optimize(inst->dataset, cfg), cfg};
  });
}

so_status so_result_scheme(const so_result* result, so_scheme** out) {
  return guarded([&] {
    require(result && out, "so_result_scheme: null argument");
    *out = new_scheme(result->result.best_scheme);
  });
}
double so_result_relaxed_loss(const so_result* r) {
  return r ? r->result.best_loss_relaxed : 0.0;
}
double so_result_cost_total(const so_result* r) {
  return r ? r->result.best_cost_discrete.total : 0.0;
}
size_t so_result_best_restart(const so_result* r) { return r ? r->result.best_restart : 0; }
size_t so_result_n_restarts(const so_result* r) { return r ? r->result.per_restart.size() : 0; }
so_status so_result_restart(const so_result* r, size_t restart, so_restart_stats* out) {
  return guarded([&] {
    require(r && out, "so_result_restart: null argument");
    require(restart < r->result.per_restart.size(), "so_result_restart: index out of range");
    const auto& s = r->result.per_restart[restart];
    *out = so_restart_stats{s.finite ? 1 : 0, s.relaxed_loss, s.discrete_cost,
                            s.iterations, s.max_row_entropy, s.n_empty_streams};
  });
}

so_status so_result_write_diagnostics(const so_instance* inst, const so_result* r,
                                      const char* path) {
  return guarded([&] {
    require(inst && r && path, "so_result_write_diagnostics: null argument");
    const auto& res = r->result;
    const auto& cfg = r->config;
    nlohmann::ordered_json j;
    j["seed"] = res.seed;
    j["config"] = {{"n_streams", cfg.n_streams},     {"n_restarts", cfg.n_restarts},
                   {"max_iters", cfg.max_iters},     {"step_size", cfg.step_size},
                   {"beta1", cfg.beta1},             {"beta2", cfg.beta2},
                   {"epsilon", cfg.epsilon},         {"plateau_tol", cfg.plateau_tol},
                   {"plateau_window", cfg.plateau_window}, {"init_scale", cfg.init_scale}};
    j["best_restart"] = res.best_restart;
    j["best_relaxed_loss"] = res.best_loss_relaxed;
    j["best_cost_T"] = res.best_cost_discrete.total;
    j["empty_streams"] = res.best_scheme.n_empty_streams();
    auto streams = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < res.best_cost_discrete.per_stream.size(); ++s) {
      const auto& sc = res.best_cost_discrete.per_stream[s];
      streams.push_back({{"stream", s},
                         {"n_units", sc.n_units},
                         {"n_lines", sc.n_lines},
                         {"expected_events", sc.expected_events},
                         {"contribution", sc.contribution}});
    }
    j["streams"] = streams;
    auto restarts = nlohmann::ordered_json::array();
    for (const auto& s : res.per_restart)
      restarts.push_back({{"finite", s.finite},
                          {"relaxed_loss", s.relaxed_loss},
                          {"discrete_cost", s.discrete_cost},
                          {"iterations", s.iterations},
                          {"max_row_entropy", s.max_row_entropy},
                          {"empty_streams", s.n_empty_streams}});
    j["restarts"] = restarts;
    write_file_atomic(path, j.dump(2) + "\n");
  });
}

void so_result_free(so_result* r) { delete r; }

so_status so_objective_parse(const char* text, so_objective* out) {
  return guarded([&] {
    require(text && out, "so_objective_parse: null argument");
    const auto obj = Objective::parse(text);
    out->kind = static_cast<so_objective_kind>(obj.kind);
    out->weight = obj.weight;
  });
}

so_status so_oracle(const so_instance* inst, size_t n_streams, const so_objective* objective,
                    const so_size_model* sizes, so_scheme** best, double* best_cost,
                    uint64_t* n_evaluated) {
  return guarded([&] {
    require(inst && best, "so_oracle: null argument");
    Objective obj;
    if (objective) {
      require(objective->kind >= SO_OBJECTIVE_T && objective->kind <= SO_OBJECTIVE_WEIGHTED,
              "so_oracle: unknown objective");
      obj.kind = static_cast<ObjectiveKind>(objective->kind);
      obj.weight = objective->weight;
    }
    obj.sizes = size_model(sizes);
    auto res = enumerate_optimal(inst->dataset, n_streams, obj);
    if (best_cost) *best_cost = res.best_cost;
    if (n_evaluated) *n_evaluated = res.n_evaluated;
    *best = new_scheme(std::move(res.best_scheme));
  });
}

so_status so_fit_linear(const double* x, const double* y, size_t n, so_fit* out) {
  return guarded([&] {
    require(out && (n == 0 || (x && y)), "so_fit_linear: null argument");
    const auto r = fit_linear({x, n}, {y, n});
    *out = so_fit{r.slope, r.intercept, r.r_squared, r.n_points};
  });
}

so_status so_measurements_load(const char* path, so_measurements** out) {
  return guarded([&] {
    require(path && out, "so_measurements_load: null argument");
    *out = new so_measurements{load_measurements(path)};
  });
}
size_t so_measurements_count(const so_measurements* ms) { return ms ? ms->records.size() : 0; }
so_status so_measurements_get(const so_measurements* ms, size_t i, so_measurement* out) {
  return guarded([&] {
    require(ms && out, "so_measurements_get: null argument");
    require(i < ms->records.size(), "so_measurements_get: index out of range");
    const auto& r = ms->records[i];
    *out = so_measurement{r.scheme_id.c_str(), r.stream_id.c_str(), r.n_lines,
                          r.measured_time, r.measured_size};
  });
}
so_status so_t_real(const so_measurements* ms, const char* scheme_id, double t_initial,
                    double* out) {
  return guarded([&] {
    require(ms && out, "so_t_real: null argument");
    std::vector<MeasurementRecord> subset;
    for (const auto& r : ms->records)
      if (!scheme_id || r.scheme_id == scheme_id) subset.push_back(r);
    *out = t_real(subset, t_initial);
  });
}
void so_measurements_free(so_measurements* ms) { delete ms; }

so_status so_calibrate(const so_instance* inst, const so_measurements* ms,
                       const char* const* scheme_ids, const so_scheme* const* schemes,
                       size_t n_schemes, const so_size_model* sizes, int pool_schemes,
                       double t_initial, so_calibration** out) {
  return guarded([&] {
    require(inst && ms && out && (n_schemes == 0 || (scheme_ids && schemes)),
            "so_calibrate: null argument");
    std::map<std::string, Scheme> by_id;
    for (size_t i = 0; i < n_schemes; ++i) {
      require(scheme_ids[i] && schemes[i], "so_calibrate: null scheme entry");
      if (!by_id.emplace(scheme_ids[i], schemes[i]->scheme).second)
        throw Error(ErrorKind::usage,
                    std::string("scheme id '") + scheme_ids[i] + "' given twice");
    }
    auto records = ms->records;
    attach_model_terms(inst->dataset, by_id, records, size_model(sizes));
    *out = new so_calibration{calibrate(records, pool_schemes != 0, t_initial)};
  });
}
size_t so_calibration_n_groups(const so_calibration* cal) {
  return cal ? cal->groups.size() : 0;
}
so_status so_calibration_group_get(const so_calibration* cal, size_t i,
                                   so_calibration_group* out) {
  return guarded([&] {
    require(cal && out, "so_calibration_group_get: null argument");
    require(i < cal->groups.size(), "so_calibration_group_get: index out of range");
    const auto& g = cal->groups[i];
    auto fit = [](const CalibrationReport& r) {
      return so_fit{r.slope, r.intercept, r.r_squared, r.n_points};
    };
    *out = so_calibration_group{g.label.c_str(), g.n_records, fit(g.time_fit),
                                fit(g.size_fit), g.t_real};
  });
}
double so_calibration_time_uncertainty(const so_calibration*) {
  return kDefaultTimeUncertainty;
}
void so_calibration_free(so_calibration* cal) { delete cal; }

}  // extern "C"
