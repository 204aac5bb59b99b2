#include "sparse_polyak/cli/config.h"

#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "sparse_polyak/cli/csv.h"
#include "sparse_polyak/errors.h"

namespace sparse_polyak::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

const json& require(const json& obj, const std::string& parent, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(parent, key), "missing required field");
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "expected a finite number");
  return x;
}

std::uint64_t as_uint(const json& v, const std::string& field) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

void require_object(const json& v, const std::string& field) {
  if (!v.is_object()) throw ConfigError(field, "expected an object");
}

GenSpec parse_gen(const json& g, std::size_t* budget) {
  const std::string p = "gen";
  require_object(g, p);
  GenSpec spec;
  spec.d = static_cast<Index>(as_uint(require(g, p, "d"), "gen.d"));
  spec.s_star = static_cast<Index>(as_uint(require(g, p, "s_star"), "gen.s_star"));
  try {
    spec.model = parse_model_kind(as_string(require(g, p, "model"), "gen.model"));
  } catch (const ConfigError&) {
    throw;
  } catch (const ParameterError& e) {
    throw ConfigError("gen.model", e.what());
  }
  spec.seed = as_uint(require(g, p, "seed"), "gen.seed");
  if (const json* v = optional_field(g, "omega")) spec.omega = as_number(*v, "gen.omega");
  if (const json* v = optional_field(g, "noise_var")) {
    spec.noise_var = as_number(*v, "gen.noise_var");
  }
  const json* alpha = optional_field(g, "alpha");
  const json* n = optional_field(g, "n");
  if (!alpha && !n) throw ConfigError("gen.alpha", "missing required field (or give gen.n)");
  if (alpha) spec.alpha = as_number(*alpha, "gen.alpha");
  if (n) spec.n = static_cast<Index>(as_uint(*n, "gen.n"));
  if (alpha) *budget = as_uint(require(g, p, "s"), "gen.s");

  try {
    spec.validate();
  } catch (const ParameterError& e) {
    // Messages from validate() start with the field name.
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError("gen." + msg.substr(0, colon), msg.substr(colon + 2));
  }
  if (alpha && *budget < 1) throw ConfigError("gen.s", "must be at least 1");
  return spec;
}

SolverRun parse_run(const json& r, const std::string& p) {
  require_object(r, p);
  SolverRun run;
  run.label = as_string(require(r, p, "label"), join(p, "label"));
  if (run.label.empty() || run.label.find_first_of(",\n\r") != std::string::npos) {
    throw ConfigError(join(p, "label"), "must be non-empty without commas or newlines");
  }
  const std::string rule = as_string(require(r, p, "rule"), join(p, "rule"));
  const std::size_t s = as_uint(require(r, p, "s"), join(p, "s"));
  if (s < 1) throw ConfigError(join(p, "s"), "must be at least 1");

  if (rule == "adaptive") {
    run.kind = RunKind::kAdaptive;
    AdaptiveConfig& a = run.adaptive;
    a.s = s;
    a.inner_T = as_uint(require(r, p, "inner_T"), join(p, "inner_T"));
    a.outer_K = as_uint(require(r, p, "outer_K"), join(p, "outer_K"));
    if (const json* v = optional_field(r, "f_tilde_1")) {
      a.f_tilde_1 = as_number(*v, join(p, "f_tilde_1"));
    }
    if (const json* v = optional_field(r, "denom_scale")) {
      a.denom_scale = as_number(*v, join(p, "denom_scale"));
    }
    try {
      a.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(p, e.what());
    }
    return run;
  }

  StepKind kind;
  try {
    kind = parse_step_kind(rule);
  } catch (const ParameterError& e) {
    throw ConfigError(join(p, "rule"), e.what());
  }
  SolverConfig& c = run.solver;
  c.s = s;
  if (const json* v = optional_field(r, "max_iters")) c.max_iters = as_uint(*v, join(p, "max_iters"));
  if (const json* v = optional_field(r, "tol_f")) c.tol_f = as_number(*v, join(p, "tol_f"));

  switch (kind) {
    case StepKind::kFixed: {
      const json& step = require(r, p, "step");
      if (step.is_string() && step.get<std::string>() == "theory") {
        run.theory_step = true;
        c.step_rule = StepRule::fixed(1.0);
      } else {
        c.step_rule = StepRule::fixed(as_number(step, join(p, "step")));
      }
      break;
    }
    case StepKind::kClassicalPolyak:
      c.step_rule = StepRule::classical_polyak();
      break;
    case StepKind::kSparsePolyak:
      c.step_rule = StepRule::sparse_polyak();
      break;
    case StepKind::kSparsePolyak2s:
      c.step_rule = StepRule::sparse_polyak_2s();
      break;
  }
  if (kind != StepKind::kFixed) {
    if (const json* v = optional_field(r, "denom_scale")) {
      c.step_rule.denom_scale = as_number(*v, join(p, "denom_scale"));
    }
    const json& f_hat = require(r, p, "f_hat");
    if (f_hat.is_string() && f_hat.get<std::string>() == "oracle") {
      run.f_hat_oracle = true;
      c.f_hat = 0.0;
    } else {
      c.f_hat = as_number(f_hat, join(p, "f_hat"));
    }
  }
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(p, e.what());
  }
  return run;
}

ThresholdSpec parse_threshold(const json& t) {
  const std::string p = "threshold";
  require_object(t, p);
  ThresholdSpec spec;
  const std::string mode = as_string(require(t, p, "mode"), "threshold.mode");
  if (mode == "fixed") {
    spec.mode = ThresholdSpec::Mode::kFixed;
    spec.value = as_number(require(t, p, "value"), "threshold.value");
    if (spec.value < 0.0) throw ConfigError("threshold.value", "must be non-negative");
  } else if (mode == "long_run") {
    spec.mode = ThresholdSpec::Mode::kLongRun;
    if (const json* v = optional_field(t, "factor")) spec.factor = as_number(*v, "threshold.factor");
    if (const json* v = optional_field(t, "iters")) spec.long_run_iters = as_uint(*v, "threshold.iters");
    if (!(spec.factor > 0.0)) throw ConfigError("threshold.factor", "must be positive");
  } else {
    throw ConfigError("threshold.mode", "expected 'fixed' or 'long_run', got '" + mode + "'");
  }
  return spec;
}

SweepSpec parse_sweep(const json& s) {
  SweepSpec sweep;
  const json* list = &s;
  if (s.is_object()) {
    list = &require(s, "sweep", "d");
    if (const json* v = optional_field(s, "scale_sparsity")) {
      if (!v->is_boolean()) throw ConfigError("sweep.scale_sparsity", "expected a boolean");
      sweep.scale_sparsity = v->get<bool>();
    }
  }
  const std::string field = s.is_object() ? "sweep.d" : "sweep";
  if (!list->is_array() || list->empty()) throw ConfigError(field, "expected a non-empty list");
  for (std::size_t i = 0; i < list->size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const auto d = static_cast<Index>(as_uint((*list)[i], f));
    if (d < 2) throw ConfigError(f, "must be at least 2");
    sweep.d.push_back(d);
  }
  return sweep;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  require_object(root, "<root>");

  ExperimentConfig cfg;
  cfg.name = as_string(require(root, "", "name"), "name");

  const json* gen = optional_field(root, "gen");
  const json* inst = optional_field(root, "instance");
  if (!gen && !inst) throw ConfigError("gen", "missing required field (or give instance)");
  if (gen && inst) throw ConfigError("instance", "give either gen or instance, not both");
  if (gen) cfg.gen = parse_gen(*gen, &cfg.gen_s);
  if (inst) cfg.instance = std::filesystem::path(as_string(*inst, "instance"));

  const json& runs = require(root, "", "solver_runs");
  if (!runs.is_array() || runs.empty()) {
    throw ConfigError("solver_runs", "expected a non-empty list");
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string p = "solver_runs[" + std::to_string(i) + "]";
    cfg.runs.push_back(parse_run(runs[i], p));
    if (!labels.insert(cfg.runs.back().label).second) {
      throw ConfigError(p + ".label", "duplicate label '" + cfg.runs.back().label + "'");
    }
  }

  if (const json* v = optional_field(root, "repeats")) {
    cfg.repeats = as_uint(*v, "repeats");
    if (cfg.repeats < 1) throw ConfigError("repeats", "must be at least 1");
  }
  if (const json* v = optional_field(root, "sweep")) cfg.sweep = parse_sweep(*v);
  if (const json* v = optional_field(root, "threshold")) cfg.threshold = parse_threshold(*v);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig cfg = parse_config(read_text_file(path));
  if (cfg.instance && cfg.instance->is_relative()) {
    cfg.instance = path.parent_path() / *cfg.instance;
  }
  return cfg;
}

}  // namespace sparse_polyak::cli
