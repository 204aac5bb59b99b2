#include "sparse_polyak/cli/commands.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "sparse_polyak/cli/csv.h"
#include "sparse_polyak/errors.h"
#include "sparse_polyak/metrics.h"

namespace sparse_polyak::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ParameterError*>(&e)) return kExitConfig;
  return kExitNumeric;
}

std::uint64_t repeat_seed(const GenSpec& gen, std::uint64_t seed_offset, std::size_t rep) {
  return gen.seed + seed_offset + rep;
}

namespace {

const std::string kManifest = "manifest.json";
const std::string kDesign = "design.csv";
const std::string kResponses = "responses.csv";
const std::string kThetaStar = "theta_star.csv";

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

json spec_to_json(const GenSpec& spec) {
  json j;
  j["d"] = spec.d;
  j["s_star"] = spec.s_star;
  if (spec.alpha) j["alpha"] = *spec.alpha;
  if (spec.n) j["n"] = *spec.n;
  j["omega"] = spec.omega;
  j["noise_var"] = spec.noise_var;
  j["model"] = std::string(to_string(spec.model));
  j["seed"] = spec.seed;
  return j;
}

GenSpec spec_from_json(const json& j) {
  GenSpec spec;
  spec.d = j.at("d").get<Index>();
  spec.s_star = j.at("s_star").get<Index>();
  if (j.contains("alpha")) spec.alpha = j.at("alpha").get<double>();
  if (j.contains("n")) spec.n = j.at("n").get<Index>();
  spec.omega = j.at("omega").get<double>();
  spec.noise_var = j.at("noise_var").get<double>();
  spec.model = parse_model_kind(j.at("model").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

ProblemInstance make_problem(ModelKind model, DenseMatrix x, DenseVector y, Index rows,
                             Index cols) {
  switch (model) {
    case ModelKind::kLogistic:
      return ProblemInstance::logistic(std::move(x), std::move(y));
    case ModelKind::kMatrixRegression:
      return ProblemInstance::matrix_regression(std::move(x), std::move(y), rows, cols);
    case ModelKind::kLeastSquares:
      break;
  }
  return ProblemInstance::least_squares(std::move(x), std::move(y));
}

RunTrace flatten_adaptive(AdaptiveResult res) {
  RunTrace out;
  std::size_t offset = 0;
  for (RunTrace& epoch : res.epochs) {
    for (IterationRecord& r : epoch.records) {
      r.t += offset;
      out.records.push_back(std::move(r));
    }
    offset = out.records.size();
    out.termination = epoch.termination;
  }
  out.final_theta = std::move(res.theta_bar);
  out.f_hat = res.lower_bounds.empty() ? 0.0 : res.lower_bounds.back();
  return out;
}

// Runs `fn(i)` for i in [0, count) on up to `threads` workers. The first
// exception by task index is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

LoadedInstance load_instance(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(dir / kManifest));
  } catch (const json::exception& e) {
    throw ConfigError((dir / kManifest).string(), std::string("invalid manifest: ") + e.what());
  }
  try {
    const ModelKind model = parse_model_kind(manifest.at("model").get<std::string>());
    NumericTable x = read_numeric_csv(dir / kDesign);
    NumericTable y = read_numeric_csv(dir / kResponses);
    if (y.data.cols() != 1) throw DataError((dir / kResponses).string(), 1, 0, "expected one column");
    const auto rows = manifest.at("param_rows").get<Index>();
    const auto cols = manifest.at("param_cols").get<Index>();
    LoadedInstance out{make_problem(model, std::move(x.data), y.data.col(0), rows, cols),
                       std::nullopt, std::nullopt, 0, manifest.value("seed", std::uint64_t{0})};
    if (manifest.contains("spec")) {
      out.spec = spec_from_json(manifest.at("spec"));
      out.gen_s = manifest.value("s", std::size_t{0});
    }
    if (manifest.value("ground_truth", false)) {
      NumericTable t = read_numeric_csv(dir / kThetaStar);
      if (t.data.cols() != 1 || t.data.rows() != out.problem.dim()) {
        throw DataError((dir / kThetaStar).string(), 1, 0, "theta* does not match the design");
      }
      GroundTruth truth;
      truth.theta_star = t.data.col(0);
      truth.support_star = support(truth.theta_star);
      truth.f_star = value(out.problem, truth.theta_star);
      out.truth = std::move(truth);
    }
    return out;
  } catch (const json::exception& e) {
    throw ConfigError((dir / kManifest).string(), std::string("invalid manifest: ") + e.what());
  }
}

RunTrace execute_run(const SolverRun& run, const ProblemInstance& problem,
                     const GroundTruth* truth, const GenSpec* spec) {
  std::optional<DenseVector> ref;
  if (truth) ref = truth->theta_star;
  const DenseVector theta_0 = DenseVector::Zero(problem.dim());
  if (run.kind == RunKind::kAdaptive) {
    return flatten_adaptive(run_adaptive(problem, theta_0, run.adaptive, ref));
  }
  SolverConfig cfg = run.solver;
  if (run.f_hat_oracle) {
    if (!truth) {
      throw ConfigError("solver_runs." + run.label + ".f_hat",
                        "'oracle' needs an instance with ground truth");
    }
    cfg.f_hat = truth->f_star;
  }
  if (run.theory_step) {
    if (!spec || !spec->alpha) {
      throw ConfigError("solver_runs." + run.label + ".step",
                        "'theory' needs a generated instance with gen.alpha");
    }
    cfg.step_rule.fixed_step = theory_bounds(*spec, cfg.s).fixed_step;
  }
  return run_iht(problem, theta_0, cfg, ref);
}

std::string solve_trace_csv(const ExperimentConfig& cfg, std::uint64_t seed_offset) {
  struct Case {
    std::uint64_t seed;
    GeneratedInstance inst;
    std::optional<GenSpec> spec;
  };
  std::vector<Case> cases;
  bool with_truth = true;
  if (cfg.gen) {
    for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
      GenSpec spec = *cfg.gen;
      spec.seed = repeat_seed(*cfg.gen, seed_offset, rep);
      cases.push_back(Case{spec.seed, generate(spec, cfg.gen_s), spec});
    }
  } else {
    LoadedInstance loaded = load_instance(*cfg.instance);
    with_truth = loaded.truth.has_value();
    GroundTruth truth = loaded.truth ? std::move(*loaded.truth) : GroundTruth{};
    cases.push_back(Case{loaded.seed, GeneratedInstance{std::move(loaded.problem), std::move(truth)},
                         loaded.spec});
  }

  std::ostringstream out;
  write_trace_header(out, with_truth);
  for (const SolverRun& run : cfg.runs) {
    for (const Case& c : cases) {
      const GroundTruth* truth = with_truth ? &c.inst.truth : nullptr;
      const RunTrace trace =
          execute_run(run, c.inst.problem, truth, c.spec ? &*c.spec : nullptr);
      TruthRef ref;
      if (truth) ref = TruthRef{&truth->theta_star, &truth->support_star};
      write_trace_rows(out, run.label, c.seed, trace, ref);
    }
  }
  return out.str();
}

void cmd_generate(const ExperimentConfig& cfg, const CommandOptions& opts) {
  if (!cfg.gen) throw ConfigError("gen", "generate needs a gen section");
  GenSpec spec = *cfg.gen;
  spec.seed = repeat_seed(*cfg.gen, opts.seed_offset, 0);
  const GeneratedInstance inst = generate(spec, cfg.gen_s);
  const ProblemInstance& p = inst.problem;

  ensure_dir(opts.out);
  write_numeric_csv(opts.out / kDesign, indexed_header("x", p.dim()), p.design());
  write_numeric_csv(opts.out / kResponses, {"y"}, p.responses());
  write_numeric_csv(opts.out / kThetaStar, {"theta_star"}, inst.truth.theta_star);

  json m;
  m["name"] = cfg.name;
  m["model"] = std::string(to_string(p.kind()));
  m["n"] = p.samples();
  m["d"] = p.dim();
  m["param_rows"] = p.param_rows();
  m["param_cols"] = p.param_cols();
  m["seed"] = spec.seed;
  if (spec.alpha) m["s"] = cfg.gen_s;
  m["f_star"] = inst.truth.f_star;
  m["ground_truth"] = true;
  m["spec"] = spec_to_json(spec);
  write_text_file(opts.out / kManifest, m.dump(2) + "\n");
}

void cmd_solve(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const std::string csv = solve_trace_csv(cfg, opts.seed_offset);
  ensure_dir(opts.out);
  write_text_file(opts.out / "trace.csv", csv);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  if (lo == hi || values[lo] == values[hi]) return values[lo];
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

struct BenchRow {
  Index d = 0;
  std::size_t label_index = 0;
  std::uint64_t seed = 0;
  Index n = 0;
  std::size_t s = 0;
  double threshold = 0.0;
  std::optional<std::size_t> iters;
  std::size_t evaluations = 0;
  double final_gap = 0.0;
  double final_err = 0.0;
  double f1 = 0.0;
  Termination termination = Termination::kMaxIters;
};

std::size_t scaled(std::size_t v, double factor) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(v * factor)));
}

std::size_t run_budget(const SolverRun& run) {
  return run.kind == RunKind::kAdaptive ? run.adaptive.s : run.solver.s;
}

SolverRun scale_run(SolverRun run, double factor) {
  if (run.kind == RunKind::kAdaptive) {
    run.adaptive.s = scaled(run.adaptive.s, factor);
  } else {
    run.solver.s = scaled(run.solver.s, factor);
  }
  return run;
}

std::vector<BenchRow> bench_cell(const ExperimentConfig& cfg, Index d, std::uint64_t seed) {
  const SweepSpec* sweep = cfg.sweep ? &*cfg.sweep : nullptr;
  const double factor = sweep && sweep->scale_sparsity
                            ? static_cast<double>(d) / static_cast<double>(sweep->d.front())
                            : 1.0;
  GenSpec spec = *cfg.gen;
  spec.d = d;
  spec.seed = seed;
  spec.s_star = static_cast<Index>(scaled(static_cast<std::size_t>(spec.s_star), factor));
  const std::size_t gen_s = scaled(cfg.gen_s, factor);
  const GeneratedInstance inst = generate(spec, gen_s);
  const ProblemInstance& p = inst.problem;
  const GroundTruth& truth = inst.truth;

  const ThresholdSpec& th = *cfg.threshold;
  double threshold = th.value;
  if (th.mode == ThresholdSpec::Mode::kLongRun) {
    if (!spec.alpha) throw ConfigError("threshold.mode", "'long_run' needs gen.alpha");
    SolverConfig ref;
    ref.s = gen_s;
    ref.max_iters = th.long_run_iters;
    ref.step_rule = StepRule::fixed(theory_bounds(spec, gen_s).fixed_step);
    const RunTrace long_run = run_iht(p, DenseVector::Zero(p.dim()), ref);
    threshold = long_run_threshold(long_run.records.back().f_value, truth.f_star, th.factor);
  }

  std::vector<BenchRow> rows;
  for (std::size_t li = 0; li < cfg.runs.size(); ++li) {
    const SolverRun run = scale_run(cfg.runs[li], factor);
    const RunTrace trace = execute_run(run, p, &truth, &spec);
    BenchRow row;
    row.d = d;
    row.label_index = li;
    row.seed = seed;
    row.n = p.samples();
    row.s = run_budget(run);
    row.threshold = threshold;
    row.iters = iters_to_threshold(trace, threshold, truth.f_star);
    row.evaluations = trace.records.size();
    row.final_gap = value(p, trace.final_theta) - truth.f_star;
    row.final_err = estimation_error(trace.final_theta, truth.theta_star);
    row.f1 = support_metrics(trace.final_theta, truth.support_star).f1;
    row.termination = trace.termination;
    rows.push_back(row);
  }
  return rows;
}

std::string format_iters(const std::optional<std::size_t>& iters) {
  return iters ? std::to_string(*iters) : std::string("inf");
}

}  // namespace

void cmd_bench(const ExperimentConfig& cfg, const CommandOptions& opts) {
  if (!cfg.gen) throw ConfigError("gen", "bench needs a gen section");
  if (!cfg.threshold) throw ConfigError("threshold", "missing required field");
  const std::vector<Index> ds = cfg.sweep ? cfg.sweep->d : std::vector<Index>{cfg.gen->d};

  const std::size_t cells = ds.size() * cfg.repeats;
  std::vector<std::vector<BenchRow>> results(cells);
  parallel_for(cells, opts.threads, [&](std::size_t i) {
    const Index d = ds[i / cfg.repeats];
    const std::uint64_t seed = repeat_seed(*cfg.gen, opts.seed_offset, i % cfg.repeats);
    results[i] = bench_cell(cfg, d, seed);
  });

  std::vector<BenchRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.d, a.label_index, a.seed) < std::tie(b.d, b.label_index, b.seed);
  });

  std::ostringstream runs_csv;
  runs_csv << "d,label,seed,n,s,threshold,iters_to_threshold,evaluations,final_f_gap,"
              "final_err_sq,f1,termination\n";
  for (const BenchRow& r : rows) {
    runs_csv << r.d << ',' << cfg.runs[r.label_index].label << ',' << r.seed << ',' << r.n << ','
             << r.s << ',' << format_double(r.threshold) << ',' << format_iters(r.iters) << ','
             << r.evaluations << ',' << format_double(r.final_gap) << ','
             << format_double(r.final_err) << ',' << format_double(r.f1) << ','
             << to_string(r.termination) << '\n';
  }

  std::ostringstream summary;
  summary << "d,label,runs,n,s,iters_median,iters_q1,iters_q3,iters_iqr,censored,"
             "final_err_median,final_gap_median,f1_median,err_over_rate,"
             "rate_invariance_ratio\n";
  std::vector<double> base_median(cfg.runs.size(), 0.0);
  for (std::size_t di = 0; di < ds.size(); ++di) {
    for (std::size_t li = 0; li < cfg.runs.size(); ++li) {
      std::vector<double> iters, errs, gaps, f1s;
      Index n = 0;
      std::size_t s = 0, censored = 0;
      for (const BenchRow& r : rows) {
        if (r.d != ds[di] || r.label_index != li) continue;
        iters.push_back(r.iters ? static_cast<double>(*r.iters)
                                : std::numeric_limits<double>::infinity());
        censored += !r.iters;
        errs.push_back(r.final_err);
        gaps.push_back(r.final_gap);
        f1s.push_back(r.f1);
        n = r.n;
        s = r.s;
      }
      const double med = quantile(iters, 0.5);
      const double q1 = quantile(iters, 0.25);
      const double q3 = quantile(iters, 0.75);
      const double iqr = q1 == q3 ? 0.0 : q3 - q1;
      if (di == 0) base_median[li] = med;
      const double err_med = quantile(errs, 0.5);
      const double rate =
          static_cast<double>(s) * std::log(static_cast<double>(ds[di])) / static_cast<double>(n);
      summary << ds[di] << ',' << cfg.runs[li].label << ',' << iters.size() << ',' << n << ','
              << s << ',' << format_double(med) << ',' << format_double(q1) << ','
              << format_double(q3) << ',' << format_double(iqr) << ',' << censored << ','
              << format_double(err_med) << ',' << format_double(quantile(gaps, 0.5)) << ','
              << format_double(quantile(f1s, 0.5)) << ',' << format_double(err_med / rate) << ','
              << format_double(med / base_median[li]) << '\n';
    }
  }

  ensure_dir(opts.out);
  write_text_file(opts.out / "runs.csv", runs_csv.str());
  write_text_file(opts.out / "summary.csv", summary.str());
}

void cmd_ingest(const IngestRequest& req, const CommandOptions& opts) {
  NumericTable x = read_numeric_csv(req.design);
  NumericTable y = read_numeric_csv(req.responses);
  const std::string ysrc = req.responses.string();
  const std::size_t yhead = y.header.empty() ? 0 : 1;
  if (y.data.cols() != 1) {
    throw DataError(ysrc, 1, 0,
                    "expected one column, found " + std::to_string(y.data.cols()));
  }
  if (y.data.rows() != x.data.rows()) {
    throw DataError(ysrc, static_cast<std::size_t>(y.data.rows()) + yhead, 0,
                    std::to_string(y.data.rows()) + " responses for " +
                        std::to_string(x.data.rows()) + " design rows");
  }
  if (req.model == ModelKind::kLogistic) {
    for (Index i = 0; i < y.data.rows(); ++i) {
      const double v = y.data(i, 0);
      if (v != 0.0 && v != 1.0) {
        throw DataError(ysrc, static_cast<std::size_t>(i) + 1 + yhead, 1,
                        "logistic label must be 0 or 1, got " + format_double(v));
      }
    }
  }
  Index rows = x.data.cols(), cols = 1;
  if (req.model == ModelKind::kMatrixRegression) {
    const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(rows))));
    if (side * side != rows) {
      throw DataError(req.design.string(), 1, 0,
                      "matrix regression needs a square number of columns, got " +
                          std::to_string(rows));
    }
    rows = cols = side;
  }
  const ProblemInstance p = make_problem(req.model, std::move(x.data), y.data.col(0), rows, cols);

  ensure_dir(opts.out);
  write_numeric_csv(opts.out / kDesign, indexed_header("x", p.dim()), p.design());
  write_numeric_csv(opts.out / kResponses, {"y"}, p.responses());
  json m;
  m["model"] = std::string(to_string(p.kind()));
  m["n"] = p.samples();
  m["d"] = p.dim();
  m["param_rows"] = p.param_rows();
  m["param_cols"] = p.param_cols();
  m["seed"] = 0;
  m["ground_truth"] = false;
  m["source"] = {{"design", req.design.string()}, {"responses", req.responses.string()}};
  write_text_file(opts.out / kManifest, m.dump(2) + "\n");
}

}  // namespace sparse_polyak::cli
