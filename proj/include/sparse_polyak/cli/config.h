#ifndef SPARSE_POLYAK_CLI_CONFIG_H_
#define SPARSE_POLYAK_CLI_CONFIG_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_polyak/datagen.h"
#include "sparse_polyak/metrics.h"
#include "sparse_polyak/solver.h"

namespace sparse_polyak::cli {

enum class RunKind { kIht, kAdaptive };

struct SolverRun {
  std::string label;
  RunKind kind = RunKind::kIht;
  SolverConfig solver;         // kIht
  AdaptiveConfig adaptive;     // kAdaptive
  bool f_hat_oracle = false;   // f_hat = f(theta*) of the instance
  bool theory_step = false;    // fixed step 2 / (3 L_bar)
};

struct SweepSpec {
  std::vector<Index> d;
  // Scale s_star and every run's s by d / d[0].
  bool scale_sparsity = false;
};

struct ThresholdSpec {
  enum class Mode { kFixed, kLongRun };
  Mode mode = Mode::kLongRun;
  double value = 0.0;                   // kFixed: gap threshold against f(theta*)
  double factor = kLongRunFactor;       // kLongRun
  std::size_t long_run_iters = 1000;    // kLongRun: length of the reference run
};

struct ExperimentConfig {
  std::string name;
  std::optional<GenSpec> gen;
  std::size_t gen_s = 0;  // budget used by the alpha sample-size rule
  std::optional<std::filesystem::path> instance;  // directory from generate or ingest
  std::vector<SolverRun> runs;
  std::optional<SweepSpec> sweep;
  std::size_t repeats = 1;
  std::optional<ThresholdSpec> threshold;
};

// Throws ConfigError naming the offending field, e.g. "gen.s_star" or
// "solver_runs[1].f_hat".
ExperimentConfig parse_config(std::string_view json_text);
// As parse_config; a relative "instance" path is resolved against the
// config file's directory. IoError if the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sparse_polyak::cli

#endif  // SPARSE_POLYAK_CLI_CONFIG_H_
