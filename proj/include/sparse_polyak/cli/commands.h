#ifndef SPARSE_POLYAK_CLI_COMMANDS_H_
#define SPARSE_POLYAK_CLI_COMMANDS_H_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparse_polyak/cli/config.h"
#include "sparse_polyak/datagen.h"
#include "sparse_polyak/objectives.h"
#include "sparse_polyak/solver.h"

namespace sparse_polyak::cli {

struct CommandOptions {
  std::filesystem::path out = ".";
  unsigned threads = 0;  // 0: one per hardware thread
  std::uint64_t seed_offset = 0;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitIo = 4 };

// ConfigError / ParameterError (including DataError) -> 2, NumericError -> 3,
// IoError -> 4. Anything else -> 3.
int exit_code_for(const std::exception& e);

// An instance loaded from a directory written by cmd_generate or cmd_ingest.
struct LoadedInstance {
  ProblemInstance problem;
  std::optional<GroundTruth> truth;
  std::optional<GenSpec> spec;  // generated instances only
  std::size_t gen_s = 0;
  std::uint64_t seed = 0;
};

LoadedInstance load_instance(const std::filesystem::path& dir);

// Seed of repeat `rep`: gen.seed + seed_offset + rep.
std::uint64_t repeat_seed(const GenSpec& gen, std::uint64_t seed_offset, std::size_t rep);

// Runs one configured solver from theta_0 = 0. f_hat = "oracle" needs truth
// and step = "theory" needs an alpha-mode spec. Adaptive runs are returned as
// one trace whose records are numbered cumulatively across epochs and whose
// final_theta is the best epoch iterate.
RunTrace execute_run(const SolverRun& run, const ProblemInstance& problem,
                     const GroundTruth* truth, const GenSpec* spec);

// Trace CSV text for every run and repeat of the config (cmd_solve output).
std::string solve_trace_csv(const ExperimentConfig& cfg, std::uint64_t seed_offset);

// Writes design.csv, responses.csv, theta_star.csv and manifest.json.
void cmd_generate(const ExperimentConfig& cfg, const CommandOptions& opts);
// Writes trace.csv.
void cmd_solve(const ExperimentConfig& cfg, const CommandOptions& opts);
// Writes runs.csv (one line per (d, label, seed)) and summary.csv (one line
// per (d, label)).
void cmd_bench(const ExperimentConfig& cfg, const CommandOptions& opts);

struct IngestRequest {
  std::filesystem::path design;
  std::filesystem::path responses;
  ModelKind model = ModelKind::kLeastSquares;
};

// Validates the CSVs and writes design.csv, responses.csv and manifest.json.
// Matrix-regression designs must have a square number of columns.
void cmd_ingest(const IngestRequest& req, const CommandOptions& opts);

// Linear-interpolation quantile (q in [0, 1]) of an unsorted sample;
// infinities are allowed.
double quantile(std::vector<double> values, double q);

}  // namespace sparse_polyak::cli

#endif  // SPARSE_POLYAK_CLI_COMMANDS_H_
