#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sparse_polyak/cli/commands.h"
#include "sparse_polyak/cli/config.h"
#include "sparse_polyak/errors.h"

namespace sp = sparse_polyak;
namespace cli = sparse_polyak::cli;

int main(int argc, char** argv) {
  CLI::App app{"Iterative hard thresholding with Polyak-type step sizes"};
  app.require_subcommand(1);

  cli::CommandOptions opts;
  std::string config_path;
  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--out", opts.out, "Output directory")->capture_default_str();
    sub->add_option("--threads", opts.threads, "Worker threads (0: all cores)")
        ->capture_default_str();
    sub->add_option("--seed-offset", opts.seed_offset, "Added to every configured seed")
        ->capture_default_str();
  };

  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic instance to CSV");
  add_common(generate, true);
  CLI::App* solve = app.add_subcommand("solve", "Run the configured solvers, write trace.csv");
  add_common(solve, true);
  CLI::App* bench = app.add_subcommand("bench", "Seed/dimension grid, write runs.csv and summary.csv");
  add_common(bench, true);

  CLI::App* ingest = app.add_subcommand("ingest", "Validate and store a design/responses pair");
  add_common(ingest, false);
  cli::IngestRequest req;
  std::string model = "linear";
  ingest->add_option("--design", req.design, "Design CSV, one sample per row")->required();
  ingest->add_option("--responses", req.responses, "Responses CSV, one column")->required();
  ingest->add_option("--model", model, "linear, logistic or matrix")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  try {
    if (*ingest) {
      req.model = sp::parse_model_kind(model);
      cli::cmd_ingest(req, opts);
      return cli::kExitOk;
    }
    const cli::ExperimentConfig cfg = cli::load_config(config_path);
    if (*generate) cli::cmd_generate(cfg, opts);
    if (*solve) cli::cmd_solve(cfg, opts);
    if (*bench) cli::cmd_bench(cfg, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
  return cli::kExitOk;
}
