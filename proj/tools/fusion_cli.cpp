#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "fusion/runner.hpp"

using namespace fusion;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "override the config seed");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

int run_method(const Common& c, Method m) {
  ExperimentConfig cfg = load(c);
  RunOutcome out = run_experiment(cfg, m);
  write_outputs(c.out, cfg, m, out);
  log_line(LogLevel::Info, "wrote " + c.out + " in " + std::to_string(out.runtime_s) + " s");
  if (out.iad) std::cout << "iad " << *out.iad << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian fusion of sub-posterior samples"};
  app.require_subcommand(1);

  Common fuse, dcfuse, mcf, cmc, bench;
  add_common(app.add_subcommand("fuse", "fork-join fusion of every factor at once"), fuse);
  add_common(app.add_subcommand("dcfuse", "divide-and-conquer fusion over a tree"), dcfuse);
  add_common(app.add_subcommand("mcf", "rejection-sampling fusion with identity preconditioners"), mcf);
  add_common(app.add_subcommand("cmc", "consensus Monte Carlo baseline"), cmc);
  add_common(app.add_subcommand("bench", "sweep C or N over several methods"), bench);

  auto* iad_cmd = app.add_subcommand("iad", "IAD between two samples.csv files");
  std::string iad_a, iad_b;
  iad_cmd->add_option("approx", iad_a, "approximate samples.csv")->required()->check(CLI::ExistingFile);
  iad_cmd->add_option("reference", iad_b, "reference samples.csv")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("fuse")) return run_method(fuse, Method::Gbf);
    if (app.got_subcommand("dcfuse")) return run_method(dcfuse, Method::DcFusion);
    if (app.got_subcommand("mcf")) return run_method(mcf, Method::Mcf);
    if (app.got_subcommand("cmc")) return run_method(cmc, Method::Cmc);
    if (app.got_subcommand("bench")) {
      ExperimentConfig cfg = load(bench);
      run_bench(cfg, bench.out + "/bench.csv");
      return 0;
    }
    if (app.got_subcommand("iad")) {
      Mat a, b;
      Vec wa, wb;
      read_samples_csv(iad_a, a, wa);
      read_samples_csv(iad_b, b, wb);
      std::cout << iad(a, wa, b, wb) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    log_line(LogLevel::Error, e.what());
    return 2;
  } catch (const std::exception& e) {
    log_line(LogLevel::Error, e.what());
    return 1;
  }
  return 1;
}
