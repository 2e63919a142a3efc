#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ww/core/errors.h"
#include "ww/harness/harness.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGeneration = 3;
constexpr int kExitAgentProtocol = 4;

struct CommonFlags {
  std::string config_path;
  std::string out;
  int instances = -1;
  std::string base_seed;
  double tau = -1.0;
  int workers = -1;
};

ww::harness::RunConfig resolve_config(const CommonFlags& flags) {
  ww::harness::RunConfig config = ww::harness::load_run_config(flags.config_path);
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (flags.instances > 0) config.instances_per_level = flags.instances;
  if (!flags.base_seed.empty()) config.base_seed = ww::parse_seed(flags.base_seed);
  if (flags.tau > 0.0) config.tau = flags.tau;
  if (flags.workers > 0) config.workers = flags.workers;
  config.validate();
  return config;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration JSON")->required();
  cmd->add_option("--out", flags.out, "override output directory");
  cmd->add_option("--n", flags.instances, "override instances per level");
  cmd->add_option("--base-seed", flags.base_seed, "override base seed (decimal string)");
  cmd->add_option("--tau", flags.tau, "override success threshold");
  cmd->add_option("--workers", flags.workers, "override episode worker count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workshop World: benchmark generation, simulation and frontier evaluation"};
  app.require_subcommand(1);

  CommonFlags gen_flags;
  CLI::App* generate = app.add_subcommand("generate", "generate an instance batch + manifest");
  add_common(generate, gen_flags);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run the full phased evaluation");
  add_common(run, run_flags);

  std::string score_dir;
  CLI::App* score = app.add_subcommand("score", "recompute metrics from a run directory");
  score->add_option("run_dir", score_dir, "directory written by `ww run`")->required();

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "emit the report bundle for a run");
  report->add_option("run_dir", report_dir, "directory written by `ww run`")->required();

  std::string validate_dir;
  int validate_cap = 0;
  long validate_nodes = 10'000'000;
  CLI::App* validate = app.add_subcommand("validate", "oracle pass over a generated batch");
  validate->add_option("batch_dir", validate_dir, "directory with manifest.json")->required();
  validate->add_option("--cap", validate_cap, "cost cap (default: each instance's horizon)");
  validate->add_option("--node-budget", validate_nodes, "oracle node budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const ww::harness::RunConfig config = resolve_config(gen_flags);
      const auto batch = ww::harness::generate_batch(config);
      const std::string dir = config.output_dir + "/instances";
      ww::harness::write_batch(batch, config, dir);
      int count = 0;
      for (const auto& bucket : batch.by_level) count += static_cast<int>(bucket.size());
      std::cout << "generated " << count << " instances in " << dir << "\n";
      return kExitOk;
    }
    if (run->parsed()) {
      const ww::harness::RunConfig config = resolve_config(run_flags);
      const ww::harness::RunLog log = ww::harness::run_evaluation(config);
      std::cout << "run complete: " << config.output_dir << "\n";
      std::cout << "pdc per phase:";
      for (const auto& p : log.summary.phases) std::cout << " " << p.pdc;
      std::cout << "\n";
      if (log.summary.cdr) std::cout << "cdr: " << *log.summary.cdr << "\n";
      return kExitOk;
    }
    if (score->parsed()) {
      ww::harness::score_run(score_dir);
      std::cout << "metrics refreshed in " << score_dir << "\n";
      return kExitOk;
    }
    if (report->parsed()) {
      const bool complete = ww::harness::write_report(report_dir);
      if (!complete) std::cerr << "warning: partial report (missing phases)\n";
      std::cout << "report written to " << report_dir << "/report\n";
      return kExitOk;
    }
    if (validate->parsed()) {
      const int violations =
          ww::harness::validate_batch(validate_dir, validate_cap, validate_nodes);
      std::cout << "validation violations: " << violations << "\n";
      return violations == 0 ? kExitOk : kExitFailure;
    }
  } catch (const ww::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ww::GenerationError& e) {
    std::cerr << "generation error: " << e.what() << "\n";
    return kExitGeneration;
  } catch (const ww::AgentProtocolError& e) {
    std::cerr << "agent protocol error: " << e.what() << "\n";
    return kExitAgentProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
