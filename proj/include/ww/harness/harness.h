#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ww/agents/agents.h"
#include "ww/core/json_io.h"
#include "ww/core/types.h"
#include "ww/genesis/generator.h"
#include "ww/metrics/metrics.h"

namespace ww::harness {

inline constexpr const char* kToolVersion = "ww 0.1.0";
inline constexpr int kRunConfigSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;

struct PhasePlanConfig {
  agents::AgentKind kind = agents::AgentKind::BudgetedExhaustive;
  std::vector<long> schedule;         // capability knob per phase (built-ins)
  std::vector<std::string> commands;  // external: one command per phase
  double timeout_seconds = 30.0;
};

struct RunConfig {
  DifficultyLadder ladder;
  int instances_per_level = 10;  // N
  std::uint64_t base_seed = 1;
  genesis::GeneratorConfig generator;
  PhasePlanConfig phases;
  double tau = 0.7;
  int workers = 1;
  std::string output_dir = "out";
  std::uint64_t agent_seed_base = 1;

  void validate() const;  // throws ConfigError
};

RunConfig run_config_from_json(const OrderedJson& j);
OrderedJson run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::string& path);

// Instance seeds: base_seed + (level-1)*N + index, pairwise distinct within a
// run. Episode seeds mix (phase, level, index) through splitmix64.
std::uint64_t instance_seed(const RunConfig& config, int level, int index);
std::uint64_t episode_seed(const RunConfig& config, int phase_index, int level, int index);

std::vector<agents::AgentSpec> build_phases(const RunConfig& config);

struct GeneratedBatch {
  std::vector<std::vector<Instance>> by_level;  // [level-1][index]
};

// Generates (or reloads from the on-disk cache) the full batch; every phase
// replays exactly these instances.
GeneratedBatch generate_batch(const RunConfig& config);
GeneratedBatch load_or_generate_batch(const RunConfig& config, const std::string& instance_dir);

std::string instance_file_name(int level, std::uint64_t seed);

// Writes instance files plus manifest.json into dir.
void write_batch(const GeneratedBatch& batch, const RunConfig& config,
                 const std::string& dir);

struct RunLog {
  OrderedJson resolved_config;
  std::vector<metrics::PhaseResult> phases;
  metrics::FrontierSummary summary;
};

// Full protocol: fixed instance batch, one episode per (phase, instance),
// metrics, and persistence under config.output_dir:
//   resolved_config.json, instances/, episodes.jsonl, traces.jsonl,
//   metrics.csv, frontier.json, runlog.json
RunLog run_evaluation(const RunConfig& config);

// Recomputes metrics.csv and frontier.json from a run directory's
// episodes.jsonl; byte-identical to what run_evaluation wrote.
metrics::FrontierSummary score_run(const std::string& run_dir);

// Report bundle under <run_dir>/report: figure1.csv, figure1.json (success
// curves + tau reference), figure2.json (ceiling and novelty series),
// summary.txt. Returns false when the runlog was incomplete.
bool write_report(const std::string& run_dir);

// Oracle pass over a generated batch dir; fills the manifest's oracle fields
// and returns the number of exact-horizon violations.
int validate_batch(const std::string& batch_dir, int cost_cap_override /* <=0: use H */,
                   long node_budget);

}  // namespace ww::harness
