#include "ww/harness/harness.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <set>
#include <thread>

#include "ww/core/errors.h"
#include "ww/core/rng.h"
#include "ww/sim/simulator.h"

namespace fs = std::filesystem;

namespace ww::harness {

void RunConfig::validate() const {
  ladder.validate();
  if (instances_per_level < 1) throw ConfigError("instances_per_level must be >= 1");
  if (tau <= 0.0 || tau > 1.0) throw ConfigError("tau outside (0,1]");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
  if (phases.kind == agents::AgentKind::External) {
    if (phases.commands.empty()) throw ConfigError("external phases need commands");
  } else if (phases.schedule.empty()) {
    throw ConfigError("phase schedule is empty");
  }
  // Seed disjointness across the whole batch.
  std::set<std::uint64_t> seeds;
  for (int level = 1; level <= ladder.size(); ++level) {
    for (int i = 0; i < instances_per_level; ++i) {
      if (!seeds.insert(instance_seed(*this, level, i)).second) {
        throw ConfigError("instance seeds collide; adjust base_seed");
      }
    }
  }
}

std::uint64_t instance_seed(const RunConfig& config, int level, int index) {
  return config.base_seed +
         static_cast<std::uint64_t>(level - 1) *
             static_cast<std::uint64_t>(config.instances_per_level) +
         static_cast<std::uint64_t>(index);
}

std::uint64_t episode_seed(const RunConfig& config, int phase_index, int level, int index) {
  std::uint64_t x = config.agent_seed_base;
  x ^= static_cast<std::uint64_t>(phase_index + 1) << 42;
  x ^= static_cast<std::uint64_t>(level) << 21;
  x ^= static_cast<std::uint64_t>(index);
  return splitmix64(x);
}

RunConfig run_config_from_json(const OrderedJson& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kRunConfigSchemaVersion) {
      throw ConfigError("unsupported run config schema_version");
    }
    RunConfig c;
    c.ladder = ladder_from_json(j.at("ladder"));
    c.instances_per_level = j.at("instances_per_level").get<int>();
    c.base_seed = parse_seed(j.at("base_seed").get<std::string>());

    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      auto get_int = [&](const char* key, int def) {
        return g.contains(key) ? g.at(key).get<int>() : def;
      };
      c.generator.raw_items = get_int("raw_items", c.generator.raw_items);
      c.generator.intermediate_items =
          get_int("intermediate_items", c.generator.intermediate_items);
      c.generator.module_items = get_int("module_items", c.generator.module_items);
      c.generator.deceptive_branches =
          get_int("deceptive_branches", c.generator.deceptive_branches);
      c.generator.cost_min = get_int("cost_min", c.generator.cost_min);
      c.generator.cost_max = get_int("cost_max", c.generator.cost_max);
      c.generator.budget_slack = get_int("budget_slack", c.generator.budget_slack);
      c.generator.attribute_dim = get_int("attribute_dim", c.generator.attribute_dim);
      if (g.contains("synergy_density")) {
        c.generator.synergy_density = g.at("synergy_density").get<double>();
      }
    }

    const auto& p = j.at("phases");
    c.phases.kind = agents::agent_kind_from(p.at("kind").get<std::string>());
    if (p.contains("schedule")) c.phases.schedule = p.at("schedule").get<std::vector<long>>();
    if (p.contains("commands")) {
      c.phases.commands = p.at("commands").get<std::vector<std::string>>();
    }
    if (p.contains("timeout_seconds")) {
      c.phases.timeout_seconds = p.at("timeout_seconds").get<double>();
    }

    if (j.contains("tau")) c.tau = j.at("tau").get<double>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("agent_seed")) {
      c.agent_seed_base = parse_seed(j.at("agent_seed").get<std::string>());
    }
    c.validate();
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  }
}

OrderedJson run_config_to_json(const RunConfig& c) {
  OrderedJson j;
  j["schema_version"] = kRunConfigSchemaVersion;
  j["ladder"] = ladder_to_json(c.ladder);
  j["instances_per_level"] = c.instances_per_level;
  j["base_seed"] = seed_to_string(c.base_seed);
  OrderedJson g;
  g["raw_items"] = c.generator.raw_items;
  g["intermediate_items"] = c.generator.intermediate_items;
  g["module_items"] = c.generator.module_items;
  g["deceptive_branches"] = c.generator.deceptive_branches;
  g["synergy_density"] = c.generator.synergy_density;
  g["cost_min"] = c.generator.cost_min;
  g["cost_max"] = c.generator.cost_max;
  g["budget_slack"] = c.generator.budget_slack;
  g["attribute_dim"] = c.generator.attribute_dim;
  g["rng_algorithm"] = c.generator.rng_algorithm;
  j["generator"] = std::move(g);
  OrderedJson p;
  p["kind"] = agents::to_string(c.phases.kind);
  if (c.phases.kind == agents::AgentKind::External) {
    p["commands"] = c.phases.commands;
  } else {
    p["schedule"] = c.phases.schedule;
  }
  p["timeout_seconds"] = c.phases.timeout_seconds;
  j["phases"] = std::move(p);
  j["tau"] = c.tau;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir;
  j["agent_seed"] = seed_to_string(c.agent_seed_base);
  return j;
}

RunConfig load_run_config(const std::string& path) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(read_text_file(path));
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::vector<agents::AgentSpec> build_phases(const RunConfig& config) {
  if (config.phases.kind == agents::AgentKind::External) {
    return agents::external_phases(config.phases.commands, config.phases.timeout_seconds);
  }
  return agents::phase_sequence(config.phases.kind, config.phases.schedule);
}

std::string instance_file_name(int level, std::uint64_t seed) {
  return std::to_string(level) + "_" + std::to_string(seed) + ".instance.json";
}

GeneratedBatch generate_batch(const RunConfig& config) {
  GeneratedBatch batch;
  batch.by_level.resize(static_cast<std::size_t>(config.ladder.size()));
  for (int level = 1; level <= config.ladder.size(); ++level) {
    auto& bucket = batch.by_level[static_cast<std::size_t>(level - 1)];
    for (int i = 0; i < config.instances_per_level; ++i) {
      bucket.push_back(genesis::generate_instance(instance_seed(config, level, i), level,
                                                  config.ladder, config.generator));
    }
  }
  return batch;
}

GeneratedBatch load_or_generate_batch(const RunConfig& config, const std::string& dir) {
  GeneratedBatch batch;
  batch.by_level.resize(static_cast<std::size_t>(config.ladder.size()));
  bool dirty = false;
  fs::create_directories(dir);
  for (int level = 1; level <= config.ladder.size(); ++level) {
    auto& bucket = batch.by_level[static_cast<std::size_t>(level - 1)];
    for (int i = 0; i < config.instances_per_level; ++i) {
      const std::uint64_t seed = instance_seed(config, level, i);
      const fs::path file = fs::path(dir) / instance_file_name(level, seed);
      if (fs::exists(file)) {
        bucket.push_back(instance_from_json(OrderedJson::parse(read_text_file(file.string()))));
      } else {
        bucket.push_back(
            genesis::generate_instance(seed, level, config.ladder, config.generator));
        write_text_file(file.string(), dump_canonical(instance_to_json(bucket.back())));
        dirty = true;
      }
    }
  }
  const fs::path manifest = fs::path(dir) / "manifest.json";
  if (dirty || !fs::exists(manifest)) write_batch(batch, config, dir);
  return batch;
}

void write_batch(const GeneratedBatch& batch, const RunConfig& config,
                 const std::string& dir) {
  fs::create_directories(dir);
  OrderedJson manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["tool_version"] = kToolVersion;
  manifest["ladder"] = ladder_to_json(config.ladder);
  manifest["instances"] = OrderedJson::array();
  for (std::size_t l = 0; l < batch.by_level.size(); ++l) {
    for (const Instance& inst : batch.by_level[l]) {
      const std::string name = instance_file_name(inst.difficulty_level, inst.seed);
      write_text_file((fs::path(dir) / name).string(),
                      dump_canonical(instance_to_json(inst)));
      OrderedJson e;
      e["level"] = inst.difficulty_level;
      e["seed"] = seed_to_string(inst.seed);
      e["instance_id"] = inst.instance_id;
      e["file"] = name;
      e["oracle_min_cost"] = nullptr;
      e["exact_h_match"] = nullptr;
      manifest["instances"].push_back(std::move(e));
    }
  }
  write_text_file((fs::path(dir) / "manifest.json").string(), dump_canonical(manifest));
}

namespace {

struct EpisodeSlot {
  int phase_index = 0;
  int level = 0;
  int index = 0;
  sim::EpisodeResult result;
};

OrderedJson episode_line(const agents::AgentSpec& spec, const Instance& inst,
                         const EpisodeSlot& slot) {
  OrderedJson j;
  j["phase_time"] = spec.phase_time;
  j["phase_label"] = spec.phase_label;
  j["level"] = slot.level;
  j["index"] = slot.index;
  j["instance_id"] = inst.instance_id;
  j["solved"] = slot.result.solved;
  j["steps_used"] = slot.result.steps_used;
  j["budget"] = inst.budget;
  j["distinct_modules"] = slot.result.distinct_modules;
  j["failure_reason"] = slot.result.failure_reason
                            ? OrderedJson(sim::to_string(*slot.result.failure_reason))
                            : OrderedJson(nullptr);
  if (slot.result.solved) {
    j["signature"] = metrics::signature_to_json(metrics::signature_of(slot.result));
  } else {
    j["signature"] = nullptr;
  }
  return j;
}

}  // namespace

RunLog run_evaluation(const RunConfig& config) {
  config.validate();
  const std::vector<agents::AgentSpec> phases = build_phases(config);

  fs::create_directories(config.output_dir);
  const OrderedJson resolved = run_config_to_json(config);
  write_text_file((fs::path(config.output_dir) / "resolved_config.json").string(),
                  dump_canonical(resolved));

  const GeneratedBatch batch =
      load_or_generate_batch(config, (fs::path(config.output_dir) / "instances").string());

  const int levels = config.ladder.size();
  const int n = config.instances_per_level;
  const int per_phase = levels * n;
  const int total = static_cast<int>(phases.size()) * per_phase;

  std::vector<EpisodeSlot> slots(static_cast<std::size_t>(total));
  for (int p = 0; p < static_cast<int>(phases.size()); ++p) {
    for (int l = 1; l <= levels; ++l) {
      for (int i = 0; i < n; ++i) {
        EpisodeSlot& slot =
            slots[static_cast<std::size_t>(p * per_phase + (l - 1) * n + i)];
        slot.phase_index = p;
        slot.level = l;
        slot.index = i;
      }
    }
  }

  std::atomic<int> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    while (true) {
      const int task = cursor.fetch_add(1);
      if (task >= total) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      EpisodeSlot& slot = slots[static_cast<std::size_t>(task)];
      const Instance& inst =
          batch.by_level[static_cast<std::size_t>(slot.level - 1)]
              [static_cast<std::size_t>(slot.index)];
      const agents::AgentSpec& spec = phases[static_cast<std::size_t>(slot.phase_index)];
      try {
        slot.result = agents::run_episode(
            inst, spec, episode_seed(config, slot.phase_index, slot.level, slot.index));
      } catch (const AgentProtocolError&) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      } catch (const std::exception&) {
        // A crashed episode is a failed attempt; N stays in the denominator.
        slot.result = sim::EpisodeResult{};
        slot.result.failure_reason = sim::FailureReason::InvalidAction;
      }
    }
  };

  {
    std::vector<std::thread> pool;
    const int count = std::min(config.workers, total);
    pool.reserve(static_cast<std::size_t>(std::max(1, count)));
    for (int w = 0; w < std::max(1, count); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Deterministic merge in (phase, level, index) order.
  std::string episodes_out;
  std::string traces_out;
  RunLog log;
  log.resolved_config = resolved;
  for (int p = 0; p < static_cast<int>(phases.size()); ++p) {
    metrics::PhaseResult phase;
    phase.phase_time = phases[static_cast<std::size_t>(p)].phase_time;
    phase.label = phases[static_cast<std::size_t>(p)].phase_label;
    for (int l = 1; l <= levels; ++l) {
      metrics::LevelRecord record;
      record.level = l;
      for (int i = 0; i < n; ++i) {
        const EpisodeSlot& slot =
            slots[static_cast<std::size_t>(p * per_phase + (l - 1) * n + i)];
        const Instance& inst = batch.by_level[static_cast<std::size_t>(l - 1)]
                                             [static_cast<std::size_t>(i)];
        metrics::EpisodeOutcome outcome;
        outcome.solved = slot.result.solved;
        outcome.steps_used = slot.result.steps_used;
        outcome.budget = inst.budget;
        if (slot.result.solved) outcome.signature = metrics::signature_of(slot.result);
        record.episodes.push_back(std::move(outcome));

        episodes_out +=
            episode_line(phases[static_cast<std::size_t>(p)], inst, slot).dump() + "\n";
        const std::string key = "t" + std::to_string(p + 1) + "-l" + std::to_string(l) +
                                "-i" + std::to_string(i);
        int seq = 0;
        for (const auto& [action, out] : slot.result.trace) {
          OrderedJson tj;
          tj["episode"] = key;
          tj["seq"] = seq++;
          tj["action"] = action_to_json(action);
          tj["outcome"] = sim::to_string(out);
          traces_out += tj.dump() + "\n";
        }
      }
      phase.levels.push_back(std::move(record));
    }
    log.phases.push_back(std::move(phase));
  }

  log.summary = metrics::frontier_curves(log.phases, config.tau);

  write_text_file((fs::path(config.output_dir) / "episodes.jsonl").string(), episodes_out);
  write_text_file((fs::path(config.output_dir) / "traces.jsonl").string(), traces_out);
  write_text_file((fs::path(config.output_dir) / "metrics.csv").string(),
                  metrics::frontier_summary_to_csv(log.summary));
  write_text_file((fs::path(config.output_dir) / "frontier.json").string(),
                  dump_canonical(metrics::frontier_summary_to_json(log.summary)));

  OrderedJson runlog;
  runlog["schema_version"] = 1;
  runlog["tool_version"] = kToolVersion;
  runlog["config"] = resolved;
  runlog["phase_count"] = static_cast<int>(phases.size());
  runlog["episodes_file"] = "episodes.jsonl";
  runlog["traces_file"] = "traces.jsonl";
  runlog["metrics_file"] = "metrics.csv";
  runlog["frontier"] = metrics::frontier_summary_to_json(log.summary);
  write_text_file((fs::path(config.output_dir) / "runlog.json").string(),
                  dump_canonical(runlog));
  return log;
}

metrics::FrontierSummary score_run(const std::string& run_dir) {
  const RunConfig config = run_config_from_json(
      OrderedJson::parse(read_text_file((fs::path(run_dir) / "resolved_config.json").string())));
  const std::vector<agents::AgentSpec> phases = build_phases(config);

  const std::string episodes = read_text_file((fs::path(run_dir) / "episodes.jsonl").string());

  std::vector<metrics::PhaseResult> results;
  for (std::size_t p = 0; p < phases.size(); ++p) {
    metrics::PhaseResult phase;
    phase.phase_time = phases[p].phase_time;
    phase.label = phases[p].phase_label;
    for (int l = 1; l <= config.ladder.size(); ++l) {
      metrics::LevelRecord record;
      record.level = l;
      record.episodes.resize(static_cast<std::size_t>(config.instances_per_level));
      phase.levels.push_back(std::move(record));
    }
    results.push_back(std::move(phase));
  }

  std::size_t pos = 0;
  while (pos < episodes.size()) {
    const std::size_t nl = episodes.find('\n', pos);
    const std::string line =
        episodes.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? episodes.size() : nl + 1;
    if (line.empty()) continue;
    const OrderedJson j = OrderedJson::parse(line);
    const double t = j.at("phase_time").get<double>();
    int phase_index = -1;
    for (std::size_t p = 0; p < phases.size(); ++p) {
      if (phases[p].phase_time == t) phase_index = static_cast<int>(p);
    }
    if (phase_index < 0) throw ConfigError("episode references unknown phase");
    const int level = j.at("level").get<int>();
    const int index = j.at("index").get<int>();
    metrics::EpisodeOutcome outcome;
    outcome.solved = j.at("solved").get<bool>();
    outcome.steps_used = j.at("steps_used").get<int>();
    outcome.budget = j.at("budget").get<int>();
    if (!j.at("signature").is_null()) {
      outcome.signature = metrics::signature_from_json(j.at("signature"));
    }
    results[static_cast<std::size_t>(phase_index)]
        .levels[static_cast<std::size_t>(level - 1)]
        .episodes[static_cast<std::size_t>(index)] = std::move(outcome);
  }

  const metrics::FrontierSummary summary = metrics::frontier_curves(results, config.tau);
  write_text_file((fs::path(run_dir) / "metrics.csv").string(),
                  metrics::frontier_summary_to_csv(summary));
  write_text_file((fs::path(run_dir) / "frontier.json").string(),
                  dump_canonical(metrics::frontier_summary_to_json(summary)));
  return summary;
}

bool write_report(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const RunConfig config = run_config_from_json(
      OrderedJson::parse(read_text_file((dir / "resolved_config.json").string())));
  const OrderedJson frontier =
      OrderedJson::parse(read_text_file((dir / "frontier.json").string()));

  const std::size_t expected = build_phases(config).size();
  const bool complete = frontier.at("curves").size() == expected;

  fs::create_directories(dir / "report");

  // Figure-1 series: one success curve per phase plus the tau reference line.
  OrderedJson fig1;
  fig1["tau"] = frontier.at("tau");
  fig1["levels"] = OrderedJson::array();
  for (int l = 1; l <= config.ladder.size(); ++l) fig1["levels"].push_back(l);
  fig1["phases"] = OrderedJson::array();
  std::string fig1_csv = "phase_time,label,level,success_rate\n";
  for (const auto& phase : frontier.at("curves")) {
    OrderedJson pj;
    pj["phase_time"] = phase.at("phase_time");
    pj["label"] = phase.at("label");
    pj["success_rates"] = OrderedJson::array();
    for (const auto& cell : phase.at("levels")) {
      pj["success_rates"].push_back(cell.at("success_rate"));
      fig1_csv += phase.at("phase_time").dump() + "," +
                  phase.at("label").get<std::string>() + "," + cell.at("level").dump() +
                  "," + cell.at("success_rate").dump() + "\n";
    }
    fig1["phases"].push_back(std::move(pj));
  }
  write_text_file((dir / "report" / "figure1.json").string(), dump_canonical(fig1));
  write_text_file((dir / "report" / "figure1.csv").string(), fig1_csv);

  // Figure-2 series: ceiling trajectory (left axis) and mean novelty among
  // solved instances (right axis).
  OrderedJson fig2;
  fig2["phase_times"] = OrderedJson::array();
  fig2["pdc"] = frontier.at("pdc_per_phase");
  fig2["mean_novelty"] = frontier.at("novelty_series");
  for (const auto& phase : frontier.at("curves")) {
    fig2["phase_times"].push_back(phase.at("phase_time"));
  }
  fig2["cdr"] = frontier.at("cdr");
  write_text_file((dir / "report" / "figure2.json").string(), dump_canonical(fig2));

  std::string txt;
  txt += "run: " + run_dir + "\n";
  txt += "tau: " + frontier.at("tau").dump() + "\n";
  if (!complete) txt += "WARNING: partial report (missing phases)\n";
  txt += "\nphase  label                 pdc\n";
  for (const auto& phase : frontier.at("curves")) {
    std::string label = phase.at("label").get<std::string>();
    label.resize(20, ' ');
    txt += "t=" + phase.at("phase_time").dump() + "  " + label + "  " +
           phase.at("pdc").dump() + "\n";
  }
  txt += "\ncdr: " + frontier.at("cdr").dump() + "\n";
  txt += "\nefficiency (phase x level):\n";
  for (const auto& phase : frontier.at("curves")) {
    txt += "  " + phase.at("label").get<std::string>() + ":";
    for (const auto& cell : phase.at("levels")) {
      txt += " L" + cell.at("level").dump() + "=" +
             (cell.at("efficiency").is_null() ? "-" : cell.at("efficiency").dump());
    }
    txt += "\n";
  }
  txt += "\nmean novelty per phase:";
  for (const auto& nv : frontier.at("novelty_series")) {
    txt += " " + (nv.is_null() ? std::string("-") : nv.dump());
  }
  txt += "\n";
  write_text_file((dir / "report" / "summary.txt").string(), txt);
  return complete;
}

int validate_batch(const std::string& batch_dir, int cost_cap_override, long node_budget) {
  const fs::path dir(batch_dir);
  OrderedJson manifest = OrderedJson::parse(read_text_file((dir / "manifest.json").string()));
  int violations = 0;
  for (auto& entry : manifest.at("instances")) {
    const Instance inst = instance_from_json(
        OrderedJson::parse(read_text_file((dir / entry.at("file").get<std::string>()).string())));
    const int cap = cost_cap_override > 0 ? cost_cap_override : inst.difficulty.horizon;
    const genesis::ValidationReport report = genesis::validate_instance(inst, cap, node_budget);
    entry["oracle_min_cost"] = report.oracle_min_cost ? OrderedJson(*report.oracle_min_cost)
                                                      : OrderedJson("exceeded-cap");
    entry["exact_h_match"] = report.exact_h_match;
    if (!report.exact_h_match) ++violations;
  }
  write_text_file((dir / "manifest.json").string(), dump_canonical(manifest));
  return violations;
}

}  // namespace ww::harness
