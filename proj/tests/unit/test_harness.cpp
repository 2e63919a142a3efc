#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <set>

#include "ww/core/errors.h"
#include "ww/core/json_io.h"
#include "ww/harness/harness.h"

using namespace ww;
namespace fs = std::filesystem;

namespace {

harness::RunConfig tiny_config(const std::string& out) {
  harness::RunConfig c;
  c.ladder.levels = {{2, 1, 1, 0.0}, {3, 1, 1, 0.5}};
  c.instances_per_level = 3;
  c.base_seed = 4000;
  c.phases.kind = agents::AgentKind::BudgetedExhaustive;
  c.phases.schedule = {60, 600};
  c.tau = 0.7;
  c.workers = 2;
  c.output_dir = out;
  c.agent_seed_base = 9;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ww-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("WW_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "WW_CLI must point at the ww binary");
  const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("instance seeds are pairwise distinct and documented") {
  const harness::RunConfig c = tiny_config("unused");
  std::set<std::uint64_t> seeds;
  for (int level = 1; level <= c.ladder.size(); ++level) {
    for (int i = 0; i < c.instances_per_level; ++i) {
      const std::uint64_t s = harness::instance_seed(c, level, i);
      CHECK(seeds.insert(s).second);
      CHECK(s == c.base_seed + static_cast<std::uint64_t>((level - 1) * 3 + i));
    }
  }
}

TEST_CASE("run config JSON round trip") {
  const harness::RunConfig c = tiny_config("round-trip");
  const OrderedJson j = harness::run_config_to_json(c);
  const harness::RunConfig back = harness::run_config_from_json(j);
  CHECK(dump_canonical(harness::run_config_to_json(back)) == dump_canonical(j));
  CHECK(back.base_seed == c.base_seed);
  CHECK(back.phases.schedule == c.phases.schedule);
}

TEST_CASE("run_evaluation: protocol fidelity and determinism") {
  const fs::path dir_a = fresh_dir("run-a");
  const fs::path dir_b = fresh_dir("run-b");
  harness::RunConfig a = tiny_config(dir_a.string());
  harness::RunConfig b = tiny_config(dir_b.string());
  b.workers = 1;  // parallelism must not change a single output byte

  const harness::RunLog log_a = harness::run_evaluation(a);
  const harness::RunLog log_b = harness::run_evaluation(b);

  // Exactly one episode per (phase, level, index); same instances per phase.
  CHECK(log_a.phases.size() == 2);
  for (const auto& phase : log_a.phases) {
    CHECK(phase.levels.size() == 2);
    for (const auto& level : phase.levels) CHECK(level.n() == 3);
  }

  // resolved_config.json legitimately differs (it records the worker count);
  // everything the protocol produces must not.
  for (const char* file : {"metrics.csv", "frontier.json", "episodes.jsonl",
                           "traces.jsonl"}) {
    const std::string fa = read_text_file((dir_a / file).string());
    const std::string fb = read_text_file((dir_b / file).string());
    CHECK_MESSAGE(fa == fb, file);
  }
  for (const auto& entry : fs::directory_iterator(dir_a / "instances")) {
    const std::string name = entry.path().filename().string();
    CHECK(read_text_file(entry.path().string()) ==
          read_text_file((dir_b / "instances" / name).string()));
  }

  // Episode lines reference identical instance ids across phases.
  const std::string episodes = read_text_file((dir_a / "episodes.jsonl").string());
  std::set<std::string> ids_phase1;
  std::set<std::string> ids_phase2;
  std::size_t pos = 0;
  while (pos < episodes.size()) {
    const std::size_t nl = episodes.find('\n', pos);
    const OrderedJson j = OrderedJson::parse(episodes.substr(pos, nl - pos));
    (j.at("phase_time").get<double>() == 1.0 ? ids_phase1 : ids_phase2)
        .insert(j.at("instance_id").get<std::string>());
    pos = nl + 1;
  }
  CHECK(ids_phase1 == ids_phase2);
  CHECK(ids_phase1.size() == 6);
}

TEST_CASE("score_run reproduces the run's metrics byte for byte") {
  const fs::path dir = fresh_dir("score");
  const harness::RunConfig c = tiny_config(dir.string());
  harness::run_evaluation(c);
  const std::string before = read_text_file((dir / "metrics.csv").string());
  const std::string frontier_before = read_text_file((dir / "frontier.json").string());
  harness::score_run(dir.string());
  CHECK(read_text_file((dir / "metrics.csv").string()) == before);
  CHECK(read_text_file((dir / "frontier.json").string()) == frontier_before);
}

TEST_CASE("report bundle is emitted with the configured tau") {
  const fs::path dir = fresh_dir("report");
  const harness::RunConfig c = tiny_config(dir.string());
  harness::run_evaluation(c);
  CHECK(harness::write_report(dir.string()));
  const OrderedJson fig1 =
      OrderedJson::parse(read_text_file((dir / "report" / "figure1.json").string()));
  CHECK(fig1.at("tau").get<double>() == 0.7);
  CHECK(fig1.at("phases").size() == 2);
  const OrderedJson fig2 =
      OrderedJson::parse(read_text_file((dir / "report" / "figure2.json").string()));
  CHECK(fig2.at("pdc").size() == 2);
  CHECK(fig2.at("mean_novelty").size() == 2);
  CHECK(fs::exists(dir / "report" / "summary.txt"));
  CHECK(fs::exists(dir / "report" / "figure1.csv"));
}

TEST_CASE("crashed external episodes count as unsolved attempts") {
  const fs::path dir = fresh_dir("crash");
  harness::RunConfig c = tiny_config(dir.string());
  c.ladder.levels = {{2, 1, 1, 0.0}};
  c.phases.kind = agents::AgentKind::External;
  c.phases.schedule.clear();
  c.phases.commands = {"false"};  // exits immediately: every reply is missing
  c.phases.timeout_seconds = 2.0;
  const harness::RunLog log = harness::run_evaluation(c);
  REQUIRE(log.phases.size() == 1);
  CHECK(log.phases[0].levels[0].n() == 3);
  CHECK(log.phases[0].levels[0].successes() == 0);
  CHECK(metrics::success_rate(log.phases[0].levels[0]) == 0.0);
}

TEST_CASE("generate + validate batch round trip") {
  const fs::path dir = fresh_dir("batch");
  harness::RunConfig c = tiny_config(dir.string());
  const harness::GeneratedBatch batch = harness::generate_batch(c);
  harness::write_batch(batch, c, (dir / "instances").string());
  CHECK(fs::exists(dir / "instances" / "manifest.json"));
  CHECK(fs::exists(dir / "instances" / harness::instance_file_name(1, 4000)));

  const int violations = harness::validate_batch((dir / "instances").string(), 0, 2'000'000);
  CHECK(violations == 0);
  const OrderedJson manifest =
      OrderedJson::parse(read_text_file((dir / "instances" / "manifest.json").string()));
  for (const auto& e : manifest.at("instances")) {
    CHECK(e.at("exact_h_match").get<bool>());
    CHECK(e.at("oracle_min_cost").is_number_integer());
  }
}

TEST_CASE("cli: exit codes for config, generation, and agent failures") {
  const fs::path dir = fresh_dir("cli");

  // Config error: malformed JSON.
  write_text_file((dir / "bad.json").string(), "{not json");
  CHECK(run_cli("run --config " + (dir / "bad.json").string()) == 2);

  // Config error: empty schedule.
  OrderedJson cfg = harness::run_config_to_json(tiny_config((dir / "out1").string()));
  cfg["phases"]["schedule"] = OrderedJson::array();
  write_text_file((dir / "empty_schedule.json").string(), dump_canonical(cfg));
  CHECK(run_cli("run --config " + (dir / "empty_schedule.json").string()) == 2);

  // Generation error: module catalog too small for C.
  OrderedJson gen_bad = harness::run_config_to_json(tiny_config((dir / "out2").string()));
  gen_bad["ladder"]["levels"][1]["modules"] = 40;
  gen_bad["ladder"]["levels"][1]["horizon"] = 60;
  write_text_file((dir / "gen_bad.json").string(), dump_canonical(gen_bad));
  CHECK(run_cli("generate --config " + (dir / "gen_bad.json").string()) == 3);

  // Agent-protocol error: unstartable external command.
  harness::RunConfig ext = tiny_config((dir / "out3").string());
  ext.ladder.levels = {{2, 1, 1, 0.0}};
  ext.instances_per_level = 1;
  ext.phases.kind = agents::AgentKind::External;
  ext.phases.schedule.clear();
  ext.phases.commands = {"/definitely-not-a-real-binary-xyz"};
  write_text_file((dir / "ext.json").string(),
                  dump_canonical(harness::run_config_to_json(ext)));
  CHECK(run_cli("run --config " + (dir / "ext.json").string()) == 4);

  // Success path end to end.
  harness::RunConfig ok = tiny_config((dir / "out4").string());
  ok.instances_per_level = 2;
  write_text_file((dir / "ok.json").string(), dump_canonical(harness::run_config_to_json(ok)));
  CHECK(run_cli("run --config " + (dir / "ok.json").string()) == 0);
  CHECK(run_cli("score " + (dir / "out4").string()) == 0);
  CHECK(run_cli("report " + (dir / "out4").string()) == 0);
  CHECK(run_cli("validate " + (dir / "out4" / "instances").string()) == 0);
}
