#include "ww/agents/agents.h"

#include <algorithm>
#include <deque>
#include <unistd.h>
#include <stdexcept>

#include "ww/agents/line_process.h"
#include "ww/core/errors.h"
#include "ww/core/json_io.h"
#include "ww/core/rng.h"
#include "ww/oracle/solver.h"

namespace ww::agents {

const char* to_string(AgentKind k) {
  switch (k) {
    case AgentKind::Random: return "random";
    case AgentKind::Greedy: return "greedy";
    case AgentKind::Beam: return "beam";
    case AgentKind::BudgetedExhaustive: return "budgeted-exhaustive";
    case AgentKind::External: return "external";
  }
  return "greedy";
}

AgentKind agent_kind_from(const std::string& s) {
  if (s == "random") return AgentKind::Random;
  if (s == "greedy") return AgentKind::Greedy;
  if (s == "beam") return AgentKind::Beam;
  if (s == "budgeted-exhaustive") return AgentKind::BudgetedExhaustive;
  if (s == "external") return AgentKind::External;
  throw ConfigError("unknown agent kind: " + s);
}

// ---- VisibleWorld ----

VisibleWorld::VisibleWorld(const sim::Observation& first) {
  model_.instance_id = "visible";
  model_.attribute_dim = first.attribute_dim;
  model_.rng_algorithm = kRngAlgorithm;
  model_.items = first.items;
  model_.budget = first.budget_remaining;
  model_.constraints = first.constraints;
  model_.difficulty.horizon = 1;
  model_.difficulty.constraint_count = static_cast<int>(first.constraints.size());
  model_.difficulty.required_modules = first.required_modules;

  for (const auto& rv : first.recipes) {
    Recipe r;
    r.id = rv.id;
    r.kind = rv.kind;
    r.inputs = rv.inputs;
    r.output = rv.output;
    r.cost = rv.cost;
    if (rv.effect) {
      r.effect = *rv.effect;
    } else {
      r.effect = zero_attributes(model_.attribute_dim);
      unknown_recipes_.insert(rv.id);
    }
    model_.recipes.push_back(std::move(r));
  }
  for (const auto& sv : first.synergies) {
    if (sv.value) {
      model_.synergies.set(sv.a, sv.b, *sv.value);
    } else {
      model_.synergies.set(sv.a, sv.b, zero_attributes(model_.attribute_dim));
      unknown_synergies_.insert(SynergyTable::make_key(sv.a, sv.b));
    }
  }
  for (const auto& [item, count] : first.inventory_counts) {
    for (int i = 0; i < count; ++i) model_.initial_inventory.push_back(item);
  }
  std::sort(model_.initial_inventory.begin(), model_.initial_inventory.end());

  state_ = sim::init_state(model_);
}

void VisibleWorld::sync(const sim::Observation& obs) {
  bool changed = false;
  for (const auto& rv : obs.recipes) {
    if (rv.effect && unknown_recipes_.erase(rv.id) > 0) {
      model_.recipes[static_cast<std::size_t>(rv.id)].effect = *rv.effect;
      changed = true;
    }
  }
  for (const auto& sv : obs.synergies) {
    const auto key = SynergyTable::make_key(sv.a, sv.b);
    if (sv.value && unknown_synergies_.erase(key) > 0) {
      model_.synergies.set(sv.a, sv.b, *sv.value);
      changed = true;
    }
  }
  if (changed) rebuild();
}

void VisibleWorld::rebuild() {
  state_ = sim::init_state(model_);
  for (const Action& a : log_) {
    if (state_.halted) break;
    sim::apply_action(state_, a, model_);
  }
}

void VisibleWorld::apply(const Action& action) {
  log_.push_back(action);
  if (!state_.halted) sim::apply_action(state_, action, model_);
}

double VisibleWorld::deficit(const sim::SimState& st) const {
  const AttributeVector attrs = st.artefact
                                    ? st.artefact->instance.attrs
                                    : zero_attributes(model_.attribute_dim);
  double total = 0.0;
  for (const auto& c : model_.constraints) {
    const double v = attrs[static_cast<std::size_t>(c.attribute_index)];
    if (c.comparator == Comparator::GreaterEq) {
      total += std::max(0.0, c.threshold - v);
    } else {
      total += std::max(0.0, v - c.threshold);
    }
  }
  return total;
}

bool VisibleWorld::solved(const sim::SimState& st) const {
  return oracle::state_solved(st, model_);
}

std::string VisibleWorld::fingerprint(const sim::SimState& st) const {
  std::string key = oracle::canonical_state_key(st);
  key.push_back('|');
  for (const auto& [a, b] : st.revealed.synergy_pairs) {
    key += std::to_string(a) + "," + std::to_string(b) + ";";
  }
  key.push_back('|');
  for (const int id : st.revealed.recipe_effects) key += std::to_string(id) + ";";
  // Model knowledge matters too: a revealed value changes future estimates.
  key.push_back('|');
  key += std::to_string(unknown_recipes_.size()) + "," +
         std::to_string(unknown_synergies_.size());
  return key;
}

namespace {

std::vector<Action> legal_test_actions(const VisibleWorld& world) {
  std::vector<Action> tests;
  for (const auto& key : world.unknown_synergies()) {
    tests.push_back(Action::test_synergy(key.first, key.second));
  }
  for (const int id : world.unknown_recipes()) {
    tests.push_back(Action::test_recipe(id));
  }
  return tests;
}

Action invalid_sentinel() {
  return Action::craft(-1);  // structurally invalid; halts the attempt
}

// ---- Random ----

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}

  sim::AgentDecision decide(const sim::Observation& obs) override {
    if (!world_) {
      world_.emplace(obs);
    } else {
      world_->sync(obs);
    }
    if (world_->dead()) return sim::AgentDecision::make_submit();

    std::vector<Action> candidates = sim::enumerate_actions(world_->state(), world_->model());
    // Every module pair and recipe is probe-able, not just unknown ones.
    std::vector<int> modules = world_->model().module_item_ids();
    for (std::size_t i = 0; i < modules.size(); ++i) {
      for (std::size_t j = i + 1; j < modules.size(); ++j) {
        candidates.push_back(Action::test_synergy(modules[i], modules[j]));
      }
    }
    for (const auto& r : world_->model().recipes) candidates.push_back(Action::test_recipe(r.id));

    const std::uint64_t pick = rng_.below(candidates.size() + 1);
    if (pick == candidates.size()) return sim::AgentDecision::make_submit();
    const Action action = candidates[static_cast<std::size_t>(pick)];
    world_->apply(action);
    return sim::AgentDecision::act(action);
  }

 private:
  Rng rng_;
  std::optional<VisibleWorld> world_;
};

// ---- Greedy ----

class GreedyAgent final : public Agent {
 public:
  sim::AgentDecision decide(const sim::Observation& obs) override {
    if (!world_) {
      world_.emplace(obs);
      visited_.insert(world_->fingerprint(world_->state()));
    } else {
      world_->sync(obs);
    }
    if (world_->dead()) return sim::AgentDecision::make_submit();
    if (world_->solved(world_->state())) return sim::AgentDecision::make_submit();

    std::vector<Action> candidates =
        sim::enumerate_actions(world_->state(), world_->model());
    for (Action& t : legal_test_actions(*world_)) candidates.push_back(std::move(t));
    std::sort(candidates.begin(), candidates.end(), [](const Action& a, const Action& b) {
      return canonical_key(a) < canonical_key(b);
    });

    const double current = world_->deficit(world_->state());
    bool have_best = false;
    double best_delta = 0.0;
    Action best;
    std::string best_fp;
    for (const Action& a : candidates) {
      sim::SimState next = world_->state();
      sim::apply_action(next, a, world_->model());
      if (next.halted) continue;
      const std::string fp = world_->fingerprint(next);
      if (visited_.count(fp) > 0) continue;
      const double delta = current - world_->deficit(next);
      if (!have_best || delta > best_delta) {
        have_best = true;
        best_delta = delta;
        best = a;
        best_fp = fp;
      }
    }
    if (!have_best) return sim::AgentDecision::make_submit();

    visited_.insert(best_fp);
    world_->apply(best);
    return sim::AgentDecision::act(best);
  }

 private:
  std::optional<VisibleWorld> world_;
  std::set<std::string> visited_;
};

// ---- Beam ----

class BeamAgent final : public Agent {
 public:
  explicit BeamAgent(int width) : width_(std::max(1, width)) {}

  sim::AgentDecision decide(const sim::Observation& obs) override {
    if (!world_) {
      world_.emplace(obs);
      visited_.insert(world_->fingerprint(world_->state()));
    } else {
      world_->sync(obs);
    }
    if (world_->dead()) return sim::AgentDecision::make_submit();
    if (world_->solved(world_->state())) return sim::AgentDecision::make_submit();

    struct Node {
      sim::SimState state;
      Action first;
      int cost = 0;
      double deficit = 0.0;
      std::string path_key;
    };
    const int remaining = obs.budget_remaining;

    auto node_less = [](const Node& a, const Node& b) {
      if (a.deficit != b.deficit) return a.deficit < b.deficit;
      if (a.cost != b.cost) return a.cost < b.cost;
      return a.path_key < b.path_key;
    };

    std::vector<Node> layer;
    for (const Action& a : sim::enumerate_actions(world_->state(), world_->model())) {
      const int c = action_cost(a, world_->model().recipes);
      if (c > remaining) continue;
      sim::SimState next = world_->state();
      sim::apply_action(next, a, world_->model());
      if (next.halted) continue;
      layer.push_back(Node{std::move(next), a, c, 0.0, canonical_key(a)});
      layer.back().deficit = world_->deficit(layer.back().state);
    }

    std::optional<Node> best_solving;
    std::optional<Node> best_leaf;
    auto offer = [&](const Node& n) {
      if (world_->solved(n.state)) {
        if (!best_solving || n.cost < best_solving->cost ||
            (n.cost == best_solving->cost && n.path_key < best_solving->path_key)) {
          best_solving = n;
        }
      }
      if (!best_leaf || node_less(n, *best_leaf)) best_leaf = n;
    };

    while (!layer.empty()) {
      std::sort(layer.begin(), layer.end(), node_less);
      if (static_cast<int>(layer.size()) > width_) layer.resize(static_cast<std::size_t>(width_));
      for (const Node& n : layer) offer(n);
      if (best_solving) break;

      std::vector<Node> next_layer;
      for (const Node& n : layer) {
        for (const Action& a : sim::enumerate_actions(n.state, world_->model())) {
          const int c = n.cost + action_cost(a, world_->model().recipes);
          if (c > remaining) continue;
          sim::SimState next = n.state;
          sim::apply_action(next, a, world_->model());
          if (next.halted) continue;
          Node child{std::move(next), n.first, c, 0.0, n.path_key + "/" + canonical_key(a)};
          child.deficit = world_->deficit(child.state);
          next_layer.push_back(std::move(child));
        }
      }
      layer = std::move(next_layer);
    }

    // Rank candidate first moves; skip any that revisits a known state.
    std::vector<Node> ranked;
    if (best_solving) ranked.push_back(*best_solving);
    if (best_leaf) ranked.push_back(*best_leaf);
    for (const Node& n : ranked) {
      sim::SimState next = world_->state();
      sim::apply_action(next, n.first, world_->model());
      if (next.halted) continue;
      const std::string fp = world_->fingerprint(next);
      if (visited_.count(fp) > 0) continue;
      visited_.insert(fp);
      world_->apply(n.first);
      return sim::AgentDecision::act(n.first);
    }
    return sim::AgentDecision::make_submit();
  }

 private:
  int width_;
  std::optional<VisibleWorld> world_;
  std::set<std::string> visited_;
};

// ---- BudgetedExhaustive ----

class BudgetedExhaustiveAgent final : public Agent {
 public:
  explicit BudgetedExhaustiveAgent(long node_budget) : node_budget_(node_budget) {}

  sim::AgentDecision decide(const sim::Observation& obs) override {
    if (!world_) {
      world_.emplace(obs);
    } else {
      world_->sync(obs);
    }
    if (world_->dead()) return sim::AgentDecision::make_submit();

    if (!pending_.empty()) {
      const Action a = pending_.front();
      pending_.pop_front();
      world_->apply(a);
      return sim::AgentDecision::act(a);
    }

    if (world_->solved(world_->state())) return sim::AgentDecision::make_submit();

    oracle::SearchLimits limits;
    limits.cost_cap = obs.budget_remaining;
    limits.node_budget = node_budget_;
    const oracle::SearchResult res =
        oracle::solve_min_steps_from(world_->model(), world_->state(), limits);

    if (res.status == oracle::SearchStatus::Solved) {
      const std::vector<Action> tests = needed_tests(*res.plan);
      if (tests.empty()) {
        for (const Action& a : res.plan->actions) pending_.push_back(a);
      } else {
        for (const Action& a : tests) pending_.push_back(a);
      }
      if (pending_.empty()) return sim::AgentDecision::make_submit();
      const Action a = pending_.front();
      pending_.pop_front();
      world_->apply(a);
      return sim::AgentDecision::act(a);
    }

    if (res.status == oracle::SearchStatus::Exhausted) {
      // Complete search found nothing on the visible model; reveal the
      // lexicographically first hidden parameter and re-plan. Never probe on
      // a node-budget cutoff: a larger budget must dominate a smaller one.
      std::vector<Action> probes = legal_test_actions(*world_);
      std::sort(probes.begin(), probes.end(), [](const Action& a, const Action& b) {
        return canonical_key(a) < canonical_key(b);
      });
      if (!probes.empty() && obs.budget_remaining >= 1) {
        const Action a = probes.front();
        world_->apply(a);
        return sim::AgentDecision::act(a);
      }
    }
    return sim::AgentDecision::make_submit();
  }

 private:
  // Hidden parameters the candidate plan relies on: effects of recipes it
  // executes and synergy pairs activated by any Combine/Repair along the way.
  std::vector<Action> needed_tests(const Plan& plan) {
    std::set<int> recipes;
    std::set<std::pair<int, int>> pairs;
    sim::SimState st = world_->state();
    for (const Action& a : plan.actions) {
      if (a.kind == Action::Kind::Craft || a.kind == Action::Kind::Refine ||
          a.kind == Action::Kind::Combine) {
        if (world_->unknown_recipes().count(a.recipe_id) > 0) recipes.insert(a.recipe_id);
      }
      sim::apply_action(st, a, world_->model());
      if (st.halted) break;
      if (st.artefact) {
        std::vector<int> mods;
        for (const auto& p : st.artefact->parts) {
          mods.insert(mods.end(), p.modules.begin(), p.modules.end());
        }
        std::sort(mods.begin(), mods.end());
        mods.erase(std::unique(mods.begin(), mods.end()), mods.end());
        for (std::size_t i = 0; i < mods.size(); ++i) {
          for (std::size_t j = i + 1; j < mods.size(); ++j) {
            const auto key = SynergyTable::make_key(mods[i], mods[j]);
            if (world_->unknown_synergies().count(key) > 0) pairs.insert(key);
          }
        }
      }
    }
    std::vector<Action> tests;
    for (const auto& [a, b] : pairs) tests.push_back(Action::test_synergy(a, b));
    for (const int id : recipes) tests.push_back(Action::test_recipe(id));
    std::sort(tests.begin(), tests.end(), [](const Action& x, const Action& y) {
      return canonical_key(x) < canonical_key(y);
    });
    return tests;
  }

  long node_budget_;
  std::optional<VisibleWorld> world_;
  std::deque<Action> pending_;
};

// ---- External ----

class ExternalAgent final : public Agent {
 public:
  ExternalAgent(const std::string& command, double timeout_seconds, std::uint64_t seed)
      : command_(command),
        timeout_(timeout_seconds),
        process_(command, {{"WW_AGENT_SEED", std::to_string(seed)}}) {}

  sim::AgentDecision decide(const sim::Observation& obs) override {
    const std::string line = sim::observation_to_json(obs).dump();
    if (!process_.write_line(line)) {
      check_startup_failure();
      return sim::AgentDecision::act(invalid_sentinel());
    }
    const std::optional<std::string> reply = process_.read_line(timeout_);
    if (!reply) {
      check_startup_failure();
      return sim::AgentDecision::act(invalid_sentinel());
    }
    got_reply_ = true;
    try {
      const OrderedJson j = OrderedJson::parse(*reply);
      const std::string type = j.at("type").get<std::string>();
      if (type == "submit") return sim::AgentDecision::make_submit();
      if (type == "action") return sim::AgentDecision::act(action_from_json(j.at("action")));
    } catch (const std::exception&) {
      // malformed reply: fall through to the invalid sentinel
    }
    return sim::AgentDecision::act(invalid_sentinel());
  }

 private:
  // A child that dies before its first reply with the shell's command-not-
  // found/not-executable statuses never started; that is a configuration
  // problem, not an episode outcome.
  void check_startup_failure() {
    if (got_reply_) return;
    for (int attempt = 0; attempt < 10; ++attempt) {
      if (const std::optional<int> status = process_.poll_exit_status()) {
        if (*status == 127 || *status == 126) {
          throw AgentProtocolError("agent command failed to start (exit " +
                                   std::to_string(*status) + "): " + command_);
        }
        return;
      }
      usleep(20'000);
    }
  }

  std::string command_;
  double timeout_;
  LineProcess process_;
  bool got_reply_ = false;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, std::uint64_t episode_seed) {
  switch (spec.kind) {
    case AgentKind::Random:
      return std::make_unique<RandomAgent>(episode_seed);
    case AgentKind::Greedy:
      return std::make_unique<GreedyAgent>();
    case AgentKind::Beam:
      return std::make_unique<BeamAgent>(spec.beam_width);
    case AgentKind::BudgetedExhaustive:
      return std::make_unique<BudgetedExhaustiveAgent>(spec.node_budget);
    case AgentKind::External:
      return std::make_unique<ExternalAgent>(spec.command, spec.timeout_seconds, episode_seed);
  }
  throw ConfigError("unknown agent kind");
}

std::vector<AgentSpec> phase_sequence(AgentKind kind, const std::vector<long>& schedule) {
  if (schedule.empty()) throw ConfigError("phase schedule is empty");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] < schedule[i - 1]) {
      throw ConfigError("phase schedule must be non-decreasing in the capability knob");
    }
  }
  std::vector<AgentSpec> phases;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    AgentSpec spec;
    spec.kind = kind;
    spec.phase_time = static_cast<double>(i + 1);
    switch (kind) {
      case AgentKind::BudgetedExhaustive:
        if (schedule[i] < 1) throw ConfigError("node budget must be >= 1");
        spec.node_budget = schedule[i];
        spec.phase_label = "be-" + std::to_string(schedule[i]);
        break;
      case AgentKind::Beam:
        if (schedule[i] < 1) throw ConfigError("beam width must be >= 1");
        spec.beam_width = static_cast<int>(schedule[i]);
        spec.phase_label = "beam-" + std::to_string(schedule[i]);
        break;
      case AgentKind::Random:
      case AgentKind::Greedy:
        spec.phase_label = std::string(to_string(kind)) + "-t" + std::to_string(i + 1);
        break;
      case AgentKind::External:
        throw ConfigError("external phases take commands, not a numeric schedule");
    }
    phases.push_back(std::move(spec));
  }
  return phases;
}

std::vector<AgentSpec> external_phases(const std::vector<std::string>& commands,
                                       double timeout_seconds) {
  if (commands.empty()) throw ConfigError("no external commands given");
  std::vector<AgentSpec> phases;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    AgentSpec spec;
    spec.kind = AgentKind::External;
    spec.phase_time = static_cast<double>(i + 1);
    spec.command = commands[i];
    spec.timeout_seconds = timeout_seconds;
    spec.phase_label = "external-t" + std::to_string(i + 1);
    phases.push_back(std::move(spec));
  }
  return phases;
}

sim::EpisodeResult run_episode(const Instance& instance, const AgentSpec& spec,
                               std::uint64_t episode_seed) {
  const std::unique_ptr<Agent> agent = make_agent(spec, episode_seed);
  return sim::run_interactive(
      instance, [&](const sim::Observation& obs) { return agent->decide(obs); });
}

}  // namespace ww::agents
