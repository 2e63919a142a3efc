#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ww/core/types.h"
#include "ww/sim/simulator.h"

namespace ww::agents {

enum class AgentKind { Random, Greedy, Beam, BudgetedExhaustive, External };

const char* to_string(AgentKind k);
AgentKind agent_kind_from(const std::string& s);

struct AgentSpec {
  AgentKind kind = AgentKind::Greedy;
  std::string phase_label;
  double phase_time = 1.0;       // the t fed into the drift estimators
  long node_budget = 0;          // BudgetedExhaustive knob
  int beam_width = 0;            // Beam knob
  std::string command;           // External agent shell command
  double timeout_seconds = 30.0;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual sim::AgentDecision decide(const sim::Observation& obs) = 0;
};

// Builds a fresh agent for one episode. Built-in agents are deterministic
// given (spec, episode_seed). External agents receive the seed via the
// WW_AGENT_SEED environment variable; spawning failures throw
// AgentProtocolError.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, std::uint64_t episode_seed);

// Labeled phases t = 1..n for a monotone capability schedule. The knob is
// the node budget (BudgetedExhaustive), beam width (Beam), or ignored
// (Random/Greedy, where the schedule only sets the phase count). A
// decreasing schedule is a config error.
std::vector<AgentSpec> phase_sequence(AgentKind kind, const std::vector<long>& schedule);

// One phase per external command, t = 1..n.
std::vector<AgentSpec> external_phases(const std::vector<std::string>& commands,
                                       double timeout_seconds);

// Convenience wrapper: fresh agent, closed-loop episode.
sim::EpisodeResult run_episode(const Instance& instance, const AgentSpec& spec,
                               std::uint64_t episode_seed);

// The agent-side world model reconstructed purely from observations: the
// catalog and rules are visible, masked parameters read as zero until a Test
// reveals them. Built-in agents mirror the simulator state by replaying
// their own actions against this model.
class VisibleWorld {
 public:
  explicit VisibleWorld(const sim::Observation& first);

  // Folds newly revealed parameter values; rebuilds the mirror when a value
  // changes under earlier actions.
  void sync(const sim::Observation& obs);
  void apply(const Action& action);

  const Instance& model() const { return model_; }
  const sim::SimState& state() const { return state_; }
  bool dead() const { return state_.halted; }

  const std::set<int>& unknown_recipes() const { return unknown_recipes_; }
  const std::set<std::pair<int, int>>& unknown_synergies() const { return unknown_synergies_; }

  // Sum of constraint shortfalls of a candidate state under this model.
  double deficit(const sim::SimState& st) const;
  bool solved(const sim::SimState& st) const;
  std::string fingerprint(const sim::SimState& st) const;

 private:
  void rebuild();

  Instance model_;
  sim::SimState state_;
  std::vector<Action> log_;
  std::set<int> unknown_recipes_;
  std::set<std::pair<int, int>> unknown_synergies_;
};

}  // namespace ww::agents
