#include "ww/oracle/solver.h"

#include <algorithm>
#include <cstring>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace ww::oracle {

namespace {

void append_u64(std::string& key, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  key.append(buf, 8);
}

void append_double(std::string& key, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  append_u64(key, bits);
}

void append_instance(std::string& key, const sim::ItemInstance& inst) {
  append_u64(key, static_cast<std::uint64_t>(inst.item_id));
  append_u64(key, inst.attrs.size());
  for (const double a : inst.attrs) append_double(key, a);
  append_u64(key, inst.modules.size());
  for (const int m : inst.modules) append_u64(key, static_cast<std::uint64_t>(m));
}

}  // namespace

// Order-free canonical encoding: inventory is kept sorted by the simulator,
// artefact parts likewise. Cost is deliberately not part of the key.
std::string canonical_state_key(const sim::SimState& st) {
  std::string key;
  key.reserve(64 + st.inventory.size() * 48);
  append_u64(key, st.inventory.size());
  for (const auto& inst : st.inventory) append_instance(key, inst);
  if (st.artefact) {
    key.push_back('\x01');
    append_u64(key, static_cast<std::uint64_t>(st.artefact->recipe_id));
    append_instance(key, st.artefact->instance);
    append_u64(key, st.artefact->parts.size());
    for (const auto& p : st.artefact->parts) append_instance(key, p);
  } else {
    key.push_back('\x00');
  }
  // Revealed entries never change under the searched action set.
  return key;
}

namespace {

struct FrontierEntry {
  int cost = 0;
  std::uint64_t seq = 0;
  long node_index = -1;

  bool operator>(const FrontierEntry& other) const {
    if (cost != other.cost) return cost > other.cost;
    return seq > other.seq;
  }
};

struct NodeRecord {
  long parent = -2;  // -2 marks the root
  Action action;
  sim::SimState state;  // released once expanded
  bool expanded = false;
};

}  // namespace

bool state_solved(const sim::SimState& st, const Instance& in) {
  if (st.halted) return false;
  if (st.artefact) {
    return check_constraints(st.artefact->instance.attrs,
                             sim::distinct_module_count(st.artefact->instance.modules),
                             in.constraints, in.difficulty.required_modules);
  }
  return in.constraints.empty() && in.difficulty.required_modules == 0;
}

SearchResult solve_min_steps_from(const Instance& in, const sim::SimState& start,
                                  const SearchLimits& limits) {
  SearchResult result;
  if (limits.cost_cap < 0) return result;

  // A solving plan must also execute within the instance budget.
  const int effective_cap = std::min(limits.cost_cap, in.budget - start.steps_used);
  if (effective_cap < 0) return result;

  std::vector<NodeRecord> nodes;
  nodes.push_back(NodeRecord{-2, Action{}, start, false});

  std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, std::greater<>> frontier;
  std::uint64_t seq = 0;
  frontier.push(FrontierEntry{0, seq++, 0});

  std::unordered_set<std::string> closed;

  while (!frontier.empty()) {
    const FrontierEntry entry = frontier.top();
    frontier.pop();
    const std::size_t node_idx = static_cast<std::size_t>(entry.node_index);
    if (nodes[node_idx].expanded) continue;

    // Take the state out: pushing children reallocates the node arena.
    const sim::SimState state = std::move(nodes[node_idx].state);
    nodes[node_idx].expanded = true;
    nodes[node_idx].state = sim::SimState{};

    if (limits.dedup) {
      if (!closed.insert(canonical_state_key(state)).second) continue;
    }

    result.nodes_expanded += 1;
    if (result.nodes_expanded > limits.node_budget) {
      result.status = SearchStatus::NodeBudgetExceeded;
      return result;
    }

    if (state_solved(state, in)) {
      result.status = SearchStatus::Solved;
      result.cost = entry.cost;
      Plan plan;
      for (long i = entry.node_index; nodes[static_cast<std::size_t>(i)].parent >= 0;
           i = nodes[static_cast<std::size_t>(i)].parent) {
        plan.actions.push_back(nodes[static_cast<std::size_t>(i)].action);
      }
      std::reverse(plan.actions.begin(), plan.actions.end());
      result.plan = std::move(plan);
      return result;
    }

    if (entry.cost < effective_cap) {
      for (const Action& action : sim::enumerate_actions(state, in)) {
        const int next_cost = entry.cost + action_cost(action, in.recipes);
        if (next_cost > effective_cap) continue;
        sim::SimState child = state;
        const sim::ActionOutcome outcome = sim::apply_action(child, action, in);
        if (child.halted) {
          throw std::logic_error("enumerated action halted the simulator: " +
                                 canonical_key(action) + " -> " +
                                 std::string(sim::to_string(outcome)));
        }
        nodes.push_back(NodeRecord{entry.node_index, action, std::move(child), false});
        frontier.push(FrontierEntry{next_cost, seq++, static_cast<long>(nodes.size() - 1)});
      }
    }
  }

  result.status = SearchStatus::Exhausted;
  return result;
}

SearchResult solve_min_steps(const Instance& in, const SearchLimits& limits) {
  return solve_min_steps_from(in, sim::init_state(in), limits);
}

std::vector<Plan> enumerate_solutions(const Instance& in, int cost_cap,
                                      std::size_t max_count) {
  struct Found {
    int cost;
    std::string key;
    Plan plan;
  };
  std::vector<Found> found;

  const int effective_cap = std::min(cost_cap, in.budget);
  std::vector<Action> prefix;

  auto dfs = [&](auto&& self, const sim::SimState& st, int cost) -> void {
    if (state_solved(st, in)) {
      std::string key;
      for (const auto& a : prefix) {
        key += canonical_key(a);
        key.push_back('\x1f');
      }
      found.push_back(Found{cost, std::move(key), Plan{prefix}});
    }
    if (cost >= effective_cap) return;
    for (const Action& action : sim::enumerate_actions(st, in)) {
      const int next_cost = cost + action_cost(action, in.recipes);
      if (next_cost > effective_cap) continue;
      sim::SimState child = st;
      sim::apply_action(child, action, in);
      if (child.halted) continue;
      prefix.push_back(action);
      self(self, child, next_cost);
      prefix.pop_back();
    }
  };

  dfs(dfs, sim::init_state(in), 0);

  std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.key < b.key;
  });
  std::vector<Plan> plans;
  plans.reserve(std::min(max_count, found.size()));
  for (const auto& f : found) {
    if (plans.size() >= max_count) break;
    plans.push_back(f.plan);
  }
  return plans;
}

}  // namespace ww::oracle
