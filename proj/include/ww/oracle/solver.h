#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ww/core/types.h"
#include "ww/sim/simulator.h"

namespace ww::oracle {

enum class SearchStatus {
  Solved,              // minimum-cost solving plan found within the cap
  Exhausted,           // every state of cost <= cap explored, no solution
  NodeBudgetExceeded,  // gave up; says nothing about solvability
};

struct SearchLimits {
  int cost_cap = 0;
  long node_budget = 10'000'000;
  bool dedup = true;  // canonical-state deduplication; disable only for tests
};

struct SearchResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::optional<Plan> plan;
  std::optional<int> cost;
  long nodes_expanded = 0;
};

// Uniform-cost search over canonical states expanding Craft/Refine/Combine/
// Repair actions. Test actions are excluded: the solver operates on ground
// truth (whatever the given instance's parameters say). The first solving
// state popped is optimal; ties expand in FIFO push order, so the expansion
// order is identical for any node budget.
SearchResult solve_min_steps(const Instance& instance, const SearchLimits& limits);

// Same search starting from an arbitrary state; cost_cap bounds the
// additional cost on top of start.steps_used.
SearchResult solve_min_steps_from(const Instance& instance, const sim::SimState& start,
                                  const SearchLimits& limits);

// Independent exhaustive depth-first enumeration of every action sequence of
// cost <= cost_cap whose final state solves the instance. No deduplication,
// no priority queue: this is the cross-check route for solve_min_steps.
// Results are ordered by (cost, lexicographic action key) and truncated to
// max_count.
std::vector<Plan> enumerate_solutions(const Instance& instance, int cost_cap,
                                      std::size_t max_count);

// True iff the state's artefact satisfies all constraints (vacuous
// constraints solve with no artefact).
bool state_solved(const sim::SimState& state, const Instance& instance);

// Order-free byte encoding of (inventory, artefact); equal states encode
// equal. Revealed entries are not included.
std::string canonical_state_key(const sim::SimState& state);

}  // namespace ww::oracle
