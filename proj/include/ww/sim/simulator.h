#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ww/core/json_io.h"
#include "ww/core/types.h"

namespace ww::sim {

// One concrete item in play. `modules` is the sorted multiset of Module item
// ids in its composition (itself included when the item is a Module).
struct ItemInstance {
  int item_id = 0;
  AttributeVector attrs;
  std::vector<int> modules;

  auto operator<=>(const ItemInstance&) const = default;
};

// The work-in-progress artefact: output of the most recent Combine, kept with
// its direct parts so Repair can swap one module and recompute attributes.
struct Artefact {
  ItemInstance instance;
  int recipe_id = -1;
  std::vector<ItemInstance> parts;  // sorted
};

enum class FailureReason { BudgetExhausted, InvalidAction, ConstraintsUnsatisfied };
enum class ActionOutcome { Applied, Revealed, HaltedBudget, HaltedInvalid };

const char* to_string(FailureReason r);
const char* to_string(ActionOutcome o);

struct SimState {
  std::vector<ItemInstance> inventory;  // kept sorted
  std::optional<Artefact> artefact;
  int steps_used = 0;
  AmbiguityMask revealed;  // subset of the instance mask revealed so far
  bool halted = false;
  std::optional<FailureReason> halt_reason;
};

struct EpisodeResult {
  bool solved = false;
  int steps_used = 0;
  std::optional<AttributeVector> final_attributes;
  std::vector<int> final_modules;  // artefact module multiset, sorted
  int distinct_modules = 0;
  std::vector<std::pair<Action, ActionOutcome>> trace;
  std::optional<FailureReason> failure_reason;
};

// What an agent is allowed to see. Computed attribute vectors of instances
// are never included; masked-and-unrevealed parameters appear as absent.
struct Observation {
  int attribute_dim = 0;
  int budget_remaining = 0;
  int required_modules = 0;
  std::vector<Constraint> constraints;
  std::vector<ItemSpec> items;

  struct RecipeView {
    int id = 0;
    RecipeKind kind = RecipeKind::Craft;
    std::vector<int> inputs;
    int output = 0;
    int cost = 1;
    std::optional<AttributeVector> effect;  // absent while masked and unrevealed
  };
  std::vector<RecipeView> recipes;

  struct SynergyView {
    int a = 0;
    int b = 0;
    std::optional<AttributeVector> value;
  };
  std::vector<SynergyView> synergies;

  std::vector<std::pair<int, int>> inventory_counts;  // (item id, count), sorted

  struct ArtefactView {
    int item_id = 0;
    std::vector<int> part_item_ids;
    std::vector<int> modules;
  };
  std::optional<ArtefactView> artefact;

  AmbiguityMask revealed_entries;
};

struct AgentDecision {
  bool submit = false;
  Action action;

  static AgentDecision make_submit();
  static AgentDecision act(Action a);
};

using AgentFn = std::function<AgentDecision(const Observation&)>;

SimState init_state(const Instance& instance);

// Applies one action in place. Invalid actions and budget overruns halt the
// state; a halting action is recorded but not applied.
ActionOutcome apply_action(SimState& state, const Action& action, const Instance& instance);

EpisodeResult run_plan(const Instance& instance, const Plan& plan);

Observation make_observation(const SimState& state, const Instance& instance);

// Closed loop: observe, ask the agent for one action, apply; stops on submit
// or halt. The recorded trace replayed open-loop yields an identical result.
EpisodeResult run_interactive(const Instance& instance, const AgentFn& agent);

// Recipe output instance: base + effect for Craft/Refine, full aggregation
// for Combine. Composition is the union of part compositions plus the output
// itself when it is a Module.
ItemInstance make_output(const Recipe& recipe, const std::vector<ItemInstance>& parts,
                         const Instance& instance);

// All legal Craft/Refine/Combine/Repair actions from a state, sorted by
// canonical key, with one entry per distinct input-instance selection.
// Test actions are excluded (they never change the world state).
std::vector<Action> enumerate_actions(const SimState& state, const Instance& instance);

int distinct_module_count(const std::vector<int>& modules);

OrderedJson episode_result_to_json(const EpisodeResult& r);
OrderedJson observation_to_json(const Observation& o);

}  // namespace ww::sim
