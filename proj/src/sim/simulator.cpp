#include "ww/sim/simulator.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ww::sim {

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::BudgetExhausted: return "budget-exhausted";
    case FailureReason::InvalidAction: return "invalid-action";
    case FailureReason::ConstraintsUnsatisfied: return "constraints-unsatisfied";
  }
  return "invalid-action";
}

const char* to_string(ActionOutcome o) {
  switch (o) {
    case ActionOutcome::Applied: return "ok";
    case ActionOutcome::Revealed: return "revealed";
    case ActionOutcome::HaltedBudget: return "halted-budget";
    case ActionOutcome::HaltedInvalid: return "halted-invalid";
  }
  return "ok";
}

AgentDecision AgentDecision::make_submit() {
  AgentDecision d;
  d.submit = true;
  return d;
}

AgentDecision AgentDecision::act(Action a) {
  AgentDecision d;
  d.action = std::move(a);
  return d;
}

int distinct_module_count(const std::vector<int>& modules) {
  std::vector<int> distinct = modules;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  return static_cast<int>(distinct.size());
}

SimState init_state(const Instance& instance) {
  SimState st;
  for (const int id : instance.initial_inventory) {
    const ItemSpec* spec = instance.find_item(id);
    if (spec == nullptr) throw std::invalid_argument("initial inventory references unknown item");
    ItemInstance inst;
    inst.item_id = id;
    inst.attrs = spec->base_attributes;
    if (spec->kind == ItemKind::Module) inst.modules = {id};
    st.inventory.push_back(std::move(inst));
  }
  std::sort(st.inventory.begin(), st.inventory.end());
  return st;
}

ItemInstance make_output(const Recipe& recipe, const std::vector<ItemInstance>& parts,
                         const Instance& instance) {
  const ItemSpec* out_spec = instance.find_item(recipe.output);
  if (out_spec == nullptr) throw std::invalid_argument("recipe output item missing");

  ItemInstance out;
  out.item_id = recipe.output;
  for (const auto& p : parts) {
    out.modules.insert(out.modules.end(), p.modules.begin(), p.modules.end());
  }
  std::vector<int> part_modules = out.modules;
  if (out_spec->kind == ItemKind::Module) out.modules.push_back(out.item_id);
  std::sort(out.modules.begin(), out.modules.end());

  AttributeVector base = out_spec->base_attributes;
  add_in_place(base, recipe.effect);
  if (recipe.kind == RecipeKind::Combine) {
    std::vector<AttributeVector> part_attrs;
    part_attrs.reserve(parts.size());
    for (const auto& p : parts) part_attrs.push_back(p.attrs);
    out.attrs = aggregate_attributes(part_modules, part_attrs, base, instance.synergies);
  } else {
    out.attrs = std::move(base);
  }
  return out;
}

namespace {

struct PoolEntry {
  ItemInstance inst;
  bool is_artefact = false;
  bool consumed = false;
};

// Consumable pool: sorted inventory first, the artefact instance last.
std::vector<PoolEntry> build_pool(const SimState& st) {
  std::vector<PoolEntry> pool;
  pool.reserve(st.inventory.size() + 1);
  for (const auto& inst : st.inventory) pool.push_back({inst, false, false});
  if (st.artefact) pool.push_back({st.artefact->instance, true, false});
  return pool;
}

// Consumes the slot-th remaining pool entry matching each input id, in sorted
// input order. Returns the consumed instances or nothing when a slot misses.
std::optional<std::vector<ItemInstance>> resolve_inputs(std::vector<PoolEntry>& pool,
                                                        const std::vector<int>& inputs,
                                                        const std::vector<int>& slots) {
  std::vector<ItemInstance> consumed;
  consumed.reserve(inputs.size());
  for (std::size_t pos = 0; pos < inputs.size(); ++pos) {
    const int want = inputs[pos];
    const int slot = pos < slots.size() ? slots[pos] : 0;
    if (slot < 0) return std::nullopt;
    int seen = 0;
    bool found = false;
    for (auto& entry : pool) {
      if (entry.consumed || entry.inst.item_id != want) continue;
      if (seen == slot) {
        entry.consumed = true;
        consumed.push_back(entry.inst);
        found = true;
        break;
      }
      ++seen;
    }
    if (!found) return std::nullopt;
  }
  return consumed;
}

ActionOutcome halt_invalid(SimState& st) {
  st.halted = true;
  st.halt_reason = FailureReason::InvalidAction;
  return ActionOutcome::HaltedInvalid;
}

ActionOutcome halt_budget(SimState& st) {
  st.halted = true;
  st.halt_reason = FailureReason::BudgetExhausted;
  return ActionOutcome::HaltedBudget;
}

Action::Kind kind_for(RecipeKind k) {
  switch (k) {
    case RecipeKind::Craft: return Action::Kind::Craft;
    case RecipeKind::Refine: return Action::Kind::Refine;
    case RecipeKind::Combine: return Action::Kind::Combine;
  }
  return Action::Kind::Craft;
}

bool structurally_valid(const Action& a, const Instance& in) {
  switch (a.kind) {
    case Action::Kind::Craft:
    case Action::Kind::Refine:
    case Action::Kind::Combine: {
      const Recipe* r = in.find_recipe(a.recipe_id);
      if (r == nullptr || kind_for(r->kind) != a.kind) return false;
      if (a.slots.size() > r->inputs.size()) return false;
      for (const int s : a.slots) {
        if (s < 0) return false;
      }
      return true;
    }
    case Action::Kind::Test:
      if (a.probe == Action::Probe::Synergy) {
        const auto [x, y] = a.synergy_pair;
        const ItemSpec* ix = in.find_item(x);
        const ItemSpec* iy = in.find_item(y);
        return x != y && ix && iy && ix->kind == ItemKind::Module &&
               iy->kind == ItemKind::Module;
      }
      return in.find_recipe(a.recipe_id) != nullptr;
    case Action::Kind::Repair: {
      const ItemSpec* rm = in.find_item(a.remove_module);
      const ItemSpec* ins = in.find_item(a.insert_module);
      return rm && ins && rm->kind == ItemKind::Module && ins->kind == ItemKind::Module;
    }
  }
  return false;
}

}  // namespace

ActionOutcome apply_action(SimState& st, const Action& action, const Instance& in) {
  if (st.halted) throw std::logic_error("apply_action on a halted state");

  if (!structurally_valid(action, in)) return halt_invalid(st);

  const int cost = action_cost(action, in.recipes);
  if (st.steps_used + cost > in.budget) return halt_budget(st);

  switch (action.kind) {
    case Action::Kind::Craft:
    case Action::Kind::Refine:
    case Action::Kind::Combine: {
      const Recipe& recipe = *in.find_recipe(action.recipe_id);
      std::vector<PoolEntry> pool = build_pool(st);
      auto consumed = resolve_inputs(pool, recipe.inputs, action.slots);
      if (!consumed) return halt_invalid(st);

      const bool artefact_consumed =
          std::any_of(pool.begin(), pool.end(),
                      [](const PoolEntry& e) { return e.is_artefact && e.consumed; });

      std::vector<ItemInstance> inventory;
      for (const auto& e : pool) {
        if (!e.consumed && !e.is_artefact) inventory.push_back(e.inst);
      }
      ItemInstance out = make_output(recipe, *consumed, in);
      if (recipe.kind == RecipeKind::Combine) {
        // The previous artefact, unless it was itself an input, goes back to
        // inventory; the new Combine output takes the artefact slot.
        if (st.artefact && !artefact_consumed) inventory.push_back(st.artefact->instance);
        Artefact art;
        art.instance = std::move(out);
        art.recipe_id = recipe.id;
        art.parts = std::move(*consumed);
        std::sort(art.parts.begin(), art.parts.end());
        st.artefact = std::move(art);
      } else {
        if (st.artefact && artefact_consumed) st.artefact.reset();
        inventory.push_back(std::move(out));
      }
      std::sort(inventory.begin(), inventory.end());
      st.inventory = std::move(inventory);
      st.steps_used += cost;
      return ActionOutcome::Applied;
    }

    case Action::Kind::Test: {
      if (action.probe == Action::Probe::Synergy) {
        const auto [x, y] = action.synergy_pair;
        if (in.mask.contains_synergy(x, y)) {
          st.revealed.synergy_pairs.insert(SynergyTable::make_key(x, y));
        }
      } else {
        if (in.mask.contains_recipe(action.recipe_id)) {
          st.revealed.recipe_effects.insert(action.recipe_id);
        }
      }
      st.steps_used += cost;
      return ActionOutcome::Revealed;
    }

    case Action::Kind::Repair: {
      if (!st.artefact || st.artefact->parts.empty()) return halt_invalid(st);
      Artefact art = *st.artefact;

      const auto part_it = std::find_if(
          art.parts.begin(), art.parts.end(),
          [&](const ItemInstance& p) { return p.item_id == action.remove_module; });
      if (part_it == art.parts.end()) return halt_invalid(st);

      const auto inv_it = std::find_if(
          st.inventory.begin(), st.inventory.end(),
          [&](const ItemInstance& p) { return p.item_id == action.insert_module; });
      if (inv_it == st.inventory.end()) return halt_invalid(st);

      const Recipe* recipe = in.find_recipe(art.recipe_id);
      if (recipe == nullptr) return halt_invalid(st);

      ItemInstance removed = *part_it;
      ItemInstance inserted = *inv_it;
      st.inventory.erase(inv_it);
      *part_it = std::move(inserted);
      std::sort(art.parts.begin(), art.parts.end());
      art.instance = make_output(*recipe, art.parts, in);
      st.artefact = std::move(art);
      st.inventory.push_back(std::move(removed));
      std::sort(st.inventory.begin(), st.inventory.end());
      st.steps_used += cost;
      return ActionOutcome::Applied;
    }
  }
  return halt_invalid(st);
}

namespace {

EpisodeResult finalize(std::vector<std::pair<Action, ActionOutcome>> trace,
                       const SimState& st, const Instance& in) {
  EpisodeResult r;
  r.trace = std::move(trace);
  r.steps_used = st.steps_used;
  if (st.artefact) {
    r.final_attributes = st.artefact->instance.attrs;
    r.final_modules = st.artefact->instance.modules;
    r.distinct_modules = distinct_module_count(st.artefact->instance.modules);
  }
  if (st.halted) {
    r.failure_reason = st.halt_reason;
    return r;
  }
  const bool ok = st.artefact
                      ? check_constraints(*r.final_attributes, r.distinct_modules,
                                          in.constraints, in.difficulty.required_modules)
                      : (in.constraints.empty() && in.difficulty.required_modules == 0);
  r.solved = ok;
  if (!ok) r.failure_reason = FailureReason::ConstraintsUnsatisfied;
  return r;
}

}  // namespace

EpisodeResult run_plan(const Instance& instance, const Plan& plan) {
  SimState st = init_state(instance);
  std::vector<std::pair<Action, ActionOutcome>> trace;
  for (const auto& action : plan.actions) {
    const ActionOutcome outcome = apply_action(st, action, instance);
    trace.emplace_back(action, outcome);
    if (st.halted) break;
  }
  return finalize(std::move(trace), st, instance);
}

EpisodeResult run_interactive(const Instance& instance, const AgentFn& agent) {
  SimState st = init_state(instance);
  std::vector<std::pair<Action, ActionOutcome>> trace;
  while (!st.halted) {
    const Observation obs = make_observation(st, instance);
    const AgentDecision decision = agent(obs);
    if (decision.submit) break;
    const ActionOutcome outcome = apply_action(st, decision.action, instance);
    trace.emplace_back(decision.action, outcome);
  }
  return finalize(std::move(trace), st, instance);
}

Observation make_observation(const SimState& st, const Instance& in) {
  Observation obs;
  obs.attribute_dim = in.attribute_dim;
  obs.budget_remaining = in.budget - st.steps_used;
  obs.required_modules = in.difficulty.required_modules;
  obs.constraints = in.constraints;
  obs.items = in.items;

  for (const auto& r : in.recipes) {
    Observation::RecipeView v;
    v.id = r.id;
    v.kind = r.kind;
    v.inputs = r.inputs;
    v.output = r.output;
    v.cost = r.cost;
    const bool hidden = in.mask.contains_recipe(r.id) && !st.revealed.contains_recipe(r.id);
    if (!hidden) v.effect = r.effect;
    obs.recipes.push_back(std::move(v));
  }

  for (const auto& [key, value] : in.synergies.entries()) {
    Observation::SynergyView v;
    v.a = key.first;
    v.b = key.second;
    const bool hidden = in.mask.contains_synergy(key.first, key.second) &&
                        !st.revealed.contains_synergy(key.first, key.second);
    if (!hidden) v.value = value;
    obs.synergies.push_back(std::move(v));
  }

  for (const auto& inst : st.inventory) {
    if (!obs.inventory_counts.empty() && obs.inventory_counts.back().first == inst.item_id) {
      obs.inventory_counts.back().second += 1;
    } else {
      obs.inventory_counts.emplace_back(inst.item_id, 1);
    }
  }

  if (st.artefact) {
    Observation::ArtefactView v;
    v.item_id = st.artefact->instance.item_id;
    for (const auto& p : st.artefact->parts) v.part_item_ids.push_back(p.item_id);
    v.modules = st.artefact->instance.modules;
    obs.artefact = std::move(v);
  }

  obs.revealed_entries = st.revealed;
  return obs;
}

std::vector<Action> enumerate_actions(const SimState& st, const Instance& in) {
  std::vector<Action> out;
  if (st.halted) return out;

  std::vector<PoolEntry> pool = build_pool(st);

  // Distinct input-instance selections for one recipe, expressed as slot
  // vectors consistent with sequential consumption.
  std::vector<std::vector<int>> selections;
  std::vector<int> slots;
  auto recurse = [&](auto&& self, const std::vector<int>& inputs, std::size_t pos,
                     const ItemInstance* prev_choice) -> void {
    if (pos == inputs.size()) {
      selections.push_back(slots);
      return;
    }
    const int want = inputs[pos];
    const bool same_as_prev = pos > 0 && inputs[pos - 1] == want;
    std::vector<std::size_t> matching;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!pool[i].consumed && pool[i].inst.item_id == want) matching.push_back(i);
    }
    std::set<ItemInstance> tried;
    for (std::size_t s = 0; s < matching.size(); ++s) {
      const ItemInstance& cand = pool[matching[s]].inst;
      if (!tried.insert(cand).second) continue;
      // Avoid symmetric duplicates for repeated input ids.
      if (same_as_prev && prev_choice != nullptr && cand < *prev_choice) continue;
      pool[matching[s]].consumed = true;
      slots.push_back(static_cast<int>(s));
      self(self, inputs, pos + 1, &cand);
      slots.pop_back();
      pool[matching[s]].consumed = false;
    }
  };

  for (const auto& recipe : in.recipes) {
    selections.clear();
    recurse(recurse, recipe.inputs, 0, nullptr);
    for (const auto& sel : selections) {
      switch (recipe.kind) {
        case RecipeKind::Craft:
          out.push_back(Action::craft(recipe.id));
          break;
        case RecipeKind::Refine:
          out.push_back(Action::refine(recipe.id, sel.empty() ? 0 : sel[0]));
          break;
        case RecipeKind::Combine:
          out.push_back(Action::combine(recipe.id, sel));
          break;
      }
    }
  }

  if (st.artefact && !st.artefact->parts.empty()) {
    std::set<int> removable;
    for (const auto& p : st.artefact->parts) {
      const ItemSpec* spec = in.find_item(p.item_id);
      if (spec && spec->kind == ItemKind::Module) removable.insert(p.item_id);
    }
    std::set<int> insertable;
    for (const auto& inst : st.inventory) {
      const ItemSpec* spec = in.find_item(inst.item_id);
      if (spec && spec->kind == ItemKind::Module) insertable.insert(inst.item_id);
    }
    for (const int rm : removable) {
      for (const int ins : insertable) {
        if (rm != ins) out.push_back(Action::repair(rm, ins));
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Action& a, const Action& b) {
    return canonical_key(a) < canonical_key(b);
  });
  return out;
}

OrderedJson episode_result_to_json(const EpisodeResult& r) {
  OrderedJson j;
  j["solved"] = r.solved;
  j["steps_used"] = r.steps_used;
  if (r.final_attributes) {
    j["final_attributes"] = *r.final_attributes;
  } else {
    j["final_attributes"] = nullptr;
  }
  j["final_modules"] = r.final_modules;
  j["distinct_modules"] = r.distinct_modules;
  j["failure_reason"] = r.failure_reason ? OrderedJson(to_string(*r.failure_reason))
                                         : OrderedJson(nullptr);
  j["trace"] = OrderedJson::array();
  for (const auto& [action, outcome] : r.trace) {
    OrderedJson tj;
    tj["action"] = action_to_json(action);
    tj["outcome"] = to_string(outcome);
    j["trace"].push_back(std::move(tj));
  }
  return j;
}

OrderedJson observation_to_json(const Observation& o) {
  OrderedJson j;
  j["type"] = "observe";
  j["schema_version"] = 1;
  j["attribute_dim"] = o.attribute_dim;
  j["budget_remaining"] = o.budget_remaining;
  j["required_modules"] = o.required_modules;

  j["constraints"] = OrderedJson::array();
  for (const auto& c : o.constraints) {
    OrderedJson cj;
    cj["attribute"] = c.attribute_index;
    cj["comparator"] = to_string(c.comparator);
    cj["threshold"] = c.threshold;
    j["constraints"].push_back(std::move(cj));
  }

  j["items"] = OrderedJson::array();
  for (const auto& it : o.items) {
    OrderedJson ij;
    ij["id"] = it.id;
    ij["kind"] = to_string(it.kind);
    ij["base_attributes"] = it.base_attributes;
    j["items"].push_back(std::move(ij));
  }

  j["recipes"] = OrderedJson::array();
  for (const auto& r : o.recipes) {
    OrderedJson rj;
    rj["id"] = r.id;
    rj["kind"] = to_string(r.kind);
    rj["inputs"] = r.inputs;
    rj["output"] = r.output;
    rj["cost"] = r.cost;
    rj["effect"] = r.effect ? OrderedJson(*r.effect) : OrderedJson(nullptr);
    j["recipes"].push_back(std::move(rj));
  }

  j["synergies"] = OrderedJson::array();
  for (const auto& s : o.synergies) {
    OrderedJson sj;
    sj["a"] = s.a;
    sj["b"] = s.b;
    sj["value"] = s.value ? OrderedJson(*s.value) : OrderedJson(nullptr);
    j["synergies"].push_back(std::move(sj));
  }

  j["inventory"] = OrderedJson::array();
  for (const auto& [item, count] : o.inventory_counts) {
    OrderedJson ij;
    ij["item"] = item;
    ij["count"] = count;
    j["inventory"].push_back(std::move(ij));
  }

  if (o.artefact) {
    OrderedJson aj;
    aj["item"] = o.artefact->item_id;
    aj["parts"] = o.artefact->part_item_ids;
    aj["modules"] = o.artefact->modules;
    j["artefact"] = std::move(aj);
  } else {
    j["artefact"] = nullptr;
  }

  OrderedJson rj;
  rj["synergy_pairs"] = OrderedJson::array();
  for (const auto& [a, b] : o.revealed_entries.synergy_pairs) {
    rj["synergy_pairs"].push_back(OrderedJson::array({a, b}));
  }
  rj["recipe_effects"] = OrderedJson::array();
  for (const int id : o.revealed_entries.recipe_effects) rj["recipe_effects"].push_back(id);
  j["revealed"] = std::move(rj);
  return j;
}

}  // namespace ww::sim
