#include "ww/genesis/generator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ww/core/errors.h"
#include "ww/oracle/solver.h"
#include "ww/sim/simulator.h"

namespace ww::genesis {

namespace {

int ceil_div(int a, int b) {
  return (a + b - 1) / b;
}

void check_config(const GeneratorConfig& cfg, const DifficultyVector& d) {
  if (cfg.attribute_dim < 1) throw GenerationError("attribute_dim must be >= 1");
  if (cfg.raw_items < 1) throw GenerationError("need at least one raw item");
  if (cfg.cost_min < 1 || cfg.cost_max < cfg.cost_min) {
    throw GenerationError("invalid cost range");
  }
  if (cfg.budget_slack < 0) throw GenerationError("budget_slack must be >= 0");
  if (cfg.deceptive_branches < 0) throw GenerationError("deceptive_branches must be >= 0");
  if (cfg.synergy_density < 0.0 || cfg.synergy_density > 1.0) {
    throw GenerationError("synergy_density outside [0,1]");
  }
  if (d.horizon < 1) throw GenerationError("horizon must be >= 1");
  if (d.constraint_count < 1) {
    // With no binding constraint there is nothing to pin the minimum cost to H.
    throw GenerationError("generated instances require at least one constraint (K >= 1)");
  }
  if (d.constraint_count > cfg.attribute_dim) {
    throw GenerationError("constraint count exceeds attribute dimension");
  }
  if (d.required_modules < 0) throw GenerationError("required_modules must be >= 0");
  if (d.required_modules + cfg.deceptive_branches > cfg.module_items) {
    throw GenerationError("module catalog too small for C modules plus deceptive branches");
  }
  if (d.ambiguity < 0.0 || d.ambiguity > 1.0) throw GenerationError("ambiguity outside [0,1]");
}

// Smallest backbone recipe count: C module chains of one craft each plus the
// final combine, stretched only when cost_max cannot absorb H.
int choose_backbone_size(const DifficultyVector& d, const GeneratorConfig& cfg) {
  const int min_n = d.required_modules + 1;
  const int n = std::max(min_n, ceil_div(d.horizon, cfg.cost_max));
  if (n * cfg.cost_min > d.horizon) {
    throw GenerationError("cannot partition horizon " + std::to_string(d.horizon) + " into " +
                          std::to_string(n) + " recipe costs >= " +
                          std::to_string(cfg.cost_min));
  }
  return n;
}

std::vector<int> partition_costs(int total, int parts, int cmin, int cmax, Rng& rng) {
  std::vector<int> costs(static_cast<std::size_t>(parts), cmin);
  int left = total - parts * cmin;
  while (left > 0) {
    std::vector<int> open;
    for (int i = 0; i < parts; ++i) {
      if (costs[static_cast<std::size_t>(i)] < cmax) open.push_back(i);
    }
    const int pick = open[static_cast<std::size_t>(rng.below(open.size()))];
    costs[static_cast<std::size_t>(pick)] += 1;
    --left;
  }
  return costs;
}

AttributeVector make_effect(int dim, double power, Rng& rng, int lo, int hi) {
  AttributeVector e = zero_attributes(dim);
  e[0] = power;
  if (dim > 1) e[1] = rng.range(lo, hi);                      // stability
  if (dim > 2) e[2] = rng.range(0, std::max(0, hi - lo));     // weight
  if (dim > 3) e[3] = rng.range(lo, hi);                      // aesthetics
  for (int i = 4; i < dim; ++i) e[static_cast<std::size_t>(i)] = rng.range(lo, hi);
  return e;
}

AttributeVector make_synergy(int dim, double power, Rng& rng, int lo, int hi) {
  AttributeVector e = zero_attributes(dim);
  e[0] = power;
  if (dim > 1) e[1] = rng.range(lo, hi);
  if (dim > 2) e[2] = rng.range(-1, hi - lo);
  if (dim > 3) e[3] = rng.range(lo, hi);
  for (int i = 4; i < dim; ++i) e[static_cast<std::size_t>(i)] = rng.range(lo, hi);
  return e;
}

struct CatalogBuilder {
  Instance& inst;

  int add_item(ItemKind kind) {
    const int id = static_cast<int>(inst.items.size());
    inst.items.push_back(ItemSpec{id, kind, zero_attributes(inst.attribute_dim)});
    return id;
  }

  int add_recipe(RecipeKind kind, std::vector<int> inputs, int output, int cost,
                 AttributeVector effect) {
    std::sort(inputs.begin(), inputs.end());
    const int id = static_cast<int>(inst.recipes.size());
    inst.recipes.push_back(Recipe{id, kind, std::move(inputs), output, cost,
                                  std::move(effect)});
    return id;
  }
};

// Comparator per attribute index: weight (index 2) binds from above, the
// rest from below.
Comparator direction_for(int attribute_index) {
  return attribute_index == 2 ? Comparator::LessEq : Comparator::GreaterEq;
}

void remap_ids(Instance& inst, GenerationAudit* audit, Rng& rng) {
  const int item_count = static_cast<int>(inst.items.size());
  const int recipe_count = static_cast<int>(inst.recipes.size());

  std::vector<int> item_new(static_cast<std::size_t>(item_count));
  std::iota(item_new.begin(), item_new.end(), 0);
  rng.shuffle(item_new);
  std::vector<int> recipe_new(static_cast<std::size_t>(recipe_count));
  std::iota(recipe_new.begin(), recipe_new.end(), 0);
  rng.shuffle(recipe_new);

  std::vector<ItemSpec> items(static_cast<std::size_t>(item_count));
  for (const auto& it : inst.items) {
    ItemSpec moved = it;
    moved.id = item_new[static_cast<std::size_t>(it.id)];
    items[static_cast<std::size_t>(moved.id)] = std::move(moved);
  }
  inst.items = std::move(items);

  std::vector<Recipe> recipes(static_cast<std::size_t>(recipe_count));
  for (const auto& r : inst.recipes) {
    Recipe moved = r;
    moved.id = recipe_new[static_cast<std::size_t>(r.id)];
    moved.output = item_new[static_cast<std::size_t>(r.output)];
    for (int& in : moved.inputs) in = item_new[static_cast<std::size_t>(in)];
    std::sort(moved.inputs.begin(), moved.inputs.end());
    recipes[static_cast<std::size_t>(moved.id)] = std::move(moved);
  }
  inst.recipes = std::move(recipes);

  SynergyTable table;
  for (const auto& [key, value] : inst.synergies.entries()) {
    table.set(item_new[static_cast<std::size_t>(key.first)],
              item_new[static_cast<std::size_t>(key.second)], value);
  }
  inst.synergies = std::move(table);

  for (int& id : inst.initial_inventory) id = item_new[static_cast<std::size_t>(id)];
  std::sort(inst.initial_inventory.begin(), inst.initial_inventory.end());

  auto remap_plan = [&](Plan& plan) {
    for (Action& a : plan.actions) {
      switch (a.kind) {
        case Action::Kind::Craft:
        case Action::Kind::Refine:
        case Action::Kind::Combine:
          a.recipe_id = recipe_new[static_cast<std::size_t>(a.recipe_id)];
          break;
        case Action::Kind::Test:
          if (a.probe == Action::Probe::Synergy) {
            a.synergy_pair = SynergyTable::make_key(
                item_new[static_cast<std::size_t>(a.synergy_pair.first)],
                item_new[static_cast<std::size_t>(a.synergy_pair.second)]);
          } else {
            a.recipe_id = recipe_new[static_cast<std::size_t>(a.recipe_id)];
          }
          break;
        case Action::Kind::Repair:
          a.remove_module = item_new[static_cast<std::size_t>(a.remove_module)];
          a.insert_module = item_new[static_cast<std::size_t>(a.insert_module)];
          break;
      }
    }
  };
  if (audit != nullptr) {
    remap_plan(audit->backbone);
    for (Plan& p : audit->deceptive_plans) remap_plan(p);
    for (int& m : audit->backbone_modules) m = item_new[static_cast<std::size_t>(m)];
    std::sort(audit->backbone_modules.begin(), audit->backbone_modules.end());
  }
}

}  // namespace

BackboneResult build_backbone(const DifficultyVector& d, const GeneratorConfig& cfg,
                              Rng& rng) {
  check_config(cfg, d);

  const int n = choose_backbone_size(d, cfg);
  const std::vector<int> costs = partition_costs(d.horizon, n, cfg.cost_min, cfg.cost_max, rng);

  // Chains: C module chains, or one intermediate chain when C = 0 and the
  // partition needs more than the final combine.
  const int chain_count = d.required_modules > 0 ? d.required_modules : (n > 1 ? 1 : 0);
  const int chain_recipes = n - 1;
  const int backbone_inters =
      chain_count > 0 ? chain_recipes - (d.required_modules > 0 ? chain_count : 0) : 0;
  const int inters_needed = backbone_inters + 1 + cfg.deceptive_branches;
  if (inters_needed > cfg.intermediate_items) {
    throw GenerationError("intermediate catalog too small: need " +
                          std::to_string(inters_needed) + ", have " +
                          std::to_string(cfg.intermediate_items));
  }

  BackboneResult out;
  Instance& inst = out.instance;
  inst.attribute_dim = cfg.attribute_dim;
  inst.difficulty = d;
  inst.budget = d.horizon + cfg.budget_slack;
  inst.rng_algorithm = cfg.rng_algorithm;
  CatalogBuilder cat{inst};

  for (int i = 0; i < cfg.raw_items; ++i) cat.add_item(ItemKind::Raw);

  // Chain lengths: one recipe each, extras distributed round-robin.
  std::vector<int> chain_len(static_cast<std::size_t>(chain_count), 0);
  {
    int left = chain_recipes;
    for (int i = 0; left > 0 && chain_count > 0; i = (i + 1) % chain_count) {
      chain_len[static_cast<std::size_t>(i)] += 1;
      --left;
    }
  }

  Plan& backbone = out.audit.backbone;
  int cost_cursor = 0;
  auto next_cost = [&]() { return costs[static_cast<std::size_t>(cost_cursor++)]; };

  std::vector<int> module_ids;
  std::vector<int> chain_outputs;
  for (int c = 0; c < chain_count; ++c) {
    const bool makes_module = d.required_modules > 0;
    const int len = chain_len[static_cast<std::size_t>(c)];
    int prev = -1;
    int chain_cost = 0;
    for (int step = 0; step < len; ++step) {
      const bool last = step == len - 1;
      const ItemKind out_kind =
          (last && makes_module) ? ItemKind::Module : ItemKind::Intermediate;
      const int out_item = cat.add_item(out_kind);
      const int cost = next_cost();
      chain_cost += cost;
      // Refine resets attributes to base + effect, so a chain step carries
      // the full accumulated rate of its prefix. Each chain item has a
      // unique producer, which keeps power bounded by rate * production
      // cost everywhere.
      const AttributeVector effect =
          make_effect(cfg.attribute_dim, kPowerRate * chain_cost, rng, 0, 3);
      int recipe;
      if (step == 0) {
        const int raw = rng.range(0, cfg.raw_items - 1);
        recipe = cat.add_recipe(RecipeKind::Craft, {raw}, out_item, cost, effect);
        inst.initial_inventory.push_back(raw);
        backbone.actions.push_back(Action::craft(recipe));
      } else {
        recipe = cat.add_recipe(RecipeKind::Refine, {prev}, out_item, cost, effect);
        backbone.actions.push_back(Action::refine(recipe));
      }
      prev = out_item;
    }
    chain_outputs.push_back(prev);
    if (makes_module) module_ids.push_back(prev);
  }

  // Final combine producing the target artefact.
  const int artefact_item = cat.add_item(ItemKind::Intermediate);
  std::vector<int> combine_inputs = chain_outputs;
  while (combine_inputs.size() < 2) {
    const int raw = rng.range(0, cfg.raw_items - 1);
    combine_inputs.push_back(raw);
    inst.initial_inventory.push_back(raw);
  }
  {
    const int cost = next_cost();
    const AttributeVector effect =
        make_effect(cfg.attribute_dim, kPowerRate * cost, rng, 0, 3);
    const int recipe =
        cat.add_recipe(RecipeKind::Combine, combine_inputs, artefact_item, cost, effect);
    backbone.actions.push_back(Action::combine(recipe));
  }

  // Synergies between every pair of backbone modules feed the thresholds, so
  // hitting them requires this exact module pairing, not greedy accumulation.
  for (std::size_t i = 0; i < module_ids.size(); ++i) {
    for (std::size_t j = i + 1; j < module_ids.size(); ++j) {
      inst.synergies.set(module_ids[i], module_ids[j],
                         make_synergy(cfg.attribute_dim, 0.0, rng, 1, 3));
    }
  }

  std::sort(inst.initial_inventory.begin(), inst.initial_inventory.end());

  // Thresholds are the backbone artefact's achieved attributes, binding
  // exactly. K constraints cover attribute indices 0..K-1; index 0 (power)
  // is the one that pins the minimum cost to H.
  const sim::EpisodeResult probe = sim::run_plan(inst, backbone);
  if (!probe.final_attributes || probe.steps_used != d.horizon || probe.failure_reason) {
    if (probe.failure_reason &&
        *probe.failure_reason != sim::FailureReason::ConstraintsUnsatisfied) {
      throw GenerationError("backbone plan failed to execute");
    }
  }
  if (!probe.final_attributes) throw GenerationError("backbone produced no artefact");
  if ((*probe.final_attributes)[0] != kPowerRate * d.horizon) {
    throw GenerationError("backbone power is not rate * horizon");
  }
  out.audit.achieved_attributes = *probe.final_attributes;
  for (int k = 0; k < d.constraint_count; ++k) {
    Constraint c;
    c.attribute_index = k;
    c.comparator = direction_for(k);
    c.threshold = (*probe.final_attributes)[static_cast<std::size_t>(k)];
    inst.constraints.push_back(c);
  }

  out.audit.backbone_modules = module_ids;
  std::sort(out.audit.backbone_modules.begin(), out.audit.backbone_modules.end());
  out.audit.backbone_recipe_count = n;

  const sim::EpisodeResult verify = sim::run_plan(inst, backbone);
  if (!verify.solved || verify.steps_used != d.horizon) {
    throw GenerationError("backbone does not solve its own instance");
  }
  return out;
}

Instance add_deception(Instance inst, Rng& rng, const GeneratorConfig& cfg,
                       GenerationAudit* audit) {
  CatalogBuilder cat{inst};
  const DifficultyVector& d = inst.difficulty;
  const int dim = inst.attribute_dim;

  std::vector<int> all_modules = inst.module_item_ids();

  for (int b = 0; b < cfg.deceptive_branches; ++b) {
    // Branch: craft a bait module, combine it into a bait artefact. Total
    // cost stays below H when the cost range allows; the terminal combine
    // always undershoots the power rate by one, so the bait artefact can
    // never meet the binding power threshold.
    const int budget = std::max(2 * cfg.cost_min, d.horizon - 1);
    const int c1 = rng.range(cfg.cost_min,
                             std::max(cfg.cost_min, std::min(cfg.cost_max, budget - cfg.cost_min)));
    const int c2 = rng.range(cfg.cost_min,
                             std::max(cfg.cost_min, std::min(cfg.cost_max, budget - c1)));

    const int bait_module = cat.add_item(ItemKind::Module);
    const int bait_artefact = cat.add_item(ItemKind::Intermediate);
    const int craft_raw = rng.range(0, cfg.raw_items - 1);
    const int filler_raw = rng.range(0, cfg.raw_items - 1);

    const int craft = cat.add_recipe(RecipeKind::Craft, {craft_raw}, bait_module, c1,
                                     make_effect(dim, kPowerRate * c1, rng, 2, 5));
    const int combine =
        cat.add_recipe(RecipeKind::Combine, {bait_module, filler_raw}, bait_artefact, c2,
                       make_effect(dim, kPowerRate * c2 - 1.0, rng, 2, 5));

    inst.initial_inventory.push_back(craft_raw);
    inst.initial_inventory.push_back(filler_raw);

    for (const int other : all_modules) {
      if (rng.chance(cfg.synergy_density)) {
        const double p = rng.chance(0.5) ? 0.0 : -1.0;
        inst.synergies.set(bait_module, other, make_synergy(dim, p, rng, 1, 4));
      }
    }
    all_modules.push_back(bait_module);

    if (audit != nullptr) {
      Plan bait;
      bait.actions.push_back(Action::craft(craft));
      bait.actions.push_back(Action::combine(combine));
      audit->deceptive_plans.push_back(std::move(bait));
    }
  }

  // Filler items and recipes pad the catalog to its configured size and
  // widen the branching factor without touching the rate bound.
  auto count_kind = [&](ItemKind k) {
    int c = 0;
    for (const auto& it : inst.items) {
      if (it.kind == k) ++c;
    }
    return c;
  };

  int module_fill = cfg.module_items - count_kind(ItemKind::Module);
  int inter_fill = cfg.intermediate_items - count_kind(ItemKind::Intermediate);
  if (module_fill < 0 || inter_fill < 0) {
    throw GenerationError("catalog overflow while padding");
  }
  for (int i = 0; i < module_fill + inter_fill; ++i) {
    const bool module = i < module_fill;
    const int item = cat.add_item(module ? ItemKind::Module : ItemKind::Intermediate);
    const int raw = rng.range(0, cfg.raw_items - 1);
    const int cost = rng.range(cfg.cost_min, cfg.cost_max);
    const double power = rng.range(0, static_cast<int>(kPowerRate) * cost - 1);
    cat.add_recipe(RecipeKind::Craft, {raw}, item, cost, make_effect(dim, power, rng, 0, 2));
    if (rng.chance(0.5)) inst.initial_inventory.push_back(raw);
    if (module) {
      for (const int other : all_modules) {
        if (rng.chance(cfg.synergy_density)) {
          const double p = rng.chance(0.5) ? 0.0 : -1.0;
          inst.synergies.set(item, other, make_synergy(dim, p, rng, 0, 2));
        }
      }
      all_modules.push_back(item);
    }
  }

  const int spare = rng.range(0, 2);
  for (int i = 0; i < spare; ++i) {
    inst.initial_inventory.push_back(rng.range(0, cfg.raw_items - 1));
  }

  std::sort(inst.initial_inventory.begin(), inst.initial_inventory.end());
  return inst;
}

Instance apply_ambiguity(Instance inst, double ambiguity, Rng& rng) {
  if (ambiguity < 0.0 || ambiguity > 1.0) {
    throw GenerationError("ambiguity outside [0,1]");
  }
  inst.mask = AmbiguityMask{};

  std::vector<std::pair<bool, std::pair<int, int>>> entries;  // (is_synergy, key)
  for (const auto& [key, value] : inst.synergies.entries()) {
    entries.push_back({true, key});
  }
  for (const auto& r : inst.recipes) {
    entries.push_back({false, {r.id, 0}});
  }

  // floor(A * maskable); the epsilon absorbs decimal-fraction representation
  // error so dyadic ambiguities stay exact.
  const int maskable = static_cast<int>(entries.size());
  const int hidden = static_cast<int>(
      std::floor(static_cast<long double>(ambiguity) * maskable + 1e-9L));

  std::vector<int> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (int i = 0; i < hidden; ++i) {
    const auto& [is_synergy, key] = entries[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    if (is_synergy) {
      inst.mask.synergy_pairs.insert(key);
    } else {
      inst.mask.recipe_effects.insert(key.first);
    }
  }
  return inst;
}

std::pair<Instance, GenerationAudit> generate_with_audit(std::uint64_t seed, int level,
                                                         const DifficultyLadder& ladder,
                                                         const GeneratorConfig& cfg) {
  ladder.validate();
  const DifficultyVector& d = ladder.at(level);

  const Rng root(seed);
  Rng rng_backbone = root.fork("backbone");
  Rng rng_deception = root.fork("deception");
  Rng rng_shuffle = root.fork("shuffle");
  Rng rng_mask = root.fork("mask");

  BackboneResult bb = build_backbone(d, cfg, rng_backbone);
  GenerationAudit audit = std::move(bb.audit);
  Instance inst = add_deception(std::move(bb.instance), rng_deception, cfg, &audit);

  remap_ids(inst, &audit, rng_shuffle);

  inst = apply_ambiguity(std::move(inst), d.ambiguity, rng_mask);

  inst.seed = seed;
  inst.difficulty_level = level;
  inst.instance_id = "ww-l" + std::to_string(level) + "-s" + std::to_string(seed);

  inst.validate();

  // The backbone must still solve after deception and relabeling, with the
  // same attribute outcome that defined the thresholds.
  const sim::EpisodeResult verify = sim::run_plan(inst, audit.backbone);
  if (!verify.solved || verify.steps_used != d.horizon ||
      !verify.final_attributes || *verify.final_attributes != audit.achieved_attributes) {
    throw GenerationError("post-generation backbone verification failed");
  }
  return {std::move(inst), std::move(audit)};
}

Instance generate_instance(std::uint64_t seed, int level, const DifficultyLadder& ladder,
                           const GeneratorConfig& cfg) {
  return generate_with_audit(seed, level, ladder, cfg).first;
}

ValidationReport validate_instance(const Instance& inst, int cost_cap, long node_budget) {
  oracle::SearchLimits limits;
  limits.cost_cap = cost_cap;
  limits.node_budget = node_budget;
  const oracle::SearchResult res = oracle::solve_min_steps(inst, limits);

  ValidationReport report;
  report.nodes_expanded = res.nodes_expanded;
  report.search_complete = res.status != oracle::SearchStatus::NodeBudgetExceeded;
  if (res.status == oracle::SearchStatus::Solved) {
    report.oracle_min_cost = res.cost;
    report.exact_h_match = *res.cost == inst.difficulty.horizon;
    report.shorter_path_exists = *res.cost < inst.difficulty.horizon;
    report.solvable_within_budget = *res.cost <= inst.budget;
  }
  return report;
}

OrderedJson validation_report_to_json(const ValidationReport& r) {
  OrderedJson j;
  j["oracle_min_cost"] =
      r.oracle_min_cost ? OrderedJson(*r.oracle_min_cost) : OrderedJson("exceeded-cap");
  j["exact_h_match"] = r.exact_h_match;
  j["shorter_path_exists"] = r.shorter_path_exists;
  j["solvable_within_budget"] = r.solvable_within_budget;
  j["search_complete"] = r.search_complete;
  j["nodes_expanded"] = r.nodes_expanded;
  return j;
}

}  // namespace ww::genesis
