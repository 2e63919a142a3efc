#include "ww/core/types.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>

#include "ww/core/errors.h"

namespace ww {

AttributeVector zero_attributes(int dim) {
  return AttributeVector(static_cast<std::size_t>(dim), 0.0);
}

void add_in_place(AttributeVector& dst, const AttributeVector& src) {
  if (dst.size() != src.size()) {
    throw std::invalid_argument("attribute dimension mismatch");
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

bool attributes_finite(const AttributeVector& v) {
  for (const double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

const char* to_string(ItemKind k) {
  switch (k) {
    case ItemKind::Raw: return "raw";
    case ItemKind::Intermediate: return "intermediate";
    case ItemKind::Module: return "module";
  }
  return "raw";
}

const char* to_string(RecipeKind k) {
  switch (k) {
    case RecipeKind::Craft: return "craft";
    case RecipeKind::Refine: return "refine";
    case RecipeKind::Combine: return "combine";
  }
  return "craft";
}

const char* to_string(Comparator c) {
  return c == Comparator::GreaterEq ? ">=" : "<=";
}

SynergyTable::Key SynergyTable::make_key(int a, int b) {
  return a < b ? Key{a, b} : Key{b, a};
}

void SynergyTable::set(int a, int b, AttributeVector value) {
  if (a == b) throw std::invalid_argument("synergy table rejects self-pairs");
  entries_[make_key(a, b)] = std::move(value);
}

const AttributeVector* SynergyTable::find(int a, int b) const {
  const auto it = entries_.find(make_key(a, b));
  return it == entries_.end() ? nullptr : &it->second;
}

const DifficultyVector& DifficultyLadder::at(int level) const {
  if (level < 1 || level > size()) {
    throw ConfigError("difficulty level " + std::to_string(level) +
                      " outside ladder [1, " + std::to_string(size()) + "]");
  }
  return levels[static_cast<std::size_t>(level - 1)];
}

void DifficultyLadder::validate() const {
  if (levels.empty()) throw ConfigError("difficulty ladder is empty");
  for (const auto& d : levels) {
    if (d.horizon < 1) throw ConfigError("ladder level with horizon < 1");
    if (d.constraint_count < 0 || d.required_modules < 0)
      throw ConfigError("ladder level with negative component");
    if (d.ambiguity < 0.0 || d.ambiguity > 1.0)
      throw ConfigError("ladder ambiguity outside [0,1]");
  }
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const auto& a = levels[i - 1];
    const auto& b = levels[i];
    const bool ge = b.horizon >= a.horizon && b.constraint_count >= a.constraint_count &&
                    b.required_modules >= a.required_modules && b.ambiguity >= a.ambiguity;
    const bool strict = b.horizon > a.horizon || b.constraint_count > a.constraint_count ||
                        b.required_modules > a.required_modules || b.ambiguity > a.ambiguity;
    if (!ge || !strict) {
      throw ConfigError("ladder levels " + std::to_string(i) + " and " +
                        std::to_string(i + 1) + " are not strictly increasing");
    }
  }
}

bool AmbiguityMask::contains_synergy(int a, int b) const {
  return synergy_pairs.count(SynergyTable::make_key(a, b)) > 0;
}

bool AmbiguityMask::contains_recipe(int id) const {
  return recipe_effects.count(id) > 0;
}

const ItemSpec* Instance::find_item(int id) const {
  if (id < 0 || id >= static_cast<int>(items.size())) return nullptr;
  return &items[static_cast<std::size_t>(id)];
}

const Recipe* Instance::find_recipe(int id) const {
  if (id < 0 || id >= static_cast<int>(recipes.size())) return nullptr;
  return &recipes[static_cast<std::size_t>(id)];
}

std::vector<int> Instance::module_item_ids() const {
  std::vector<int> out;
  for (const auto& it : items) {
    if (it.kind == ItemKind::Module) out.push_back(it.id);
  }
  return out;
}

int Instance::maskable_count() const {
  return static_cast<int>(synergies.size() + recipes.size());
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("instance invariant violated: " + what);
}

}  // namespace

void Instance::validate() const {
  require(attribute_dim >= 1, "attribute_dim >= 1");
  require(budget >= 1, "budget >= 1");
  require(budget >= difficulty.horizon, "budget >= horizon");
  require(difficulty.constraint_count == static_cast<int>(constraints.size()),
          "constraint count matches difficulty K");

  for (std::size_t i = 0; i < items.size(); ++i) {
    require(items[i].id == static_cast<int>(i), "item ids dense and sorted");
    require(items[i].base_attributes.size() == static_cast<std::size_t>(attribute_dim),
            "item attribute dimension");
    require(attributes_finite(items[i].base_attributes), "item attributes finite");
  }

  std::vector<int> producers(items.size(), 0);
  for (std::size_t i = 0; i < recipes.size(); ++i) {
    const Recipe& r = recipes[i];
    require(r.id == static_cast<int>(i), "recipe ids dense and sorted");
    require(r.cost >= 1, "recipe cost >= 1");
    require(find_item(r.output) != nullptr, "recipe output exists");
    require(r.effect.size() == static_cast<std::size_t>(attribute_dim),
            "recipe effect dimension");
    require(attributes_finite(r.effect), "recipe effect finite");
    require(std::is_sorted(r.inputs.begin(), r.inputs.end()), "recipe inputs sorted");
    require(!r.inputs.empty(), "recipe has inputs");
    for (const int in : r.inputs) require(find_item(in) != nullptr, "recipe input exists");
    switch (r.kind) {
      case RecipeKind::Craft:
        for (const int in : r.inputs) {
          require(find_item(in)->kind == ItemKind::Raw, "craft inputs are raw");
        }
        break;
      case RecipeKind::Refine:
        require(r.inputs.size() == 1, "refine has exactly one input");
        break;
      case RecipeKind::Combine:
        require(r.inputs.size() >= 2, "combine has at least two inputs");
        break;
    }
    require(find_item(r.output)->kind != ItemKind::Raw, "recipe output is not raw");
    producers[static_cast<std::size_t>(r.output)] += 1;
  }
  for (const auto& it : items) {
    if (it.kind == ItemKind::Raw) {
      require(producers[static_cast<std::size_t>(it.id)] == 0, "raw items have no producer");
    } else {
      require(producers[static_cast<std::size_t>(it.id)] > 0,
              "non-raw items have a producing recipe");
    }
  }

  require(recipe_graph_is_acyclic(items, recipes), "recipe hypergraph acyclic");

  for (const auto& [key, value] : synergies.entries()) {
    const ItemSpec* a = find_item(key.first);
    const ItemSpec* b = find_item(key.second);
    require(a && b, "synergy pair items exist");
    require(a->kind == ItemKind::Module && b->kind == ItemKind::Module,
            "synergy pairs reference modules");
    require(key.first < key.second, "synergy keys normalized");
    require(value.size() == static_cast<std::size_t>(attribute_dim), "synergy dimension");
    require(attributes_finite(value), "synergy finite");
  }

  for (const auto& c : constraints) {
    require(c.attribute_index >= 0 && c.attribute_index < attribute_dim,
            "constraint attribute index in range");
    require(std::isfinite(c.threshold), "constraint threshold finite");
  }

  require(std::is_sorted(initial_inventory.begin(), initial_inventory.end()),
          "initial inventory sorted");
  for (const int id : initial_inventory) {
    const ItemSpec* it = find_item(id);
    require(it != nullptr && it->kind == ItemKind::Raw, "initial inventory holds raw items");
  }

  for (const auto& [a, b] : mask.synergy_pairs) {
    require(synergies.find(a, b) != nullptr, "masked synergy pair is a table entry");
  }
  for (const int rid : mask.recipe_effects) {
    require(find_recipe(rid) != nullptr, "masked recipe exists");
  }
}

Action Action::craft(int recipe) {
  Action a;
  a.kind = Kind::Craft;
  a.recipe_id = recipe;
  return a;
}

Action Action::refine(int recipe, int slot) {
  Action a;
  a.kind = Kind::Refine;
  a.recipe_id = recipe;
  if (slot != 0) a.slots = {slot};
  return a;
}

Action Action::combine(int recipe, std::vector<int> slots) {
  Action a;
  a.kind = Kind::Combine;
  a.recipe_id = recipe;
  const bool all_zero = std::all_of(slots.begin(), slots.end(), [](int s) { return s == 0; });
  if (!all_zero) a.slots = std::move(slots);
  return a;
}

Action Action::test_synergy(int x, int y) {
  Action a;
  a.kind = Kind::Test;
  a.probe = Probe::Synergy;
  a.synergy_pair = SynergyTable::make_key(x, y);
  return a;
}

Action Action::test_recipe(int recipe) {
  Action a;
  a.kind = Kind::Test;
  a.probe = Probe::RecipeEffect;
  a.recipe_id = recipe;
  return a;
}

Action Action::repair(int remove_module, int insert_module) {
  Action a;
  a.kind = Kind::Repair;
  a.remove_module = remove_module;
  a.insert_module = insert_module;
  return a;
}

std::string canonical_key(const Action& a) {
  char buf[96];
  switch (a.kind) {
    case Action::Kind::Craft:
      std::snprintf(buf, sizeof buf, "craft %05d", a.recipe_id);
      break;
    case Action::Kind::Refine:
      std::snprintf(buf, sizeof buf, "refine %05d %03d", a.recipe_id,
                    a.slots.empty() ? 0 : a.slots[0]);
      break;
    case Action::Kind::Combine: {
      std::string key(buf, static_cast<std::size_t>(std::snprintf(
                               buf, sizeof buf, "combine %05d", a.recipe_id)));
      for (const int s : a.slots) {
        std::snprintf(buf, sizeof buf, " %03d", s);
        key += buf;
      }
      return key;
    }
    case Action::Kind::Test:
      if (a.probe == Action::Probe::Synergy) {
        std::snprintf(buf, sizeof buf, "test s %05d %05d", a.synergy_pair.first,
                      a.synergy_pair.second);
      } else {
        std::snprintf(buf, sizeof buf, "test r %05d", a.recipe_id);
      }
      break;
    case Action::Kind::Repair:
      std::snprintf(buf, sizeof buf, "repair %05d %05d", a.remove_module, a.insert_module);
      break;
  }
  return buf;
}

bool action_equal(const Action& a, const Action& b) {
  return canonical_key(a) == canonical_key(b);
}

char skeleton_char(Action::Kind k) {
  switch (k) {
    case Action::Kind::Craft: return 'c';
    case Action::Kind::Refine: return 'r';
    case Action::Kind::Combine: return 'm';
    case Action::Kind::Test: return 't';
    case Action::Kind::Repair: return 'p';
  }
  return '?';
}

AttributeVector aggregate_attributes(const std::vector<int>& part_modules,
                                     const std::vector<AttributeVector>& part_attrs,
                                     const AttributeVector& base,
                                     const SynergyTable& synergies) {
  AttributeVector out = base;
  for (const auto& attrs : part_attrs) add_in_place(out, attrs);

  std::vector<int> distinct = part_modules;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    for (std::size_t j = i + 1; j < distinct.size(); ++j) {
      if (const AttributeVector* syn = synergies.find(distinct[i], distinct[j])) {
        add_in_place(out, *syn);
      }
    }
  }
  return out;
}

bool check_constraints(const AttributeVector& attrs, int distinct_modules,
                       const std::vector<Constraint>& constraints,
                       int required_modules) {
  if (distinct_modules < required_modules) return false;
  for (const auto& c : constraints) {
    if (c.attribute_index < 0 || c.attribute_index >= static_cast<int>(attrs.size())) {
      return false;
    }
    const double v = attrs[static_cast<std::size_t>(c.attribute_index)];
    if (c.comparator == Comparator::GreaterEq ? v < c.threshold : v > c.threshold) {
      return false;
    }
  }
  return true;
}

int action_cost(const Action& action, const std::vector<Recipe>& recipes) {
  switch (action.kind) {
    case Action::Kind::Test:
    case Action::Kind::Repair:
      return 1;
    default:
      break;
  }
  if (action.recipe_id < 0 || action.recipe_id >= static_cast<int>(recipes.size())) {
    throw InvalidActionError("unknown recipe id " + std::to_string(action.recipe_id));
  }
  return recipes[static_cast<std::size_t>(action.recipe_id)].cost;
}

int plan_cost(const Plan& plan, const Instance& instance) {
  int total = 0;
  for (const auto& a : plan.actions) total += action_cost(a, instance.recipes);
  return total;
}

bool recipe_graph_is_acyclic(const std::vector<ItemSpec>& items,
                             const std::vector<Recipe>& recipes) {
  // Kahn's algorithm over the item-ancestry relation (input -> output edges).
  const std::size_t n = items.size();
  std::vector<std::vector<int>> out_edges(n);
  std::vector<int> in_degree(n, 0);
  std::set<std::pair<int, int>> seen;
  for (const auto& r : recipes) {
    for (const int in : r.inputs) {
      if (in < 0 || in >= static_cast<int>(n)) return false;
      if (r.output < 0 || r.output >= static_cast<int>(n)) return false;
      if (in == r.output) return false;
      if (seen.insert({in, r.output}).second) {
        out_edges[static_cast<std::size_t>(in)].push_back(r.output);
        in_degree[static_cast<std::size_t>(r.output)] += 1;
      }
    }
  }
  std::queue<int> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_degree[i] == 0) ready.push(static_cast<int>(i));
  }
  std::size_t emitted = 0;
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop();
    ++emitted;
    for (const int w : out_edges[static_cast<std::size_t>(v)]) {
      if (--in_degree[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
  }
  return emitted == n;
}

}  // namespace ww
