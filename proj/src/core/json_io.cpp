#include "ww/core/json_io.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ww/core/errors.h"

namespace ww {

namespace {

ItemKind item_kind_from(const std::string& s) {
  if (s == "raw") return ItemKind::Raw;
  if (s == "intermediate") return ItemKind::Intermediate;
  if (s == "module") return ItemKind::Module;
  throw std::invalid_argument("unknown item kind: " + s);
}

RecipeKind recipe_kind_from(const std::string& s) {
  if (s == "craft") return RecipeKind::Craft;
  if (s == "refine") return RecipeKind::Refine;
  if (s == "combine") return RecipeKind::Combine;
  throw std::invalid_argument("unknown recipe kind: " + s);
}

Comparator comparator_from(const std::string& s) {
  if (s == ">=") return Comparator::GreaterEq;
  if (s == "<=") return Comparator::LessEq;
  throw std::invalid_argument("unknown comparator: " + s);
}

}  // namespace

std::uint64_t parse_seed(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty seed string");
  std::uint64_t v = 0;
  for (const char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("seed is not a decimal string: " + s);
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

std::string seed_to_string(std::uint64_t seed) {
  return std::to_string(seed);
}

OrderedJson difficulty_to_json(const DifficultyVector& d) {
  OrderedJson j;
  j["horizon"] = d.horizon;
  j["constraints"] = d.constraint_count;
  j["modules"] = d.required_modules;
  j["ambiguity"] = d.ambiguity;
  return j;
}

DifficultyVector difficulty_from_json(const OrderedJson& j) {
  DifficultyVector d;
  d.horizon = j.at("horizon").get<int>();
  d.constraint_count = j.at("constraints").get<int>();
  d.required_modules = j.at("modules").get<int>();
  d.ambiguity = j.at("ambiguity").get<double>();
  return d;
}

OrderedJson ladder_to_json(const DifficultyLadder& ladder) {
  OrderedJson j;
  j["levels"] = OrderedJson::array();
  for (const auto& d : ladder.levels) j["levels"].push_back(difficulty_to_json(d));
  return j;
}

DifficultyLadder ladder_from_json(const OrderedJson& j) {
  DifficultyLadder ladder;
  for (const auto& lj : j.at("levels")) ladder.levels.push_back(difficulty_from_json(lj));
  ladder.validate();
  return ladder;
}

OrderedJson instance_to_json(const Instance& in) {
  OrderedJson j;
  j["schema_version"] = kInstanceSchemaVersion;
  j["instance_id"] = in.instance_id;
  j["seed"] = seed_to_string(in.seed);
  j["difficulty_level"] = in.difficulty_level;
  j["difficulty"] = difficulty_to_json(in.difficulty);
  j["attribute_dim"] = in.attribute_dim;
  j["rng_algorithm"] = in.rng_algorithm;

  j["items"] = OrderedJson::array();
  for (const auto& it : in.items) {
    OrderedJson ij;
    ij["id"] = it.id;
    ij["kind"] = to_string(it.kind);
    ij["base_attributes"] = it.base_attributes;
    j["items"].push_back(std::move(ij));
  }

  j["recipes"] = OrderedJson::array();
  for (const auto& r : in.recipes) {
    OrderedJson rj;
    rj["id"] = r.id;
    rj["kind"] = to_string(r.kind);
    rj["inputs"] = r.inputs;
    rj["output"] = r.output;
    rj["cost"] = r.cost;
    rj["effect"] = r.effect;
    j["recipes"].push_back(std::move(rj));
  }

  j["synergies"] = OrderedJson::array();
  for (const auto& [key, value] : in.synergies.entries()) {
    OrderedJson sj;
    sj["a"] = key.first;
    sj["b"] = key.second;
    sj["value"] = value;
    j["synergies"].push_back(std::move(sj));
  }

  j["constraints"] = OrderedJson::array();
  for (const auto& c : in.constraints) {
    OrderedJson cj;
    cj["attribute"] = c.attribute_index;
    cj["comparator"] = to_string(c.comparator);
    cj["threshold"] = c.threshold;
    j["constraints"].push_back(std::move(cj));
  }

  j["budget"] = in.budget;
  j["initial_inventory"] = in.initial_inventory;

  OrderedJson mj;
  mj["synergy_pairs"] = OrderedJson::array();
  for (const auto& [a, b] : in.mask.synergy_pairs) {
    mj["synergy_pairs"].push_back(OrderedJson::array({a, b}));
  }
  mj["recipe_effects"] = OrderedJson::array();
  for (const int rid : in.mask.recipe_effects) mj["recipe_effects"].push_back(rid);
  j["mask"] = std::move(mj);
  return j;
}

Instance instance_from_json(const OrderedJson& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != kInstanceSchemaVersion) {
    throw std::invalid_argument("unsupported instance schema_version " +
                                std::to_string(version));
  }
  Instance in;
  in.instance_id = j.at("instance_id").get<std::string>();
  in.seed = parse_seed(j.at("seed").get<std::string>());
  in.difficulty_level = j.at("difficulty_level").get<int>();
  in.difficulty = difficulty_from_json(j.at("difficulty"));
  in.attribute_dim = j.at("attribute_dim").get<int>();
  in.rng_algorithm = j.at("rng_algorithm").get<std::string>();

  for (const auto& ij : j.at("items")) {
    ItemSpec it;
    it.id = ij.at("id").get<int>();
    it.kind = item_kind_from(ij.at("kind").get<std::string>());
    it.base_attributes = ij.at("base_attributes").get<AttributeVector>();
    in.items.push_back(std::move(it));
  }

  for (const auto& rj : j.at("recipes")) {
    Recipe r;
    r.id = rj.at("id").get<int>();
    r.kind = recipe_kind_from(rj.at("kind").get<std::string>());
    r.inputs = rj.at("inputs").get<std::vector<int>>();
    r.output = rj.at("output").get<int>();
    r.cost = rj.at("cost").get<int>();
    r.effect = rj.at("effect").get<AttributeVector>();
    in.recipes.push_back(std::move(r));
  }

  for (const auto& sj : j.at("synergies")) {
    in.synergies.set(sj.at("a").get<int>(), sj.at("b").get<int>(),
                     sj.at("value").get<AttributeVector>());
  }

  for (const auto& cj : j.at("constraints")) {
    Constraint c;
    c.attribute_index = cj.at("attribute").get<int>();
    c.comparator = comparator_from(cj.at("comparator").get<std::string>());
    c.threshold = cj.at("threshold").get<double>();
    in.constraints.push_back(c);
  }

  in.budget = j.at("budget").get<int>();
  in.initial_inventory = j.at("initial_inventory").get<std::vector<int>>();

  const auto& mj = j.at("mask");
  for (const auto& pj : mj.at("synergy_pairs")) {
    in.mask.synergy_pairs.insert(
        SynergyTable::make_key(pj.at(0).get<int>(), pj.at(1).get<int>()));
  }
  for (const auto& rid : mj.at("recipe_effects")) {
    in.mask.recipe_effects.insert(rid.get<int>());
  }

  in.validate();
  return in;
}

OrderedJson action_to_json(const Action& a) {
  OrderedJson j;
  switch (a.kind) {
    case Action::Kind::Craft:
      j["kind"] = "craft";
      j["recipe"] = a.recipe_id;
      break;
    case Action::Kind::Refine:
      j["kind"] = "refine";
      j["recipe"] = a.recipe_id;
      if (!a.slots.empty()) j["slot"] = a.slots[0];
      break;
    case Action::Kind::Combine:
      j["kind"] = "combine";
      j["recipe"] = a.recipe_id;
      if (!a.slots.empty()) j["slots"] = a.slots;
      break;
    case Action::Kind::Test:
      j["kind"] = "test";
      if (a.probe == Action::Probe::Synergy) {
        j["synergy"] = OrderedJson::array({a.synergy_pair.first, a.synergy_pair.second});
      } else {
        j["recipe"] = a.recipe_id;
      }
      break;
    case Action::Kind::Repair:
      j["kind"] = "repair";
      j["remove"] = a.remove_module;
      j["insert"] = a.insert_module;
      break;
  }
  return j;
}

Action action_from_json(const OrderedJson& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "craft") return Action::craft(j.at("recipe").get<int>());
  if (kind == "refine") {
    return Action::refine(j.at("recipe").get<int>(),
                          j.contains("slot") ? j.at("slot").get<int>() : 0);
  }
  if (kind == "combine") {
    std::vector<int> slots;
    if (j.contains("slots")) slots = j.at("slots").get<std::vector<int>>();
    return Action::combine(j.at("recipe").get<int>(), std::move(slots));
  }
  if (kind == "test") {
    if (j.contains("synergy")) {
      const auto& p = j.at("synergy");
      return Action::test_synergy(p.at(0).get<int>(), p.at(1).get<int>());
    }
    return Action::test_recipe(j.at("recipe").get<int>());
  }
  if (kind == "repair") {
    return Action::repair(j.at("remove").get<int>(), j.at("insert").get<int>());
  }
  throw std::invalid_argument("unknown action kind: " + kind);
}

OrderedJson plan_to_json(const Plan& plan) {
  OrderedJson j;
  j["schema_version"] = kPlanSchemaVersion;
  j["actions"] = OrderedJson::array();
  for (const auto& a : plan.actions) j["actions"].push_back(action_to_json(a));
  return j;
}

Plan plan_from_json(const OrderedJson& j) {
  Plan p;
  for (const auto& aj : j.at("actions")) p.actions.push_back(action_from_json(aj));
  return p;
}

std::string dump_canonical(const OrderedJson& j) {
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ww
