#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ww {

// Attribute vectors are plain value sequences; dimension is fixed per
// instance (default 4: power, stability, weight, aesthetics).
using AttributeVector = std::vector<double>;

inline constexpr int kDefaultAttributeDim = 4;
inline constexpr std::array<const char*, 4> kAttributeNames = {
    "power", "stability", "weight", "aesthetics"};

AttributeVector zero_attributes(int dim);
void add_in_place(AttributeVector& dst, const AttributeVector& src);
bool attributes_finite(const AttributeVector& v);

enum class ItemKind { Raw, Intermediate, Module };
enum class RecipeKind { Craft, Refine, Combine };
enum class Comparator { GreaterEq, LessEq };

const char* to_string(ItemKind k);
const char* to_string(RecipeKind k);
const char* to_string(Comparator c);

struct ItemSpec {
  int id = 0;
  ItemKind kind = ItemKind::Raw;
  AttributeVector base_attributes;
};

struct Recipe {
  int id = 0;
  RecipeKind kind = RecipeKind::Craft;
  std::vector<int> inputs;  // item ids, kept sorted; duplicates allowed (multiset)
  int output = 0;
  int cost = 1;
  AttributeVector effect;  // delta applied to the output's base attributes
};

// Symmetric map over unordered Module-id pairs. Absent pair means zero synergy.
class SynergyTable {
 public:
  using Key = std::pair<int, int>;

  static Key make_key(int a, int b);

  void set(int a, int b, AttributeVector value);
  const AttributeVector* find(int a, int b) const;
  const std::map<Key, AttributeVector>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<Key, AttributeVector> entries_;
};

struct Constraint {
  int attribute_index = 0;
  Comparator comparator = Comparator::GreaterEq;
  double threshold = 0.0;
};

struct DifficultyVector {
  int horizon = 1;           // H: minimum total action cost of any solution
  int constraint_count = 0;  // K
  int required_modules = 0;  // C: distinct functional modules in the artefact
  double ambiguity = 0.0;    // A in [0,1]
};

struct DifficultyLadder {
  std::vector<DifficultyVector> levels;  // indexed 1..size() externally

  int size() const { return static_cast<int>(levels.size()); }
  const DifficultyVector& at(int level) const;  // 1-based, throws ConfigError
  void validate() const;  // strictly increasing between consecutive levels
};

struct AmbiguityMask {
  std::set<std::pair<int, int>> synergy_pairs;  // normalized (lo, hi)
  std::set<int> recipe_effects;                 // recipe ids

  std::size_t size() const { return synergy_pairs.size() + recipe_effects.size(); }
  bool empty() const { return synergy_pairs.empty() && recipe_effects.empty(); }
  bool contains_synergy(int a, int b) const;
  bool contains_recipe(int id) const;
};

struct Instance {
  std::string instance_id;
  std::uint64_t seed = 0;
  int difficulty_level = 0;
  DifficultyVector difficulty;
  int attribute_dim = kDefaultAttributeDim;
  std::string rng_algorithm;
  std::vector<ItemSpec> items;    // dense ids [0, items.size())
  std::vector<Recipe> recipes;    // dense ids [0, recipes.size())
  SynergyTable synergies;
  std::vector<Constraint> constraints;
  int budget = 1;                      // B
  std::vector<int> initial_inventory;  // raw item ids, sorted, multiplicity allowed
  AmbiguityMask mask;

  const ItemSpec* find_item(int id) const;
  const Recipe* find_recipe(int id) const;
  std::vector<int> module_item_ids() const;
  // Entries hideable by the ambiguity mask: synergy table entries + recipe effects.
  int maskable_count() const;
  // Structural invariant check; throws std::invalid_argument with a reason.
  void validate() const;
};

struct Action {
  enum class Kind { Craft, Refine, Combine, Test, Repair };
  enum class Probe { None, Synergy, RecipeEffect };

  Kind kind = Kind::Craft;
  int recipe_id = -1;        // craft/refine/combine, and test-on-recipe
  std::vector<int> slots;    // per-input instance choice; empty means all zeros
  Probe probe = Probe::None;
  std::pair<int, int> synergy_pair{-1, -1};  // test-on-synergy, normalized
  int remove_module = -1;    // repair
  int insert_module = -1;    // repair

  static Action craft(int recipe);
  static Action refine(int recipe, int slot = 0);
  static Action combine(int recipe, std::vector<int> slots = {});
  static Action test_synergy(int a, int b);
  static Action test_recipe(int recipe);
  static Action repair(int remove_module, int insert_module);
};

// Total deterministic ordering key. Ties between candidate actions are always
// broken by the lowest key; also used for lexicographic plan enumeration.
std::string canonical_key(const Action& a);
bool action_equal(const Action& a, const Action& b);

// Skeleton symbol: c/r/m/t/p for craft/refine/combine/test/repair.
char skeleton_char(Action::Kind k);

struct Plan {
  std::vector<Action> actions;
};

// ---- core operations ----

// base + sum(part_attrs) + sum of synergy terms over unordered pairs of
// distinct module ids present in part_modules. Order-independent.
AttributeVector aggregate_attributes(const std::vector<int>& part_modules,
                                     const std::vector<AttributeVector>& part_attrs,
                                     const AttributeVector& base,
                                     const SynergyTable& synergies);

// True iff every constraint holds (inclusive comparisons) and
// distinct_modules >= required_modules.
bool check_constraints(const AttributeVector& attrs, int distinct_modules,
                       const std::vector<Constraint>& constraints,
                       int required_modules);

// Recipe actions cost the recipe's cost; Test and Repair cost 1.
// Throws InvalidActionError for an unknown recipe id.
int action_cost(const Action& action, const std::vector<Recipe>& recipes);

int plan_cost(const Plan& plan, const Instance& instance);

// Items as nodes, recipes as hyperedges (input -> output). True iff no item
// is an ancestor of itself.
bool recipe_graph_is_acyclic(const std::vector<ItemSpec>& items,
                             const std::vector<Recipe>& recipes);

}  // namespace ww
