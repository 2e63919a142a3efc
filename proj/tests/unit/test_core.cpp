#include <doctest.h>

#include <algorithm>

#include "ww/core/errors.h"
#include "ww/core/json_io.h"
#include "ww/core/rng.h"
#include "ww/core/types.h"

using namespace ww;

namespace {

SynergyTable one_pair_table(int a, int b, AttributeVector v) {
  SynergyTable t;
  t.set(a, b, std::move(v));
  return t;
}

}  // namespace

TEST_CASE("aggregate_attributes: additive plus pairwise synergy") {
  const SynergyTable syn = one_pair_table(1, 2, {1, 0, 0, 0});
  const AttributeVector out = aggregate_attributes(
      {1, 2}, {{2, 1, 0, 0}, {1, 2, 0, 0}}, {0, 0, 0, 0}, syn);
  CHECK(out == AttributeVector{4, 3, 0, 0});
}

TEST_CASE("aggregate_attributes: empty parts is the identity") {
  const SynergyTable syn = one_pair_table(1, 2, {5, 5, 5, 5});
  const AttributeVector base{3, 1, 4, 1};
  CHECK(aggregate_attributes({}, {}, base, syn) == base);
}

TEST_CASE("aggregate_attributes: duplicate module id has no self-synergy") {
  const SynergyTable syn = one_pair_table(1, 2, {9, 9, 9, 9});
  const AttributeVector out = aggregate_attributes(
      {1, 1}, {{2, 1, 0, 0}, {2, 1, 0, 0}}, {0, 0, 0, 0}, syn);
  CHECK(out == AttributeVector{4, 2, 0, 0});
}

TEST_CASE("aggregate_attributes: permutation invariant, bitwise") {
  Rng rng(7);
  SynergyTable syn;
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) {
      if (rng.chance(0.6)) {
        syn.set(a, b, {double(rng.range(-3, 3)), double(rng.range(-3, 3)),
                       double(rng.range(-3, 3)), double(rng.range(-3, 3))});
      }
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> modules;
    std::vector<AttributeVector> attrs;
    const int k = rng.range(0, 6);
    for (int i = 0; i < k; ++i) {
      modules.push_back(rng.range(0, 4));
      attrs.push_back({double(rng.range(0, 5)), double(rng.range(0, 5)),
                       double(rng.range(0, 5)), double(rng.range(0, 5))});
    }
    const AttributeVector base{1, 2, 3, 4};
    const AttributeVector expected = aggregate_attributes(modules, attrs, base, syn);

    std::vector<std::size_t> order(modules.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<int> m2;
    std::vector<AttributeVector> a2;
    for (const std::size_t i : order) {
      m2.push_back(modules[i]);
      a2.push_back(attrs[i]);
    }
    CHECK(aggregate_attributes(m2, a2, base, syn) == expected);
  }
}

TEST_CASE("aggregate_attributes: zero synergy table is plain summation") {
  Rng rng(11);
  const SynergyTable empty;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> modules;
    std::vector<AttributeVector> attrs;
    AttributeVector expected{0, 0, 0, 0};
    const int k = rng.range(0, 5);
    for (int i = 0; i < k; ++i) {
      modules.push_back(rng.range(0, 9));
      AttributeVector v{double(rng.range(-4, 4)), double(rng.range(-4, 4)),
                        double(rng.range(-4, 4)), double(rng.range(-4, 4))};
      add_in_place(expected, v);
      attrs.push_back(std::move(v));
    }
    CHECK(aggregate_attributes(modules, attrs, {0, 0, 0, 0}, empty) == expected);
  }
}

TEST_CASE("aggregate_attributes: dimension mismatch is a contract violation") {
  const SynergyTable empty;
  CHECK_THROWS_AS(aggregate_attributes({}, {{1, 2}}, {0, 0, 0, 0}, empty),
                  std::invalid_argument);
}

TEST_CASE("check_constraints: inclusive boundary") {
  const std::vector<Constraint> cs{{0, Comparator::GreaterEq, 5.0}};
  CHECK(check_constraints({5, 3, 0, 0}, 2, cs, 2));
  CHECK_FALSE(check_constraints({4.999, 3, 0, 0}, 2, cs, 2));
}

TEST_CASE("check_constraints: vacuous constraints") {
  CHECK(check_constraints({-10, -10, -10, -10}, 0, {}, 0));
}

TEST_CASE("check_constraints: module count gate") {
  CHECK_FALSE(check_constraints({9, 9, 9, 9}, 1, {}, 2));
}

TEST_CASE("check_constraints: adding a constraint never flips false to true") {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    AttributeVector attrs{double(rng.range(-5, 5)), double(rng.range(-5, 5)),
                          double(rng.range(-5, 5)), double(rng.range(-5, 5))};
    std::vector<Constraint> cs;
    const int k = rng.range(0, 4);
    const int required = rng.range(0, 3);
    bool prev = check_constraints(attrs, 3, cs, required);
    for (int i = 0; i < k; ++i) {
      cs.push_back({rng.range(0, 3),
                    rng.chance(0.5) ? Comparator::GreaterEq : Comparator::LessEq,
                    double(rng.range(-5, 5))});
      const bool now = check_constraints(attrs, 3, cs, required);
      CHECK((prev || !now));  // false stays false
      prev = now;
    }
  }
}

TEST_CASE("action_cost: recipes map to their cost, test and repair to 1") {
  std::vector<Recipe> recipes;
  recipes.push_back(Recipe{0, RecipeKind::Craft, {0}, 1, 2, {0, 0, 0, 0}});
  CHECK(action_cost(Action::craft(0), recipes) == 2);
  CHECK(action_cost(Action::test_synergy(4, 3), recipes) == 1);
  CHECK(action_cost(Action::repair(1, 2), recipes) == 1);
  CHECK_THROWS_AS(action_cost(Action::craft(9), recipes), InvalidActionError);
}

TEST_CASE("recipe_graph_is_acyclic detects cycles") {
  std::vector<ItemSpec> items;
  for (int i = 0; i < 3; ++i) {
    items.push_back(ItemSpec{i, i == 0 ? ItemKind::Raw : ItemKind::Intermediate,
                             {0, 0, 0, 0}});
  }
  std::vector<Recipe> recipes;
  recipes.push_back(Recipe{0, RecipeKind::Craft, {0}, 1, 1, {0, 0, 0, 0}});
  recipes.push_back(Recipe{1, RecipeKind::Refine, {1}, 2, 1, {0, 0, 0, 0}});
  CHECK(recipe_graph_is_acyclic(items, recipes));
  recipes.push_back(Recipe{2, RecipeKind::Refine, {2}, 1, 1, {0, 0, 0, 0}});
  CHECK_FALSE(recipe_graph_is_acyclic(items, recipes));
}

TEST_CASE("difficulty ladder validation") {
  DifficultyLadder good;
  good.levels = {{2, 1, 1, 0.0}, {3, 1, 1, 0.0}, {3, 2, 1, 0.5}};
  CHECK_NOTHROW(good.validate());

  DifficultyLadder equal;
  equal.levels = {{2, 1, 1, 0.0}, {2, 1, 1, 0.0}};
  CHECK_THROWS_AS(equal.validate(), ConfigError);

  DifficultyLadder regressing;
  regressing.levels = {{3, 2, 1, 0.0}, {4, 1, 1, 0.0}};
  CHECK_THROWS_AS(regressing.validate(), ConfigError);
}

TEST_CASE("canonical action keys give a stable total order") {
  CHECK(canonical_key(Action::craft(3)) == "craft 00003");
  CHECK(canonical_key(Action::combine(7, {0, 1})) < canonical_key(Action::craft(0)));
  CHECK(canonical_key(Action::test_recipe(2)) < canonical_key(Action::test_synergy(0, 1)));
  CHECK(skeleton_char(Action::Kind::Combine) == 'm');
  CHECK(skeleton_char(Action::Kind::Repair) == 'p');
}

TEST_CASE("seed strings survive the 64-bit round trip") {
  const std::uint64_t big = 18446744073709551615ull;
  CHECK(parse_seed(seed_to_string(big)) == big);
  CHECK_THROWS_AS(parse_seed("12x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed(""), std::invalid_argument);
}

TEST_CASE("action JSON round trip") {
  const std::vector<Action> actions = {
      Action::craft(1),           Action::refine(2, 1),    Action::combine(3, {1, 0}),
      Action::test_synergy(9, 4), Action::test_recipe(5),  Action::repair(4, 6),
  };
  for (const Action& a : actions) {
    const Action back = action_from_json(action_to_json(a));
    CHECK(canonical_key(back) == canonical_key(a));
  }
}
