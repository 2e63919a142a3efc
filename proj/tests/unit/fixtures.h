#pragma once

#include "ww/core/types.h"

namespace ww::fixtures {

// Hand-built instance, small enough for exhaustive reasoning:
//   items: 0 raw_a, 1 raw_b, 2 module_x, 3 module_y, 4 module_z,
//          5 artefact, 6 spare intermediate
//   recipes (unit cost): r0 craft a->x (2,1,0,0)   r1 craft b->y (1,2,0,0)
//                        r2 combine x+y -> artefact  r3 craft a->z (3,0,0,0)
//                        r4 refine x -> spare (1,1,1,1)
//                        r5 combine x+z -> artefact
//   synergies: (x,y)=(1,0,0,0)  (y,z)=(0,1,0,0)
//   constraint: power >= 4; C=2; H=3; B=6
// Backbone r0,r1,r2 scores (4,3,0,0); r0,r3,r5 scores (5,1,0,0).
inline Instance tiny() {
  Instance in;
  in.instance_id = "fixture-tiny";
  in.seed = 1;
  in.difficulty_level = 1;
  in.difficulty = DifficultyVector{3, 1, 2, 0.0};
  in.attribute_dim = 4;
  in.rng_algorithm = "fixture";
  in.items = {
      {0, ItemKind::Raw, {0, 0, 0, 0}},          {1, ItemKind::Raw, {0, 0, 0, 0}},
      {2, ItemKind::Module, {0, 0, 0, 0}},       {3, ItemKind::Module, {0, 0, 0, 0}},
      {4, ItemKind::Module, {0, 0, 0, 0}},       {5, ItemKind::Intermediate, {0, 0, 0, 0}},
      {6, ItemKind::Intermediate, {0, 0, 0, 0}},
  };
  in.recipes = {
      {0, RecipeKind::Craft, {0}, 2, 1, {2, 1, 0, 0}},
      {1, RecipeKind::Craft, {1}, 3, 1, {1, 2, 0, 0}},
      {2, RecipeKind::Combine, {2, 3}, 5, 1, {0, 0, 0, 0}},
      {3, RecipeKind::Craft, {0}, 4, 1, {3, 0, 0, 0}},
      {4, RecipeKind::Refine, {2}, 6, 1, {1, 1, 1, 1}},
      {5, RecipeKind::Combine, {2, 4}, 5, 1, {0, 0, 0, 0}},
  };
  in.synergies.set(2, 3, {1, 0, 0, 0});
  in.synergies.set(3, 4, {0, 1, 0, 0});
  in.constraints = {{0, Comparator::GreaterEq, 4.0}};
  in.budget = 6;
  in.initial_inventory = {0, 0, 1};
  in.validate();
  return in;
}

// tiny() with one synergy and a quarter of the parameters hidden:
// maskable = 1 synergy + 6 recipes = 7.
inline Instance tiny_masked() {
  Instance in = tiny();
  in.instance_id = "fixture-tiny-masked";
  in.synergies = SynergyTable{};
  in.synergies.set(2, 3, {1, 0, 0, 0});
  in.difficulty.ambiguity = 0.25;
  in.mask.synergy_pairs.insert({2, 3});
  in.mask.recipe_effects.insert(0);
  in.validate();
  return in;
}

// No constraints, no module requirement: the empty plan solves it.
inline Instance vacuous() {
  Instance in = tiny();
  in.instance_id = "fixture-vacuous";
  in.difficulty = DifficultyVector{1, 0, 0, 0.0};
  in.constraints.clear();
  in.validate();
  return in;
}

}  // namespace ww::fixtures
