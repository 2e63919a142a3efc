#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ww/core/json_io.h"
#include "ww/core/rng.h"
#include "ww/core/types.h"

namespace ww::genesis {

struct GeneratorConfig {
  int raw_items = 4;
  int intermediate_items = 8;
  int module_items = 6;
  int deceptive_branches = 2;
  double synergy_density = 0.35;
  int cost_min = 1;
  int cost_max = 2;
  int budget_slack = 6;  // B = H + slack
  int attribute_dim = kDefaultAttributeDim;
  std::string rng_algorithm = kRngAlgorithm;
};

// Generation by-products used by validation and tests; never serialized into
// the instance itself.
struct GenerationAudit {
  Plan backbone;
  std::vector<Plan> deceptive_plans;  // one per branch, runnable from the initial state
  AttributeVector achieved_attributes;
  std::vector<int> backbone_modules;
  int backbone_recipe_count = 0;
};

struct ValidationReport {
  std::optional<int> oracle_min_cost;  // absent means "exceeded-cap"
  bool exact_h_match = false;
  bool shorter_path_exists = false;
  bool solvable_within_budget = false;
  bool search_complete = false;  // false when the oracle node budget was hit
  long nodes_expanded = 0;
};

// Fully deterministic in (seed, level, ladder, config). Guarantees by
// construction: a backbone plan of total action cost exactly H solving all
// constraints with exactly C distinct modules; no plan of cost < H can
// satisfy the power constraint; floor(A * maskable) parameters hidden.
Instance generate_instance(std::uint64_t seed, int level, const DifficultyLadder& ladder,
                           const GeneratorConfig& config);

std::pair<Instance, GenerationAudit> generate_with_audit(std::uint64_t seed, int level,
                                                         const DifficultyLadder& ladder,
                                                         const GeneratorConfig& config);

// Staged operations, exposed for direct testing. generate_with_audit runs
// build_backbone -> add_deception -> id shuffle -> apply_ambiguity.
struct BackboneResult {
  Instance instance;  // constraints set, no deception, no mask
  GenerationAudit audit;
};

BackboneResult build_backbone(const DifficultyVector& difficulty,
                              const GeneratorConfig& config, Rng& rng);

// Adds deceptive branches (locally attractive chains whose terminal artefact
// undershoots the binding power threshold) plus filler items and recipes up
// to the configured catalog sizes.
Instance add_deception(Instance instance, Rng& rng, const GeneratorConfig& config,
                       GenerationAudit* audit);

// Hides floor(ambiguity * maskable) parameters, selected uniformly without
// replacement. Underlying values are untouched; only observability changes.
Instance apply_ambiguity(Instance instance, double ambiguity, Rng& rng);

ValidationReport validate_instance(const Instance& instance, int cost_cap,
                                   long node_budget = 10'000'000);

OrderedJson validation_report_to_json(const ValidationReport& report);

// Power accumulates at most kPowerRate per unit of action cost; the backbone
// achieves equality, which is what pins the oracle minimum to exactly H.
inline constexpr double kPowerRate = 2.0;

}  // namespace ww::genesis
