#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ww/core/json_io.h"
#include "ww/sim/simulator.h"

namespace ww::metrics {

// Structural fingerprint of a solved episode: module multiset of the final
// artefact plus the executed action-kind skeleton (c/r/m/t/p).
struct Signature {
  std::vector<int> modules;  // sorted multiset
  std::string skeleton;

  auto operator<=>(const Signature&) const = default;
};

// Derived only from solved episodes; throws otherwise.
Signature signature_of(const sim::EpisodeResult& episode);

struct NoveltyBaseline {
  std::set<Signature> signatures;

  void fold(const std::vector<Signature>& batch);
};

struct EpisodeOutcome {
  bool solved = false;
  int steps_used = 0;
  int budget = 1;
  std::optional<Signature> signature;  // present for solved episodes
};

struct LevelRecord {
  int level = 0;
  std::vector<EpisodeOutcome> episodes;

  int n() const { return static_cast<int>(episodes.size()); }
  int successes() const;
};

struct PhaseResult {
  double phase_time = 1.0;
  std::string label;
  std::vector<LevelRecord> levels;
};

// Fraction of solved episodes; N = 0 is an undefined input.
double success_rate(const LevelRecord& record);

// Mean of (1 - steps/B) over solved episodes; absent when none solved.
std::optional<double> efficiency(const LevelRecord& record);

// Equal-weight blend of multiset Jaccard over modules and one minus the
// normalized skeleton edit distance. Symmetric, 1 on identical signatures.
double similarity(const Signature& a, const Signature& b, double module_weight = 0.5);

// Mean over solved episodes of 1 - max similarity to the baseline; an empty
// baseline scores 1. Absent when no episode solved.
std::optional<double> novelty(const LevelRecord& record, const NoveltyBaseline& baseline);

// Highest level whose success rate is >= tau, even past an intermediate dip;
// 0 when no level qualifies.
int pdc(const PhaseResult& phase, double tau);

// Endpoint slope of the ceiling over phase time: first and last phases only.
double cdr(const std::vector<std::pair<double, int>>& phase_ceilings);

// Extension, off by default everywhere: least-squares slope of the ceiling
// over all phases instead of the endpoint quotient.
double cdr_least_squares(const std::vector<std::pair<double, int>>& phase_ceilings);

struct FrontierCell {
  int level = 0;
  int n = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> efficiency;
  std::optional<double> mean_novelty;
};

struct FrontierPhase {
  double phase_time = 1.0;
  std::string label;
  int pdc = 0;
  std::optional<double> mean_novelty;  // pooled over the phase's solved episodes
  std::vector<FrontierCell> cells;
};

struct FrontierSummary {
  double tau = 0.7;
  std::vector<FrontierPhase> phases;
  std::optional<double> cdr;  // absent with fewer than two phases
};

// The data series behind the success-curve and ceiling/novelty figures. The
// novelty baseline starts empty and accumulates solved signatures from
// strictly earlier phases; within a phase every episode is scored against
// the frozen baseline before the batch is folded in.
FrontierSummary frontier_curves(const std::vector<PhaseResult>& phases, double tau);

OrderedJson frontier_summary_to_json(const FrontierSummary& summary);

// One row per (phase, level):
// phase_time,level,N,successes,success_rate,efficiency,mean_novelty
std::string frontier_summary_to_csv(const FrontierSummary& summary);

OrderedJson signature_to_json(const Signature& s);
Signature signature_from_json(const OrderedJson& j);

}  // namespace ww::metrics
