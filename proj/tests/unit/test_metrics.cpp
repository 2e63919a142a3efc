#include <doctest.h>

#include <cmath>

#include "ww/core/errors.h"
#include "ww/core/rng.h"
#include "ww/metrics/metrics.h"

using namespace ww;
using metrics::EpisodeOutcome;
using metrics::LevelRecord;
using metrics::NoveltyBaseline;
using metrics::PhaseResult;
using metrics::Signature;

namespace {

LevelRecord record_with(int level, int n, int solved, int steps = 5, int budget = 10) {
  LevelRecord r;
  r.level = level;
  for (int i = 0; i < n; ++i) {
    EpisodeOutcome e;
    e.solved = i < solved;
    e.steps_used = steps;
    e.budget = budget;
    if (e.solved) e.signature = Signature{{1, 2}, "ccm"};
    r.episodes.push_back(std::move(e));
  }
  return r;
}

PhaseResult phase_with_rates(double t, const std::vector<double>& rates, int n = 10) {
  PhaseResult p;
  p.phase_time = t;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    p.levels.push_back(record_with(static_cast<int>(i + 1), n,
                                   static_cast<int>(std::lround(rates[i] * n))));
  }
  return p;
}

}  // namespace

TEST_CASE("success rate: direct counts") {
  CHECK(metrics::success_rate(record_with(1, 10, 7)) == 0.7);
  CHECK(metrics::success_rate(record_with(1, 10, 10)) == 1.0);
  CHECK(metrics::success_rate(record_with(1, 10, 0)) == 0.0);
  CHECK_THROWS_AS(metrics::success_rate(LevelRecord{}), std::invalid_argument);
}

TEST_CASE("efficiency: conditional on success") {
  CHECK(*metrics::efficiency(record_with(1, 5, 1, 10, 10)) == 0.0);  // steps == B
  CHECK(*metrics::efficiency(record_with(1, 5, 1, 6, 10)) == 0.4);   // 1 - 6/10
  CHECK_FALSE(metrics::efficiency(record_with(1, 5, 0)).has_value());
}

TEST_CASE("similarity: spec anchors") {
  const Signature a{{1, 2}, "ccm"};
  CHECK(metrics::similarity(a, a) == 1.0);

  const Signature b{{3, 4}, "ppp"};  // disjoint modules, maximally distant skeleton
  CHECK(metrics::similarity(a, b) == 0.0);

  const Signature c{{1, 3}, "ccm"};  // Jaccard 1/3, identical skeletons
  const double expected = 0.5 * (1.0 / 3.0) + 0.5;
  CHECK(metrics::similarity(a, c) == expected);
  CHECK(metrics::similarity(a, c) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("similarity: symmetric, reflexive, in range") {
  Rng rng(31);
  const std::string symbols = "crmtp";
  for (int trial = 0; trial < 300; ++trial) {
    auto random_sig = [&]() {
      Signature s;
      const int m = rng.range(0, 4);
      for (int i = 0; i < m; ++i) s.modules.push_back(rng.range(0, 5));
      std::sort(s.modules.begin(), s.modules.end());
      const int k = rng.range(0, 6);
      for (int i = 0; i < k; ++i) {
        s.skeleton.push_back(symbols[static_cast<std::size_t>(rng.range(0, 4))]);
      }
      return s;
    };
    const Signature a = random_sig();
    const Signature b = random_sig();
    const double ab = metrics::similarity(a, b);
    CHECK(ab == metrics::similarity(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(metrics::similarity(a, a) == 1.0);
  }
}

TEST_CASE("novelty: spec anchors") {
  NoveltyBaseline empty;
  LevelRecord rec = record_with(1, 4, 2);
  CHECK(*metrics::novelty(rec, empty) == 1.0);

  NoveltyBaseline same;
  same.fold({Signature{{1, 2}, "ccm"}});
  CHECK(*metrics::novelty(rec, same) == 0.0);

  NoveltyBaseline third;
  third.fold({Signature{{1, 3}, "ccm"}});  // similarity 2/3 to the episodes
  const double expected = 1.0 - (0.5 * (1.0 / 3.0) + 0.5);
  CHECK(*metrics::novelty(rec, third) == expected);

  CHECK_FALSE(metrics::novelty(record_with(1, 4, 0), empty).has_value());
}

TEST_CASE("novelty never increases as the baseline grows") {
  Rng rng(17);
  LevelRecord rec = record_with(1, 6, 4);
  NoveltyBaseline baseline;
  double prev = *metrics::novelty(rec, baseline);
  for (int step = 0; step < 20; ++step) {
    Signature s;
    const int m = rng.range(0, 3);
    for (int i = 0; i < m; ++i) s.modules.push_back(rng.range(0, 4));
    std::sort(s.modules.begin(), s.modules.end());
    for (int i = 0; i < rng.range(0, 4); ++i) s.skeleton.push_back('c');
    baseline.fold({s});
    const double now = *metrics::novelty(rec, baseline);
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("pdc: threshold is inclusive and keeps sup semantics") {
  CHECK(metrics::pdc(phase_with_rates(1, {1.0, 0.9, 0.7, 0.4}), 0.7) == 3);
  CHECK(metrics::pdc(phase_with_rates(1, {0.5, 0.4}), 0.7) == 0);
  CHECK(metrics::pdc(phase_with_rates(1, {0.9, 0.6, 0.8, 0.2}), 0.7) == 3);
}

TEST_CASE("pdc is monotone non-increasing in tau") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> rates;
    for (int l = 0; l < 5; ++l) rates.push_back(rng.range(0, 10) / 10.0);
    const PhaseResult phase = phase_with_rates(1, rates);
    double tau1 = rng.range(1, 10) / 10.0;
    double tau2 = rng.range(1, 10) / 10.0;
    if (tau1 > tau2) std::swap(tau1, tau2);
    CHECK(metrics::pdc(phase, tau1) >= metrics::pdc(phase, tau2));
  }
}

TEST_CASE("cdr: endpoint slope") {
  CHECK(metrics::cdr({{1, 2}, {5, 6}}) == 1.0);
  CHECK(metrics::cdr({{1, 3}, {2, 5}, {5, 3}}) == 0.0);  // endpoints only
  CHECK(metrics::cdr({{1, 4}, {3, 2}}) == -1.0);
  CHECK_THROWS_AS(metrics::cdr({{1, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(metrics::cdr({{2, 4}, {2, 5}}), std::invalid_argument);
}

TEST_CASE("cdr least-squares extension agrees with the quotient on a line") {
  CHECK(metrics::cdr_least_squares({{1, 2}, {2, 3}, {3, 4}}) == 1.0);
  // Endpoint rule ignores the middle; the regression does not.
  CHECK(metrics::cdr({{1, 0}, {2, 9}, {3, 0}}) == 0.0);
  CHECK(metrics::cdr_least_squares({{1, 0}, {2, 9}, {3, 0}}) == 0.0);
  CHECK(metrics::cdr_least_squares({{1, 0}, {2, 8}, {3, 4}}) == 2.0);
  CHECK_THROWS_AS(metrics::cdr_least_squares({{1, 2}}), std::invalid_argument);
}

TEST_CASE("cdr sign flips when phase times are negated and reversed") {
  const std::vector<std::pair<double, int>> phases{{1, 2}, {2, 4}, {4, 5}};
  std::vector<std::pair<double, int>> mirrored;
  for (auto it = phases.rbegin(); it != phases.rend(); ++it) {
    mirrored.emplace_back(-it->first, it->second);
  }
  CHECK(metrics::cdr(mirrored) == -metrics::cdr(phases));
}

TEST_CASE("frontier curves: single phase has no drift rate") {
  const metrics::FrontierSummary s =
      metrics::frontier_curves({phase_with_rates(1, {1.0, 0.5})}, 0.7);
  CHECK_FALSE(s.cdr.has_value());
  CHECK(s.phases.size() == 1);
  CHECK(s.phases[0].pdc == 1);
  // First phase scores against an empty baseline.
  CHECK(*s.phases[0].mean_novelty == 1.0);
}

TEST_CASE("frontier curves: novelty hits zero once the structure repeats") {
  PhaseResult p1 = phase_with_rates(1, {1.0});
  PhaseResult p2 = phase_with_rates(2, {1.0});
  const metrics::FrontierSummary s = metrics::frontier_curves({p1, p2}, 0.7);
  REQUIRE(s.phases.size() == 2);
  CHECK(*s.phases[0].mean_novelty == 1.0);
  CHECK(*s.phases[1].mean_novelty == 0.0);
  // The emitted novelty series has one entry per phase.
  CHECK(metrics::frontier_summary_to_json(s).at("novelty_series").size() == 2);
}

TEST_CASE("frontier curves: mismatched phase shapes are config errors") {
  CHECK_THROWS_AS(
      metrics::frontier_curves({phase_with_rates(1, {1.0, 0.5}), phase_with_rates(2, {1.0})},
                               0.7),
      ConfigError);
}

TEST_CASE("metric outputs stay in range over random records") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    LevelRecord rec;
    rec.level = 1;
    const int n = rng.range(1, 8);
    for (int i = 0; i < n; ++i) {
      EpisodeOutcome e;
      e.solved = rng.chance(0.5);
      e.budget = rng.range(1, 12);
      e.steps_used = rng.range(0, e.budget);
      if (e.solved) {
        Signature s;
        for (int m = 0; m < rng.range(0, 3); ++m) s.modules.push_back(rng.range(0, 5));
        std::sort(s.modules.begin(), s.modules.end());
        for (int k = 0; k < rng.range(0, 5); ++k) s.skeleton.push_back('c');
        e.signature = std::move(s);
      }
      rec.episodes.push_back(std::move(e));
    }
    const double sp = metrics::success_rate(rec);
    CHECK(sp >= 0.0);
    CHECK(sp <= 1.0);
    if (const auto eff = metrics::efficiency(rec)) {
      CHECK(*eff >= 0.0);
      CHECK(*eff <= 1.0);
    }
    NoveltyBaseline baseline;
    baseline.fold({Signature{{1}, "c"}});
    if (const auto nov = metrics::novelty(rec, baseline)) {
      CHECK(*nov >= 0.0);
      CHECK(*nov <= 1.0);
    }
  }
}

TEST_CASE("csv header and shape") {
  const metrics::FrontierSummary s =
      metrics::frontier_curves({phase_with_rates(1, {0.5, 0.0})}, 0.7);
  const std::string csv = metrics::frontier_summary_to_csv(s);
  CHECK(csv.rfind("phase_time,level,N,successes,success_rate,efficiency,mean_novelty\n", 0) ==
        0);
  // Level 2 has zero successes: efficiency and novelty cells stay empty.
  CHECK(csv.find("1.0,2,10,0,0.0,,\n") != std::string::npos);
}
