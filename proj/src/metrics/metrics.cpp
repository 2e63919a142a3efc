#include "ww/metrics/metrics.h"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ww/core/errors.h"

namespace ww::metrics {

Signature signature_of(const sim::EpisodeResult& episode) {
  if (!episode.solved) throw std::invalid_argument("signature_of requires a solved episode");
  Signature sig;
  sig.modules = episode.final_modules;
  for (const auto& [action, outcome] : episode.trace) {
    sig.skeleton.push_back(skeleton_char(action.kind));
  }
  return sig;
}

void NoveltyBaseline::fold(const std::vector<Signature>& batch) {
  for (const auto& s : batch) signatures.insert(s);
}

int LevelRecord::successes() const {
  int c = 0;
  for (const auto& e : episodes) {
    if (e.solved) ++c;
  }
  return c;
}

double success_rate(const LevelRecord& record) {
  if (record.n() == 0) throw std::invalid_argument("success_rate over zero episodes");
  return static_cast<double>(record.successes()) / static_cast<double>(record.n());
}

std::optional<double> efficiency(const LevelRecord& record) {
  double sum = 0.0;
  int count = 0;
  for (const auto& e : record.episodes) {
    if (!e.solved) continue;
    sum += 1.0 - static_cast<double>(e.steps_used) / static_cast<double>(e.budget);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

namespace {

double multiset_jaccard(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::map<int, std::pair<int, int>> counts;
  for (const int x : a) counts[x].first += 1;
  for (const int x : b) counts[x].second += 1;
  int inter = 0;
  int uni = 0;
  for (const auto& [id, c] : counts) {
    inter += std::min(c.first, c.second);
    uni += std::max(c.first, c.second);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

int levenshtein(const std::string& a, const std::string& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

double similarity(const Signature& a, const Signature& b, double module_weight) {
  const double jac = multiset_jaccard(a.modules, b.modules);
  const std::size_t longest = std::max(a.skeleton.size(), b.skeleton.size());
  const double edit =
      longest == 0 ? 0.0
                   : static_cast<double>(levenshtein(a.skeleton, b.skeleton)) /
                         static_cast<double>(longest);
  return module_weight * jac + (1.0 - module_weight) * (1.0 - edit);
}

std::optional<double> novelty(const LevelRecord& record, const NoveltyBaseline& baseline) {
  double sum = 0.0;
  int count = 0;
  for (const auto& e : record.episodes) {
    if (!e.solved || !e.signature) continue;
    double max_sim = 0.0;  // empty baseline: novelty 1 by convention
    for (const auto& b : baseline.signatures) {
      max_sim = std::max(max_sim, similarity(*e.signature, b));
    }
    sum += 1.0 - max_sim;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

int pdc(const PhaseResult& phase, double tau) {
  if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("tau outside (0,1]");
  int highest = 0;
  for (const auto& level : phase.levels) {
    if (level.n() == 0) throw std::invalid_argument("pdc needs rates for every level");
    if (success_rate(level) >= tau) highest = std::max(highest, level.level);
  }
  return highest;
}

double cdr(const std::vector<std::pair<double, int>>& phase_ceilings) {
  if (phase_ceilings.size() < 2) {
    throw std::invalid_argument("cdr needs at least two phases");
  }
  const auto& [t1, c1] = phase_ceilings.front();
  const auto& [tn, cn] = phase_ceilings.back();
  if (tn == t1) throw std::invalid_argument("cdr with equal endpoint times");
  return static_cast<double>(cn - c1) / (tn - t1);
}

double cdr_least_squares(const std::vector<std::pair<double, int>>& phase_ceilings) {
  if (phase_ceilings.size() < 2) {
    throw std::invalid_argument("cdr needs at least two phases");
  }
  double mean_t = 0.0;
  double mean_c = 0.0;
  for (const auto& [t, c] : phase_ceilings) {
    mean_t += t;
    mean_c += c;
  }
  mean_t /= static_cast<double>(phase_ceilings.size());
  mean_c /= static_cast<double>(phase_ceilings.size());
  double num = 0.0;
  double den = 0.0;
  for (const auto& [t, c] : phase_ceilings) {
    num += (t - mean_t) * (c - mean_c);
    den += (t - mean_t) * (t - mean_t);
  }
  if (den == 0.0) throw std::invalid_argument("cdr with equal phase times");
  return num / den;
}

FrontierSummary frontier_curves(const std::vector<PhaseResult>& phases, double tau) {
  if (phases.empty()) throw ConfigError("frontier_curves with no phases");
  const auto& first = phases.front();
  for (const auto& p : phases) {
    if (p.levels.size() != first.levels.size()) {
      throw ConfigError("phases disagree on ladder size");
    }
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
      if (p.levels[i].level != first.levels[i].level ||
          p.levels[i].n() != first.levels[i].n()) {
        throw ConfigError("phases disagree on levels or instance counts");
      }
    }
  }

  FrontierSummary summary;
  summary.tau = tau;

  NoveltyBaseline baseline;
  std::vector<std::pair<double, int>> ceilings;
  for (const auto& phase : phases) {
    FrontierPhase fp;
    fp.phase_time = phase.phase_time;
    fp.label = phase.label;
    fp.pdc = pdc(phase, tau);
    ceilings.emplace_back(phase.phase_time, fp.pdc);

    double pooled_sum = 0.0;
    int pooled_count = 0;
    std::vector<Signature> batch;
    for (const auto& level : phase.levels) {
      FrontierCell cell;
      cell.level = level.level;
      cell.n = level.n();
      cell.successes = level.successes();
      cell.success_rate = success_rate(level);
      cell.efficiency = efficiency(level);
      cell.mean_novelty = novelty(level, baseline);
      if (cell.mean_novelty) {
        pooled_sum += *cell.mean_novelty * cell.successes;
        pooled_count += cell.successes;
      }
      fp.cells.push_back(std::move(cell));
      for (const auto& e : level.episodes) {
        if (e.solved && e.signature) batch.push_back(*e.signature);
      }
    }
    if (pooled_count > 0) fp.mean_novelty = pooled_sum / pooled_count;
    summary.phases.push_back(std::move(fp));

    baseline.fold(batch);  // strictly-earlier-phase accumulation
  }

  if (ceilings.size() >= 2 && ceilings.back().first != ceilings.front().first) {
    summary.cdr = cdr(ceilings);
  }
  return summary;
}

OrderedJson signature_to_json(const Signature& s) {
  OrderedJson j;
  j["modules"] = s.modules;
  j["skeleton"] = s.skeleton;
  return j;
}

Signature signature_from_json(const OrderedJson& j) {
  Signature s;
  s.modules = j.at("modules").get<std::vector<int>>();
  s.skeleton = j.at("skeleton").get<std::string>();
  return s;
}

OrderedJson frontier_summary_to_json(const FrontierSummary& summary) {
  OrderedJson j;
  j["tau"] = summary.tau;
  j["pdc_per_phase"] = OrderedJson::array();
  j["novelty_series"] = OrderedJson::array();
  j["curves"] = OrderedJson::array();
  for (const auto& p : summary.phases) {
    j["pdc_per_phase"].push_back(p.pdc);
    j["novelty_series"].push_back(p.mean_novelty ? OrderedJson(*p.mean_novelty)
                                                 : OrderedJson(nullptr));
    OrderedJson pj;
    pj["phase_time"] = p.phase_time;
    pj["label"] = p.label;
    pj["pdc"] = p.pdc;
    pj["levels"] = OrderedJson::array();
    for (const auto& c : p.cells) {
      OrderedJson cj;
      cj["level"] = c.level;
      cj["n"] = c.n;
      cj["successes"] = c.successes;
      cj["success_rate"] = c.success_rate;
      cj["efficiency"] = c.efficiency ? OrderedJson(*c.efficiency) : OrderedJson(nullptr);
      cj["mean_novelty"] =
          c.mean_novelty ? OrderedJson(*c.mean_novelty) : OrderedJson(nullptr);
      pj["levels"].push_back(std::move(cj));
    }
    j["curves"].push_back(std::move(pj));
  }
  j["cdr"] = summary.cdr ? OrderedJson(*summary.cdr) : OrderedJson(nullptr);
  return j;
}

namespace {

std::string csv_number(double v) {
  return OrderedJson(v).dump();  // shortest round-trip representation
}

}  // namespace

std::string frontier_summary_to_csv(const FrontierSummary& summary) {
  std::string out = "phase_time,level,N,successes,success_rate,efficiency,mean_novelty\n";
  for (const auto& p : summary.phases) {
    for (const auto& c : p.cells) {
      out += csv_number(p.phase_time);
      out += ",";
      out += std::to_string(c.level);
      out += ",";
      out += std::to_string(c.n);
      out += ",";
      out += std::to_string(c.successes);
      out += ",";
      out += csv_number(c.success_rate);
      out += ",";
      if (c.efficiency) out += csv_number(*c.efficiency);
      out += ",";
      if (c.mean_novelty) out += csv_number(*c.mean_novelty);
      out += "\n";
    }
  }
  return out;
}

}  // namespace ww::metrics
