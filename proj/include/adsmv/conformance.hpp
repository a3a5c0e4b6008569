#pragma once

// Bounded trace equivalence between the translated module and the token
// game, plus the frame properties every translation should satisfy.

#include <algorithm>
#include <string>
#include <vector>

#include "json.hpp"

#include "adsmv/ad_exec.hpp"
#include "adsmv/fsm_exec.hpp"
#include "adsmv/translate.hpp"

namespace adsmv {

struct EquivStats {
  std::size_t fsm_traces = 0;
  std::size_t ad_traces = 0;
  std::size_t fsm_terminated = 0;
  std::size_t ad_terminated = 0;
  std::size_t fsm_states = 0;
  std::size_t ad_states = 0;
};

struct EquivReport {
  enum class Verdict { equal, differ };
  Verdict verdict = Verdict::equal;
  std::size_t depth = 0;
  // Depth at which the sets below were computed: `depth` when equal, else
  // the smallest depth with a difference (sets at a depth are determined by
  // the sets at any larger depth, so a difference there persists).
  std::size_t witness_depth = 0;
  TraceSet only_in_fsm;
  TraceSet only_in_ad;
  TraceSet common;
  EquivStats stats;

  [[nodiscard]] bool equal() const { return verdict == Verdict::equal; }
};

inline nlohmann::json report_json(const EquivReport& r) {
  auto traces = [](const TraceSet& ts) {
    auto arr = nlohmann::json::array();
    for (const auto& t : ts) arr.push_back(trace_json(t));
    return arr;
  };
  return {{"verdict", r.equal() ? "equal" : "differ"},
          {"depth", r.depth},
          {"witnessDepth", r.witness_depth},
          {"onlyInFsm", traces(r.only_in_fsm)},
          {"onlyInAd", traces(r.only_in_ad)},
          {"stats",
           {{"fsmTraces", r.stats.fsm_traces},
            {"adTraces", r.stats.ad_traces},
            {"fsmTerminated", r.stats.fsm_terminated},
            {"adTerminated", r.stats.ad_terminated},
            {"fsmStates", r.stats.fsm_states},
            {"adStates", r.stats.ad_states}}}};
}

/// Labels traces by the diagram's input variables, in declaration order.
inline fsm::Observation observation_for(const ActivityDiagram& ad) {
  fsm::Observation obs;
  for (const auto* v : ad.vars_of(VarKind::input)) obs.labels.push_back(v->name);
  return obs;
}

inline EquivReport compare_traces(const TraceSet& fsm_side, const TraceSet& ad_side, std::size_t depth) {
  EquivReport r;
  r.depth = depth;
  r.witness_depth = depth;
  for (const auto& t : fsm_side) (ad_side.count(t) ? r.common : r.only_in_fsm).insert(t);
  for (const auto& t : ad_side)
    if (!fsm_side.count(t)) r.only_in_ad.insert(t);
  auto terminated = [](const TraceSet& ts) {
    return static_cast<std::size_t>(std::count_if(ts.begin(), ts.end(), [](const ActionTrace& t) { return t.terminated(); }));
  };
  r.stats.fsm_traces = fsm_side.size();
  r.stats.ad_traces = ad_side.size();
  r.stats.fsm_terminated = terminated(fsm_side);
  r.stats.ad_terminated = terminated(ad_side);
  r.verdict = r.only_in_fsm.empty() && r.only_in_ad.empty() ? EquivReport::Verdict::equal : EquivReport::Verdict::differ;
  return r;
}

/// Compares the traces of translate(ad) with those of the token game at
/// depths 1..depth, stopping at the first depth where they differ.
inline EquivReport check_equivalence(const ActivityDiagram& ad, std::size_t depth, const TranslateOptions& opts = {},
                                     fsm::Limits limits = {}) {
  if (depth == 0) throw std::invalid_argument("depth must be positive");
  const fsm::Model model(translate(ad, opts), limits);
  const auto obs = observation_for(ad);
  EquivReport r;
  for (std::size_t d = 1; d <= depth; ++d) {
    TraceStats fs;
    TraceStats as;
    const auto fsm_side = fsm::action_traces(model, d, obs, &fs);
    const auto ad_side = ad_action_traces(ad, d, limits.max_states, &as);
    r = compare_traces(fsm_side, ad_side, depth);
    r.witness_depth = d;
    r.stats.fsm_states = fs.states;
    r.stats.ad_states = as.states;
    if (!r.equal()) break;
  }
  return r;
}

/// The frame properties a translation of `ad` must satisfy.
inline fsm::StepInvariants step_invariants_for(const ActivityDiagram& ad) {
  fsm::StepInvariants inv;
  const auto names = canonical_names(ad);
  for (const auto* v : ad.vars_of(VarKind::input)) inv.inputs.push_back(v->name);
  for (const auto* v : ad.vars_of(VarKind::local)) {
    auto& writers = inv.local_writers[v->name];
    for (const auto& [i, id] : names.node_id)
      for (const auto& a : ad.nodes[i].assignments)
        if (a.target == v->name) writers.insert(id);
  }
  inv.control = detail::control_vars(ad, names);
  return inv;
}

}  // namespace adsmv
