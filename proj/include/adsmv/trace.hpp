#pragma once

// Observable action traces and the bounded enumeration shared by both
// executable semantics.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace adsmv {

enum class TraceEnd { terminated, cut, deadlock };

inline std::string_view to_string(TraceEnd e) {
  switch (e) {
    case TraceEnd::terminated: return "terminated";
    case TraceEnd::cut: return "cut";
    case TraceEnd::deadlock: return "deadlock";
  }
  return "?";
}

/// A maximal run prefix: the actions executed (the idle action excluded),
/// how the run ended within the depth bound, and the initial values of the
/// labelling variables (the diagram's inputs) it started from.
struct ActionTrace {
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<std::string> actions;
  TraceEnd end = TraceEnd::cut;

  [[nodiscard]] bool terminated() const { return end == TraceEnd::terminated; }
  bool operator==(const ActionTrace&) const = default;
  auto operator<=>(const ActionTrace&) const = default;
};

using TraceSet = std::set<ActionTrace>;

/// `[v=x, w=y] a·b·c|terminated`
inline std::string format_trace(const ActionTrace& t) {
  std::string out;
  if (!t.labels.empty()) {
    out += "[";
    for (std::size_t i = 0; i < t.labels.size(); ++i) out += (i ? ", " : "") + t.labels[i].first + "=" + t.labels[i].second;
    out += "] ";
  }
  for (std::size_t i = 0; i < t.actions.size(); ++i) out += (i ? "·" : "") + t.actions[i];
  return out + "|" + std::string(to_string(t.end));
}

inline nlohmann::json trace_json(const ActionTrace& t) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [k, v] : t.labels) labels[k] = v;
  return {{"inputs", labels},
          {"actions", t.actions},
          {"terminated", t.terminated()},
          {"end", std::string(to_string(t.end))},
          {"length", t.actions.size()}};
}

/// The trace a run of `t` would have produced had it been explored only to
/// `depth` steps. A terminated run of k actions used k+1 steps.
inline ActionTrace truncate(const ActionTrace& t, std::size_t depth) {
  ActionTrace out = t;
  const std::size_t k = t.actions.size();
  const std::size_t steps = t.end == TraceEnd::terminated ? k + 1 : k;
  if (steps > depth || (t.end != TraceEnd::terminated && k >= depth)) {
    out.actions.resize(std::min(k, depth));
    out.end = TraceEnd::cut;
  }
  return out;
}

struct TraceStats {
  std::size_t states = 0;
};

/// Bounded enumeration of all maximal action traces.
///
/// `initials` pairs each initial state with its labels; `successors(s)`
/// returns (state, action) pairs. A step observing `idle` terminates the
/// run; a state with no successors is a deadlock; reaching `depth` steps
/// cuts it. Results are memoised per (state, remaining depth).
template <class State, class Successors>
TraceSet enumerate_traces(const std::vector<std::pair<State, std::vector<std::pair<std::string, std::string>>>>& initials,
                          Successors&& successors, std::size_t depth, const std::string& idle, TraceStats* stats = nullptr) {
  struct Suffix {
    std::vector<std::string> actions;
    TraceEnd end;
    auto operator<=>(const Suffix&) const = default;
  };
  std::map<State, std::size_t> ids;
  std::vector<State> states;
  std::vector<std::optional<std::vector<std::pair<std::size_t, std::string>>>> succ_cache;
  std::map<std::pair<std::size_t, std::size_t>, std::set<Suffix>> memo;

  auto intern = [&](const State& s) {
    auto [it, fresh] = ids.emplace(s, states.size());
    if (fresh) {
      states.push_back(s);
      succ_cache.emplace_back();
    }
    return it->second;
  };

  auto rec = [&](auto&& self, std::size_t sid, std::size_t remaining) -> const std::set<Suffix>& {
    auto key = std::make_pair(sid, remaining);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::set<Suffix> out;
    if (remaining == 0) {
      out.insert({{}, TraceEnd::cut});
    } else {
      if (!succ_cache[sid]) {
        std::vector<std::pair<std::size_t, std::string>> row;
        for (auto& [next, action] : successors(State(states[sid]))) row.emplace_back(intern(next), std::move(action));
        succ_cache[sid] = std::move(row);
      }
      const auto row = *succ_cache[sid];
      if (row.empty()) out.insert({{}, TraceEnd::deadlock});
      for (const auto& [nid, action] : row) {
        if (action == idle) {
          out.insert({{}, TraceEnd::terminated});
          continue;
        }
        for (const auto& suf : self(self, nid, remaining - 1)) {
          Suffix x{{action}, suf.end};
          x.actions.insert(x.actions.end(), suf.actions.begin(), suf.actions.end());
          out.insert(std::move(x));
        }
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  };

  TraceSet traces;
  for (const auto& [s, labels] : initials) {
    const auto sid = intern(s);
    for (const auto& suf : rec(rec, sid, depth)) traces.insert({labels, suf.actions, suf.end});
  }
  if (stats) stats->states = ids.size();
  return traces;
}

}  // namespace adsmv
