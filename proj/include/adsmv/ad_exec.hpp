#pragma once

// Direct token-game interpreter for activity diagrams.
//
// Places are node occupancies at(n) for initial/action/final nodes, one slot
// per fork out-edge (branch still pending) and one slot per join in-edge
// (branch has arrived). One step executes one action. The semantics is
// re-derived here from the diagram graph and does not go through the SMV
// translation, so the two can be compared.

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "adsmv/ad_model.hpp"
#include "adsmv/ad_validate.hpp"
#include "adsmv/diagnostic.hpp"
#include "adsmv/trace.hpp"
#include "adsmv/translate.hpp"

namespace adsmv {

struct Place {
  enum class Kind { at, fork_slot, join_slot };
  Kind kind = Kind::at;
  std::size_t index = 0;  // node index for `at`, edge index for slots

  static Place at(NodeIndex n) { return {Kind::at, n}; }
  static Place fork_slot(EdgeIndex e) { return {Kind::fork_slot, e}; }
  static Place join_slot(EdgeIndex e) { return {Kind::join_slot, e}; }
  auto operator<=>(const Place&) const = default;
};

struct AdConfig {
  std::set<Place> occupied;
  Env valuation;
  std::string last_action = kIdle;
  bool terminated = false;

  bool operator==(const AdConfig&) const = default;
  auto operator<=>(const AdConfig&) const = default;
};

namespace detail {

inline NodeIndex index_of(const ActivityDiagram& ad, const std::string& id) {
  auto i = ad.find_node(id);
  if (!i) throw DiagnosticError({{"edge-endpoint", id, "unknown node"}});
  return *i;
}

// Walks through merges to the node the token actually lands on.
inline NodeIndex landing(const ActivityDiagram& ad, EdgeIndex e) {
  NodeIndex n = index_of(ad, ad.transitions[e].tgt);
  for (std::size_t hops = 0; ad.nodes[n].kind == NodeKind::merge; ++hops) {
    auto outs = ad.outgoing(ad.nodes[n].id);
    if (outs.size() != 1 || hops > ad.nodes.size()) throw DiagnosticError({{"merge-shape", ad.nodes[n].id, "cannot route through merge"}});
    n = index_of(ad, ad.transitions[outs[0]].tgt);
  }
  return n;
}

inline bool is_final_config(const ActivityDiagram& ad, const AdConfig& c) {
  for (const auto& p : c.occupied)
    if (p.kind == Place::Kind::at && ad.nodes[p.index].kind == NodeKind::final_) return true;
  return false;
}

// One candidate firing: places consumed, the node arrived at.
struct Firing {
  std::vector<Place> consumed;
  NodeIndex target;
};

inline std::vector<Firing> fireable(const ActivityDiagram& ad, const AdConfig& c) {
  std::vector<Firing> out;
  std::set<NodeIndex> joins_seen;
  for (const auto& p : c.occupied) {
    switch (p.kind) {
      case Place::Kind::at: {
        const Node& n = ad.nodes[p.index];
        if (n.kind == NodeKind::final_) break;
        for (auto e : ad.outgoing(n.id)) {
          const Node& next = ad.node(ad.transitions[e].tgt);
          if (next.kind == NodeKind::decision) {
            for (auto d : ad.outgoing(next.id))
              if (eval(ad.transitions[d].guard, c.valuation).is_true()) out.push_back({{p}, landing(ad, d)});
          } else if (next.kind != NodeKind::fork && next.kind != NodeKind::join) {
            out.push_back({{p}, landing(ad, e)});
          }
        }
        break;
      }
      case Place::Kind::fork_slot: {
        const auto& fork = ad.node(ad.transitions[p.index].src);
        std::vector<Place> consumed{p};
        for (auto in : ad.incoming(fork.id)) {
          auto pre = Place::at(index_of(ad, ad.transitions[in].src));
          if (c.occupied.count(pre)) consumed.push_back(pre);
        }
        out.push_back({std::move(consumed), landing(ad, p.index)});
        break;
      }
      case Place::Kind::join_slot: {
        const NodeIndex j = index_of(ad, ad.transitions[p.index].tgt);
        if (!joins_seen.insert(j).second) break;
        std::vector<Place> consumed;
        bool ready = true;
        for (auto in : ad.incoming(ad.nodes[j].id)) {
          ready = ready && c.occupied.count(Place::join_slot(in));
          consumed.push_back(Place::join_slot(in));
          consumed.push_back(Place::at(index_of(ad, ad.transitions[in].src)));
        }
        if (!ready) break;
        for (auto e : ad.outgoing(ad.nodes[j].id)) out.push_back({consumed, landing(ad, e)});
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// One configuration per input valuation, with only the initial node
/// occupied and locals at their initial values.
inline std::vector<AdConfig> ad_initial_configs(const ActivityDiagram& ad) {
  AdConfig base;
  for (NodeIndex i = 0; i < ad.nodes.size(); ++i)
    if (ad.nodes[i].kind == NodeKind::initial) base.occupied.insert(Place::at(i));
  for (const auto* v : ad.vars_of(VarKind::local)) {
    auto init = initial_value(*v, ad);
    if (!init) throw DiagnosticError({{"local-init", v->name, "local variable has no initial value", v->span}});
    base.valuation[v->name] = *init;
  }
  std::vector<AdConfig> out{base};
  for (const auto* v : ad.vars_of(VarKind::input)) {
    std::vector<AdConfig> next;
    for (const auto& c : out) {
      for (const auto& val : v->domain.values()) {
        auto copy = c;
        copy.valuation[v->name] = val;
        next.push_back(std::move(copy));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// All configurations reachable by executing one action. A terminated
/// configuration steps to itself with the idle action; an empty result is a
/// deadlock.
inline std::vector<AdConfig> ad_step(const ActivityDiagram& ad, const AdConfig& c) {
  if (c.terminated || detail::is_final_config(ad, c)) {
    auto same = c;
    same.terminated = true;
    same.last_action = kIdle;
    return {same};
  }
  std::vector<AdConfig> out;
  for (const auto& f : detail::fireable(ad, c)) {
    AdConfig n = c;
    for (const auto& p : f.consumed) n.occupied.erase(p);
    const Node& tgt = ad.nodes[f.target];
    n.occupied.insert(Place::at(f.target));
    for (auto e : ad.outgoing(tgt.id)) {
      const Node& after = ad.node(ad.transitions[e].tgt);
      if (after.kind == NodeKind::fork)
        for (auto b : ad.outgoing(after.id)) n.occupied.insert(Place::fork_slot(b));
      if (after.kind == NodeKind::join) n.occupied.insert(Place::join_slot(e));
    }
    bool in_domain = true;
    for (const auto& a : tgt.assignments) {
      auto v = eval(a.value, c.valuation);
      if (!ad.find_var(a.target)->domain.contains(v)) in_domain = false;
      n.valuation[a.target] = v;
    }
    if (!in_domain) continue;
    n.last_action = tgt.kind == NodeKind::action ? sanitize_action_name(tgt.action_name) : std::string(kIdle);
    n.terminated = detail::is_final_config(ad, n);
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
  }
  return out;
}

/// Input valuation of a configuration, in declaration order.
inline std::vector<std::pair<std::string, std::string>> input_labels(const ActivityDiagram& ad, const AdConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto* v : ad.vars_of(VarKind::input)) out.emplace_back(v->name, to_string(c.valuation.at(v->name)));
  return out;
}

/// All maximal action traces of at most `depth` steps.
inline TraceSet ad_action_traces(const ActivityDiagram& ad, std::size_t depth, std::size_t max_states = 1'000'000,
                                 TraceStats* stats = nullptr) {
  if (depth == 0) throw std::invalid_argument("depth must be positive");
  if (auto ds = validate(ad); !ds.empty()) throw DiagnosticError(std::move(ds));
  std::vector<std::pair<AdConfig, std::vector<std::pair<std::string, std::string>>>> initials;
  for (auto& c : ad_initial_configs(ad)) {
    auto labels = input_labels(ad, c);
    initials.emplace_back(std::move(c), std::move(labels));
  }
  std::size_t seen = 0;
  auto succ = [&](const AdConfig& c) {
    if (++seen > max_states) throw ResourceLimitExceeded("token game exceeded " + std::to_string(max_states) + " configurations");
    std::vector<std::pair<AdConfig, std::string>> out;
    for (auto& n : ad_step(ad, c)) {
      auto a = n.last_action;
      out.emplace_back(std::move(n), std::move(a));
    }
    return out;
  };
  return enumerate_traces(initials, succ, depth, kIdle, stats);
}

}  // namespace adsmv
