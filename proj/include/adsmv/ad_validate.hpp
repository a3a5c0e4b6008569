#pragma once

// Well-formedness of activity diagrams and the pseudo-node skipping helpers
// shared by the translator and the token-game interpreter.

#include <set>
#include <string>
#include <vector>

#include "adsmv/ad_model.hpp"

namespace adsmv {

namespace detail {

inline bool is_routing(NodeKind k) { return !is_control_node(k); }

inline Diagnostic structural(std::string rule, const std::string& subject, std::string msg, SourceSpan span = {}) {
  return {std::move(rule), subject, std::move(msg), span};
}

}  // namespace detail

/// Follows merges from `t.tgt` to the first non-merge node.
/// Throws DiagnosticError on a merge chain that never leaves merges.
inline NodeIndex effective_target(const Transition& t, const ActivityDiagram& ad) {
  std::set<std::string> seen;
  std::string cur = t.tgt;
  for (;;) {
    auto idx = ad.find_node(cur);
    if (!idx) throw DiagnosticError({detail::structural("edge-endpoint", t.label(), "unknown node '" + cur + "'", t.span)});
    if (ad.nodes[*idx].kind != NodeKind::merge) return *idx;
    if (!seen.insert(cur).second)
      throw DiagnosticError({detail::structural("merge-cycle", cur, "merge chain never reaches a non-merge node", t.span)});
    auto outs = ad.outgoing(cur);
    if (outs.size() != 1)
      throw DiagnosticError({detail::structural("merge-shape", cur, "merge must have exactly one outgoing edge", t.span)});
    cur = ad.transitions[outs[0]].tgt;
  }
}

struct EffectiveSource {
  enum class Kind { direct, fork_branch, join };
  Kind kind = Kind::direct;
  /// direct: the action/initial node; fork_branch: the node before the fork;
  /// join: the nodes before the join, in incoming-edge declaration order.
  std::vector<NodeIndex> nodes;
};

/// The control node(s) whose occupancy a step along `t` consumes.
inline EffectiveSource effective_source(const Transition& t, const ActivityDiagram& ad) {
  auto fail = [&](std::string msg) -> EffectiveSource {
    throw DiagnosticError({detail::structural("effective-source", t.label(), std::move(msg), t.span)});
  };
  auto src = ad.find_node(t.src);
  if (!src) return fail("unknown node '" + t.src + "'");
  const Node& n = ad.nodes[*src];
  auto single_pred = [&](const Node& pseudo) -> NodeIndex {
    auto ins = ad.incoming(pseudo.id);
    if (ins.size() != 1) fail(std::string(to_string(pseudo.kind)) + " '" + pseudo.id + "' needs exactly one incoming edge");
    auto p = ad.find_node(ad.transitions[ins[0]].src);
    if (!p || !is_control_node(ad.nodes[*p].kind) || ad.nodes[*p].kind == NodeKind::final_)
      fail("the node before " + std::string(to_string(pseudo.kind)) + " '" + pseudo.id + "' is not an action or initial node");
    return *p;
  };
  switch (n.kind) {
    case NodeKind::action:
    case NodeKind::initial: return {EffectiveSource::Kind::direct, {*src}};
    case NodeKind::decision: return {EffectiveSource::Kind::direct, {single_pred(n)}};
    case NodeKind::fork: return {EffectiveSource::Kind::fork_branch, {single_pred(n)}};
    case NodeKind::join: {
      EffectiveSource es{EffectiveSource::Kind::join, {}};
      for (auto e : ad.incoming(n.id)) {
        auto p = ad.find_node(ad.transitions[e].src);
        if (!p || ad.nodes[*p].kind != NodeKind::action) fail("every node before join '" + n.id + "' must be an action node");
        es.nodes.push_back(*p);
      }
      return es;
    }
    default: return fail("edges leaving a " + std::string(to_string(n.kind)) + " node are not steps");
  }
}

/// Whether `t` corresponds to an FSM step (a `_taken` define). Edges into
/// decision/fork/join nodes and edges out of merges are absorbed by the
/// edges around them.
inline bool is_step_edge(const Transition& t, const ActivityDiagram& ad) {
  const auto s = ad.find_node(t.src);
  const auto d = ad.find_node(t.tgt);
  if (!s || !d) return false;
  const auto sk = ad.nodes[*s].kind;
  const auto dk = ad.nodes[*d].kind;
  if (sk == NodeKind::merge || sk == NodeKind::final_) return false;
  return dk != NodeKind::decision && dk != NodeKind::fork && dk != NodeKind::join;
}

/// The action node reached by the single edge leaving the initial node, if any.
inline std::optional<NodeIndex> first_node(const ActivityDiagram& ad) {
  for (const auto& n : ad.nodes) {
    if (n.kind != NodeKind::initial) continue;
    auto outs = ad.outgoing(n.id);
    if (outs.size() != 1) return std::nullopt;
    try {
      auto t = effective_target(ad.transitions[outs[0]], ad);
      if (ad.nodes[t].kind == NodeKind::action) return t;
    } catch (const DiagnosticError&) {
    }
    return std::nullopt;
  }
  return std::nullopt;
}

/// Initial value of a local variable: its declared init, else the constant
/// assigned to it by the first action node.
inline std::optional<Value> initial_value(const VariableDecl& v, const ActivityDiagram& ad) {
  if (v.init) return v.init;
  auto fn = first_node(ad);
  if (!fn) return std::nullopt;
  for (const auto& a : ad.nodes[*fn].assignments) {
    if (a.target != v.name) continue;
    std::vector<std::string> refs;
    referenced_vars(a.value, refs);
    if (!refs.empty()) return std::nullopt;
    try {
      auto val = eval(a.value, {});
      if (v.domain.contains(val)) return val;
    } catch (const EvalError&) {
    }
    return std::nullopt;
  }
  return std::nullopt;
}

/// Checks every structural and typing rule. An empty result means the
/// diagram is in the translatable fragment.
inline std::vector<Diagnostic> validate(const ActivityDiagram& ad) {
  using detail::structural;
  std::vector<Diagnostic> out;

  std::set<std::string> names;
  for (const auto& v : ad.vars) {
    if (!names.insert(v.name).second) out.push_back(structural("duplicate-id", v.name, "variable declared twice", v.span));
    const auto& d = v.domain;
    if (d.kind == Domain::Kind::range && d.lo > d.hi)
      out.push_back(structural("domain", v.name, "empty range " + to_string(d), v.span));
    if (d.kind == Domain::Kind::enumeration) {
      std::set<std::string> ms(d.members.begin(), d.members.end());
      if (d.members.empty() || ms.size() != d.members.size())
        out.push_back(structural("domain", v.name, "enumeration must list at least one member, without repeats", v.span));
    }
    if (v.kind == VarKind::input && v.init)
      out.push_back(structural("var-init", v.name, "input variables take their value from the environment", v.span));
    if (v.init && !d.contains(*v.init))
      out.push_back(structural("var-init", v.name, "initial value " + to_string(*v.init) + " is outside " + to_string(d), v.span));
  }

  std::set<std::string> ids;
  std::size_t initials = 0;
  std::size_t finals = 0;
  for (const auto& n : ad.nodes) {
    if (!ids.insert(n.id).second) out.push_back(structural("duplicate-id", n.id, "node declared twice", n.span));
    if (n.kind == NodeKind::initial) ++initials;
    if (n.kind == NodeKind::final_) ++finals;
    if (n.kind == NodeKind::action && n.action_name.empty())
      out.push_back(structural("action-name", n.id, "action node needs a non-empty action name", n.span));
    if (n.kind != NodeKind::action && (!n.action_name.empty() || !n.assignments.empty()))
      out.push_back(structural("action-name", n.id, "only action nodes carry action names and assignments", n.span));
  }
  if (initials != 1) out.push_back(structural("initial-count", ad.name, "expected exactly one initial node"));
  if (finals == 0) out.push_back(structural("final-count", ad.name, "expected at least one final node"));

  bool endpoints_ok = true;
  for (const auto& t : ad.transitions) {
    for (const auto* end : {&t.src, &t.tgt}) {
      if (!ad.find_node(*end)) {
        out.push_back(structural("edge-endpoint", t.label(), "unknown node '" + *end + "'", t.span));
        endpoints_ok = false;
      }
    }
  }
  if (!endpoints_ok) return out;

  for (const auto& n : ad.nodes) {
    const auto ins = ad.incoming(n.id).size();
    const auto outs = ad.outgoing(n.id).size();
    switch (n.kind) {
      case NodeKind::initial:
        if (ins != 0) out.push_back(structural("initial-incoming", n.id, "initial node has incoming edges", n.span));
        if (outs != 1) out.push_back(structural("initial-outgoing", n.id, "initial node needs exactly one outgoing edge", n.span));
        break;
      case NodeKind::final_:
        if (outs != 0) out.push_back(structural("final-outgoing", n.id, "final node has outgoing edges", n.span));
        break;
      case NodeKind::action:
        if (outs != 1) out.push_back(structural("action-outgoing", n.id, "action node needs exactly one outgoing edge", n.span));
        break;
      case NodeKind::merge:
        if (ins < 1 || outs != 1)
          out.push_back(structural("merge-shape", n.id, "merge needs at least one incoming and exactly one outgoing edge", n.span));
        break;
      case NodeKind::decision:
        if (ins != 1 || outs < 1)
          out.push_back(structural("decision-shape", n.id, "decision needs exactly one incoming and at least one outgoing edge", n.span));
        break;
      case NodeKind::fork:
        if (ins != 1 || outs < 2)
          out.push_back(structural("fork-shape", n.id, "fork needs exactly one incoming and at least two outgoing edges", n.span));
        break;
      case NodeKind::join:
        if (ins < 2 || outs != 1)
          out.push_back(structural("join-shape", n.id, "join needs at least two incoming and exactly one outgoing edge", n.span));
        break;
    }
  }

  for (const auto& t : ad.transitions) {
    const auto& s = ad.node(t.src);
    const auto& d = ad.node(t.tgt);
    const bool allowed = (s.kind == NodeKind::decision || s.kind == NodeKind::merge) && d.kind == NodeKind::merge;
    if (detail::is_routing(s.kind) && detail::is_routing(d.kind) && !allowed)
      out.push_back(structural("pseudo-adjacency", t.label(),
                               "pseudo nodes " + s.id + " and " + d.id + " must not be connected directly", t.span));
    if ((d.kind == NodeKind::fork || d.kind == NodeKind::join) && s.kind == NodeKind::initial)
      out.push_back(structural(d.kind == NodeKind::fork ? "fork-predecessor" : "join-predecessor", t.label(),
                               "the node before a " + std::string(to_string(d.kind)) + " must be an action node", t.span));
    if (s.kind != NodeKind::decision && !t.guard.is_true_literal())
      out.push_back(structural("guard-position", t.label(), "only edges leaving a decision may carry a guard", t.span));
    if (s.kind == NodeKind::decision) {
      auto ty = infer_type(t.guard, ad, out, t.label(), t.span);
      if (ty.kind != ExprType::Kind::error && ty.kind != ExprType::Kind::boolean)
        out.push_back(structural("type", t.label(), "guard '" + to_string(t.guard) + "' is not boolean", t.span));
    }
  }

  for (const auto& n : ad.nodes) {
    if (n.kind != NodeKind::merge) continue;
    std::set<std::string> seen{n.id};
    std::string cur = n.id;
    for (;;) {
      auto outs = ad.outgoing(cur);
      if (outs.size() != 1) break;
      cur = ad.transitions[outs[0]].tgt;
      if (ad.node(cur).kind != NodeKind::merge) break;
      if (!seen.insert(cur).second) {
        if (cur == n.id) out.push_back(structural("merge-cycle", n.id, "merge chain never reaches a non-merge node", n.span));
        break;
      }
    }
  }

  for (const auto& n : ad.nodes) {
    std::set<std::string> targets;
    for (const auto& a : n.assignments) {
      const std::string subject = n.id + "." + a.target;
      const auto* v = ad.find_var(a.target);
      if (!v || v->kind != VarKind::local) {
        out.push_back(structural("assignment-target", subject, "'" + a.target + "' is not a local variable", n.span));
        continue;
      }
      if (!targets.insert(a.target).second)
        out.push_back(structural("assignment-target", subject, "variable assigned twice in one action", n.span));
      auto ty = infer_type(a.value, ad, out, subject, n.span);
      using K = ExprType::Kind;
      bool ok = true;
      if (ty.kind == K::error) continue;
      if (v->domain.kind == Domain::Kind::range) ok = ty.kind == K::integer;
      else if (ty.kind == K::symbol) ok = v->domain.contains(Value::sym(ty.symbol));
      else ok = ty.kind == K::enumeration && *ty.domain == v->domain;
      if (!ok)
        out.push_back(structural("type", subject, "value '" + to_string(a.value) + "' does not fit " + to_string(v->domain), n.span));
    }
  }

  if (initials == 1) {
    for (const auto& v : ad.vars) {
      if (v.kind != VarKind::local || v.init) continue;
      if (!initial_value(v, ad))
        out.push_back(structural("local-init", v.name,
                                 "local variable needs an init value or a constant assignment in the first action node", v.span));
    }
  }
  return out;
}

}  // namespace adsmv
