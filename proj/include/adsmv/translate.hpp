#pragma once

// Activity diagram -> SMV module.
//
// Every diagram edge that corresponds to one FSM step yields a pair of
// DEFINEs, `<e>_enabled` (current-state firability) and `<e>_taken` (the
// full step predicate over current and next state). Fork/join bookkeeping
// is folded into the `_taken` defines as "hidden edge" conjuncts. The TRANS
// blocks then frame the control variables, force one step per transition
// until a final node is reached, freeze inputs, frame locals and name the
// executed action.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adsmv/ad_model.hpp"
#include "adsmv/ad_validate.hpp"
#include "adsmv/smv_ir.hpp"

namespace adsmv {

inline constexpr const char* kNodeVar = "acnode";
inline constexpr const char* kActionVar = "ac";
inline constexpr const char* kIdle = "nop";

/// Action names become SMV symbols: every character outside
/// [A-Za-z0-9_] is replaced by '_'.
inline std::string sanitize_action_name(std::string_view name) {
  std::string out(name);
  for (auto& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
  return out;
}

struct CanonicalNames {
  std::map<NodeIndex, std::string> node_id;        // n<k>, n<k>_initial, n<k>_final
  std::map<NodeIndex, std::string> action_symbol;  // sanitized action names
  std::map<EdgeIndex, std::string> fork_var;       // fork out-edge -> in_F<tgt>
  std::map<EdgeIndex, std::string> join_var;       // join in-edge -> in_J<src>
  std::map<EdgeIndex, std::string> edge_name;      // step edge -> define base name

  [[nodiscard]] std::string in_var(NodeIndex n) const { return "in_" + node_id.at(n); }
};

/// Numbers initial, final and action nodes in declaration order and derives
/// every generated name from that numbering.
inline CanonicalNames canonical_names(const ActivityDiagram& ad) {
  CanonicalNames names;
  std::vector<Diagnostic> errs;
  std::size_t k = 0;
  std::map<std::string, std::string> symbol_owner;
  for (NodeIndex i = 0; i < ad.nodes.size(); ++i) {
    const auto& n = ad.nodes[i];
    if (!is_control_node(n.kind)) continue;
    std::string id = "n" + std::to_string(k++);
    if (n.kind == NodeKind::initial) id += "_initial";
    if (n.kind == NodeKind::final_) id += "_final";
    names.node_id[i] = id;
    if (n.kind != NodeKind::action) continue;
    auto sym = sanitize_action_name(n.action_name);
    names.action_symbol[i] = sym;
    auto [it, fresh] = symbol_owner.emplace(sym, n.action_name);
    if (!fresh && it->second != n.action_name)
      errs.push_back({"name-collision", n.id, "action names '" + it->second + "' and '" + n.action_name + "' both become '" + sym + "'", n.span});
    if (sym == kIdle || sym.empty() || std::isdigit(static_cast<unsigned char>(sym[0])))
      errs.push_back({"name-collision", n.id, "action name '" + n.action_name + "' does not yield a usable SMV symbol", n.span});
  }

  for (EdgeIndex e = 0; e < ad.transitions.size(); ++e) {
    const auto& t = ad.transitions[e];
    const auto s = ad.find_node(t.src);
    const auto d = ad.find_node(t.tgt);
    if (!s || !d) continue;
    if (ad.nodes[*s].kind == NodeKind::fork && names.node_id.count(*d)) names.fork_var[e] = "in_F" + names.node_id[*d];
    if (ad.nodes[*d].kind == NodeKind::join && names.node_id.count(*s)) names.join_var[e] = "in_J" + names.node_id[*s];
  }

  for (EdgeIndex e = 0; e < ad.transitions.size(); ++e) {
    const auto& t = ad.transitions[e];
    if (!is_step_edge(t, ad)) continue;
    try {
      const auto src = effective_source(t, ad);
      const auto tgt = effective_target(t, ad);
      std::string name = "e";
      switch (src.kind) {
        case EffectiveSource::Kind::direct: name += names.node_id.at(src.nodes[0]); break;
        case EffectiveSource::Kind::fork_branch: name += "F" + names.node_id.at(tgt); break;
        case EffectiveSource::Kind::join:
          for (auto p : src.nodes) name += "J" + names.node_id.at(p);
          break;
      }
      names.edge_name[e] = name + names.node_id.at(tgt);
    } catch (const DiagnosticError& err) {
      errs.insert(errs.end(), err.diagnostics().begin(), err.diagnostics().end());
    } catch (const std::out_of_range&) {
      errs.push_back({"name-collision", t.label(), "edge does not connect named control nodes", t.span});
    }
  }

  std::map<std::string, std::string> taken;
  auto claim = [&](const std::string& n, const std::string& owner) {
    auto [it, fresh] = taken.emplace(n, owner);
    if (!fresh) errs.push_back({"name-collision", owner, "generated name '" + n + "' is also used by " + it->second});
  };
  claim(kNodeVar, "the node variable");
  claim(kActionVar, "the action variable");
  for (const auto& v : ad.vars) claim(v.name, "variable " + v.name);
  for (const auto& [i, id] : names.node_id) claim("in_" + id, "node " + ad.nodes[i].id);
  for (const auto& [e, v] : names.fork_var) claim(v, "edge " + ad.transitions[e].label());
  for (const auto& [e, v] : names.join_var) claim(v, "edge " + ad.transitions[e].label());
  for (const auto& [e, n] : names.edge_name) {
    claim(n + "_enabled", "edge " + ad.transitions[e].label());
    claim(n + "_taken", "edge " + ad.transitions[e].label());
  }
  if (!errs.empty()) throw DiagnosticError(std::move(errs));
  return names;
}

/// Which TRANS blocks to leave out; used to build deliberately broken
/// translators for mutation testing. Only rules 5 to 9 are honoured.
struct TranslateOptions {
  std::set<int> omit_rules;
};

namespace detail {

/// Everything one `_taken` define says, before it is turned into SMV.
struct StepPlan {
  EdgeIndex edge = 0;
  std::string name;
  std::vector<std::string> enabled_vars;  // conjoined
  std::optional<Expr> guard;
  std::vector<std::string> clears;
  std::string arrive;
  std::vector<std::string> hidden;
  std::vector<Assignment> assignments;
  std::string target_id;
};

inline smv::Expr to_smv(const Expr& e) {
  using Op = Expr::Op;
  using S = smv::Expr::Op;
  switch (e.op) {
    case Op::int_lit: return smv::Expr::integer(e.number);
    case Op::bool_lit: return smv::Expr::integer(e.number);
    case Op::sym_lit:
    case Op::var: return smv::Expr::ident(e.name);
    case Op::not_: return smv::Expr::negate(to_smv(e.args[0]));
    default: break;
  }
  S op = S::and_;
  switch (e.op) {
    case Op::and_: op = S::and_; break;
    case Op::or_: op = S::or_; break;
    case Op::eq: op = S::eq; break;
    case Op::ne: op = S::ne; break;
    case Op::lt: op = S::lt; break;
    case Op::le: op = S::le; break;
    case Op::gt: op = S::gt; break;
    case Op::ge: op = S::ge; break;
    case Op::add: op = S::add; break;
    case Op::sub: op = S::sub; break;
    default: break;
  }
  return smv::Expr::binary(op, to_smv(e.args[0]), to_smv(e.args[1]));
}

/// Control variables set on arrival at `n`: every branch variable of a fork
/// that follows `n`, or the wait variable of a join that follows `n`.
inline std::vector<std::string> hidden_on_arrival(NodeIndex n, const ActivityDiagram& ad, const CanonicalNames& names) {
  std::vector<std::string> out;
  for (auto e : ad.outgoing(ad.nodes[n].id)) {
    const auto& next = ad.node(ad.transitions[e].tgt);
    if (next.kind == NodeKind::fork) {
      for (auto b : ad.outgoing(next.id)) out.push_back(names.fork_var.at(b));
    } else if (next.kind == NodeKind::join) {
      out.push_back(names.join_var.at(e));
    }
  }
  return out;
}

inline std::vector<StepPlan> plan_steps(const ActivityDiagram& ad, const CanonicalNames& names) {
  std::vector<StepPlan> plans;
  for (EdgeIndex e = 0; e < ad.transitions.size(); ++e) {
    const auto& t = ad.transitions[e];
    if (!is_step_edge(t, ad)) continue;
    StepPlan p;
    p.edge = e;
    p.name = names.edge_name.at(e);
    const auto src = effective_source(t, ad);
    const auto tgt = effective_target(t, ad);
    switch (src.kind) {
      case EffectiveSource::Kind::direct:
        p.enabled_vars.push_back(names.in_var(src.nodes[0]));
        p.clears.push_back(names.in_var(src.nodes[0]));
        if (ad.node(t.src).kind == NodeKind::decision && !t.guard.is_true_literal()) p.guard = t.guard;
        break;
      case EffectiveSource::Kind::fork_branch:
        p.enabled_vars.push_back(names.fork_var.at(e));
        p.clears = {names.fork_var.at(e), names.in_var(src.nodes[0])};
        break;
      case EffectiveSource::Kind::join: {
        const auto ins = ad.incoming(t.src);
        for (std::size_t i = 0; i < ins.size(); ++i) {
          p.enabled_vars.push_back(names.join_var.at(ins[i]));
          p.clears.push_back(names.join_var.at(ins[i]));
          p.clears.push_back(names.in_var(src.nodes[i]));
        }
        break;
      }
    }
    p.arrive = names.in_var(tgt);
    p.hidden = hidden_on_arrival(tgt, ad, names);
    // A step that re-enters its own source keeps the source occupied.
    std::erase_if(p.clears, [&](const std::string& v) {
      return v == p.arrive || std::find(p.hidden.begin(), p.hidden.end(), v) != p.hidden.end();
    });
    p.assignments = ad.nodes[tgt].assignments;
    p.target_id = names.node_id.at(tgt);
    plans.push_back(std::move(p));
  }
  return plans;
}

/// Control variables in declaration order: node occupancy, then fork branch
/// variables (per fork, out-edges last-declared first), then join waits.
inline std::vector<std::string> control_vars(const ActivityDiagram& ad, const CanonicalNames& names) {
  std::vector<std::string> out;
  for (const auto& [i, id] : names.node_id) out.push_back("in_" + id);
  for (const auto& n : ad.nodes) {
    if (n.kind != NodeKind::fork) continue;
    auto outs = ad.outgoing(n.id);
    for (auto it = outs.rbegin(); it != outs.rend(); ++it) out.push_back(names.fork_var.at(*it));
  }
  for (const auto& n : ad.nodes) {
    if (n.kind != NodeKind::join) continue;
    for (auto e : ad.incoming(n.id)) out.push_back(names.join_var.at(e));
  }
  return out;
}

inline std::vector<std::string> final_vars(const ActivityDiagram& ad, const CanonicalNames& names) {
  std::vector<std::string> out;
  for (const auto& [i, id] : names.node_id)
    if (ad.nodes[i].kind == NodeKind::final_) out.push_back("in_" + id);
  return out;
}

inline smv::Expr disj_of_idents(const std::vector<std::string>& vs) {
  std::vector<smv::Expr> xs;
  for (const auto& v : vs) xs.push_back(smv::Expr::ident(v));
  return smv::disj(std::move(xs));
}

inline smv::Literal domain_literal(const Value& v) {
  return v.kind == Value::Kind::integer ? smv::Literal::integer(v.number) : smv::Literal::symbol(v.symbol);
}

inline smv::Expr value_expr(const Value& v) {
  return v.kind == Value::Kind::integer ? smv::Expr::integer(v.number) : smv::Expr::ident(v.symbol);
}

}  // namespace detail

/// VAR section: node occupancy, fork/join bookkeeping, `acnode`, `ac`, then
/// input and local variables with their domains.
inline std::vector<smv::VarDecl> emit_vars(const ActivityDiagram& ad, const CanonicalNames& names) {
  std::vector<smv::VarDecl> out;
  for (const auto& v : detail::control_vars(ad, names)) out.push_back(smv::VarDecl::boolean_var(v));
  out.front().comments = {"nodes and pseudo-nodes of ad"};

  std::vector<smv::Literal> nodes;
  for (const auto& [i, id] : names.node_id) nodes.push_back(smv::Literal::symbol(id));
  nodes.push_back(smv::Literal::symbol(kIdle));
  out.push_back(smv::VarDecl::enum_var(kNodeVar, std::move(nodes)));
  out.back().comments = {"visitable nodes"};

  std::set<std::string> syms;
  for (const auto& [i, s] : names.action_symbol) syms.insert(s);
  std::vector<smv::Literal> actions;
  for (const auto& s : syms) actions.push_back(smv::Literal::symbol(s));
  actions.push_back(smv::Literal::symbol(kIdle));
  out.push_back(smv::VarDecl::enum_var(kActionVar, std::move(actions)));
  out.back().comments = {"the visible action of a step"};

  for (auto kind : {VarKind::input, VarKind::local}) {
    bool first = true;
    for (const auto* v : ad.vars_of(kind)) {
      std::vector<smv::Literal> ls;
      for (const auto& val : v->domain.values()) ls.push_back(detail::domain_literal(val));
      out.push_back(smv::VarDecl::enum_var(v->name, std::move(ls)));
      if (first) out.back().comments = {kind == VarKind::input ? "input variables" : "control variables"};
      first = false;
    }
  }
  return out;
}

/// INIT conjuncts: only the initial node is occupied, locals hold their
/// initial values, `acnode` is the initial node and `ac` is `nop`.
inline std::vector<smv::Expr> emit_init(const ActivityDiagram& ad, const CanonicalNames& names) {
  std::vector<smv::Expr> out;
  std::string initial_var;
  for (const auto& [i, id] : names.node_id)
    if (ad.nodes[i].kind == NodeKind::initial) initial_var = "in_" + id;
  for (const auto& v : detail::control_vars(ad, names))
    out.push_back(smv::eq(smv::Expr::ident(v), smv::Expr::integer(v == initial_var ? 1 : 0)));
  out.front().comments = {"init all nodes"};

  bool first = true;
  for (const auto* v : ad.vars_of(VarKind::local)) {
    auto init = initial_value(*v, ad);
    if (!init) throw DiagnosticError({{"local-init", v->name, "local variable has no initial value", v->span}});
    out.push_back(smv::eq(smv::Expr::ident(v->name), detail::value_expr(*init)));
    if (first) out.back().comments = {"init control variables as assigned in first node"};
    first = false;
  }
  out.push_back(smv::eq(smv::Expr::ident(kNodeVar), smv::Expr::ident(initial_var.substr(3))));
  out.back().comments = {"set initial action node and visible action"};
  out.push_back(smv::eq(smv::Expr::ident(kActionVar), smv::Expr::ident(kIdle)));
  return out;
}

/// One DEFINE block (`_enabled`, `_taken`) per step edge, in edge
/// declaration order.
inline std::vector<smv::DefineBlock> emit_taken_defines(const ActivityDiagram& ad, const CanonicalNames& names) {
  using smv::Expr;
  std::vector<smv::DefineBlock> out;
  for (const auto& p : detail::plan_steps(ad, names)) {
    std::vector<Expr> en;
    for (const auto& v : p.enabled_vars) en.push_back(Expr::ident(v));
    if (p.guard) en.push_back(detail::to_smv(*p.guard));
    Expr enabled = smv::conj(std::move(en));

    std::vector<Expr> parts;
    std::vector<std::string> pending;
    auto add = [&](Expr e) {
      e.comments = std::move(pending);
      pending.clear();
      parts.push_back(std::move(e));
    };
    add(Expr::ident(p.name + "_enabled"));
    pending.push_back("not in previous nodes anymore");
    for (const auto& c : p.clears) add(Expr::negate(smv::next_var(c)));
    pending.push_back("arrive in target node");
    add(smv::next_var(p.arrive));
    pending.push_back("possibly taking hidden edges");
    for (const auto& h : p.hidden) add(smv::next_var(h));
    pending.push_back("doing assignments");
    for (const auto& a : p.assignments) add(smv::eq(smv::next_var(a.target), detail::to_smv(a.value)));
    pending.push_back("set next node");
    add(Expr::next(smv::eq(Expr::ident(kNodeVar), Expr::ident(p.target_id))));

    smv::DefineBlock block;
    block.defines.push_back({p.name + "_enabled", std::move(enabled)});
    block.defines.push_back({p.name + "_taken", smv::conj(std::move(parts))});
    out.push_back(std::move(block));
  }
  if (!out.empty()) out.front().comments = {"shortcut to what happens when an edge is taken"};
  return out;
}

/// Control-variable frame: each control variable keeps its value unless a
/// step that sets it (listed first) or clears it (listed second) is taken.
inline smv::Expr emit_frame_control(const ActivityDiagram& ad, const CanonicalNames& names) {
  using smv::Expr;
  const auto plans = detail::plan_steps(ad, names);
  std::vector<Expr> clauses;
  for (const auto& v : detail::control_vars(ad, names)) {
    std::vector<std::string> setters;
    std::vector<std::string> clearers;
    for (const auto& p : plans) {
      const bool sets = p.arrive == v || std::find(p.hidden.begin(), p.hidden.end(), v) != p.hidden.end();
      const bool clears = std::find(p.clears.begin(), p.clears.end(), v) != p.clears.end();
      if (sets) setters.push_back(p.name + "_taken");
      else if (clears) clearers.push_back(p.name + "_taken");
    }
    std::vector<Expr> xs{smv::eq(Expr::ident(v), smv::next_var(v))};
    for (const auto& s : setters) xs.push_back(Expr::ident(s));
    for (const auto& c : clearers) xs.push_back(Expr::ident(c));
    clauses.push_back(smv::disj(std::move(xs)));
  }
  return smv::conj(std::move(clauses));
}

/// Until a final node is occupied exactly one step edge is taken; once it
/// is, the node variable becomes `nop`.
inline smv::Expr emit_step_obligation(const ActivityDiagram& ad, const CanonicalNames& names) {
  using smv::Expr;
  const auto finals = detail::final_vars(ad, names);
  std::vector<Expr> takens;
  for (const auto& p : detail::plan_steps(ad, names)) takens.push_back(Expr::ident(p.name + "_taken"));
  Expr idle = Expr::binary(Expr::Op::iff, Expr::next(smv::eq(Expr::ident(kNodeVar), Expr::ident(kIdle))),
                           detail::disj_of_idents(finals));
  if (takens.empty()) return idle;
  return Expr::binary(Expr::Op::and_, std::move(idle),
                      Expr::binary(Expr::Op::or_, detail::disj_of_idents(finals), smv::disj(std::move(takens))));
}

/// Input variables never change; absent when there are none.
inline std::optional<smv::Expr> emit_input_frame(const ActivityDiagram& ad) {
  std::vector<smv::Expr> xs;
  for (const auto* v : ad.vars_of(VarKind::input)) xs.push_back(smv::eq(smv::Expr::ident(v->name), smv::next_var(v->name)));
  if (xs.empty()) return std::nullopt;
  return smv::conj(std::move(xs)).with_comments({"input variables do not change"});
}

/// A local variable may only change when the next node assigns it; the
/// assigned value itself is fixed by the `_taken` define of that step.
inline std::optional<smv::Expr> emit_local_frame(const ActivityDiagram& ad, const CanonicalNames& names) {
  using smv::Expr;
  std::vector<Expr> clauses;
  for (const auto* v : ad.vars_of(VarKind::local)) {
    std::vector<Expr> xs{smv::eq(Expr::ident(v->name), smv::next_var(v->name))};
    for (const auto& [i, id] : names.node_id) {
      const auto& as = ad.nodes[i].assignments;
      if (std::any_of(as.begin(), as.end(), [&](const Assignment& a) { return a.target == v->name; }))
        xs.push_back(smv::eq(smv::next_var(kNodeVar), Expr::ident(id)));
    }
    clauses.push_back(smv::disj(std::move(xs)));
  }
  if (clauses.empty()) return std::nullopt;
  return smv::conj(std::move(clauses)).with_comments({"local variables change only on assignments"});
}

/// `next(acnode) = X -> next(ac) = <action of X>` for every node literal;
/// initial, final and `nop` map to `nop`.
inline smv::Expr emit_action_naming(const ActivityDiagram& ad, const CanonicalNames& names) {
  using smv::Expr;
  std::vector<Expr> xs;
  auto implication = [](const std::string& node, const std::string& action) {
    return Expr::binary(Expr::Op::implies, smv::eq(smv::next_var(kNodeVar), Expr::ident(node)),
                        smv::eq(smv::next_var(kActionVar), Expr::ident(action)));
  };
  for (const auto& [i, id] : names.node_id)
    xs.push_back(implication(id, ad.nodes[i].kind == NodeKind::action ? names.action_symbol.at(i) : kIdle));
  xs.push_back(implication(kIdle, kIdle));
  return smv::conj(std::move(xs));
}

/// Translates a valid diagram. Throws DiagnosticError if the diagram fails
/// validation or naming, or if the result is not a well-formed module.
inline smv::Module translate(const ActivityDiagram& ad, const TranslateOptions& opts = {}) {
  if (auto ds = validate(ad); !ds.empty()) throw DiagnosticError(std::move(ds));
  const auto names = canonical_names(ad);
  smv::Module m;
  m.vars = emit_vars(ad, names);
  m.inits.push_back(smv::conj(emit_init(ad, names)));
  m.defines = emit_taken_defines(ad, names);
  auto keep = [&](int rule) { return !opts.omit_rules.count(rule); };
  if (keep(5)) m.trans.push_back(emit_frame_control(ad, names));
  if (keep(6)) m.trans.push_back(emit_step_obligation(ad, names));
  if (keep(7))
    if (auto e = emit_input_frame(ad)) m.trans.push_back(std::move(*e));
  if (keep(8))
    if (auto e = emit_local_frame(ad, names)) m.trans.push_back(std::move(*e));
  if (keep(9)) m.trans.push_back(emit_action_naming(ad, names));
  if (auto ds = smv::check_well_formed(m); !ds.empty()) throw DiagnosticError(std::move(ds));
  return m;
}

}  // namespace adsmv
