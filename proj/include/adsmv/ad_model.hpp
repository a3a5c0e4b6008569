#pragma once

// Abstract syntax of activity diagrams and the finite-domain expression
// language used by guards and assignments.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adsmv/diagnostic.hpp"

namespace adsmv {

struct Value {
  enum class Kind { integer, symbol, boolean };

  Kind kind = Kind::integer;
  std::int64_t number = 0;  // integer payload, or 0/1 for booleans
  std::string symbol;

  static Value integer(std::int64_t n) { return {Kind::integer, n, {}}; }
  static Value sym(std::string s) { return {Kind::symbol, 0, std::move(s)}; }
  static Value boolean(bool b) { return {Kind::boolean, b ? 1 : 0, {}}; }

  [[nodiscard]] bool is_true() const { return kind == Kind::boolean && number != 0; }

  bool operator==(const Value&) const = default;
  auto operator<=>(const Value&) const = default;
};

inline std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::integer: return std::to_string(v.number);
    case Value::Kind::symbol: return v.symbol;
    case Value::Kind::boolean: return v.number ? "true" : "false";
  }
  return {};
}

/// A finite domain: an ordered enumeration of symbols or an integer range.
struct Domain {
  enum class Kind { enumeration, range };

  Kind kind = Kind::enumeration;
  std::vector<std::string> members;
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  static Domain enumeration(std::vector<std::string> ms) { return {Kind::enumeration, std::move(ms), 0, 0}; }
  static Domain range(std::int64_t lo, std::int64_t hi) { return {Kind::range, {}, lo, hi}; }

  [[nodiscard]] bool contains(const Value& v) const {
    if (kind == Kind::range) return v.kind == Value::Kind::integer && v.number >= lo && v.number <= hi;
    return v.kind == Value::Kind::symbol && std::find(members.begin(), members.end(), v.symbol) != members.end();
  }

  [[nodiscard]] std::size_t size() const {
    return kind == Kind::range ? static_cast<std::size_t>(hi - lo + 1) : members.size();
  }

  /// Values in domain order (declaration order, or ascending for ranges).
  [[nodiscard]] std::vector<Value> values() const {
    std::vector<Value> out;
    if (kind == Kind::range) {
      for (auto i = lo; i <= hi; ++i) out.push_back(Value::integer(i));
    } else {
      for (const auto& m : members) out.push_back(Value::sym(m));
    }
    return out;
  }

  bool operator==(const Domain&) const = default;
};

inline std::string to_string(const Domain& d) {
  if (d.kind == Domain::Kind::range) return std::to_string(d.lo) + ".." + std::to_string(d.hi);
  std::string s = "{";
  for (std::size_t i = 0; i < d.members.size(); ++i) s += (i ? ", " : "") + d.members[i];
  return s + "}";
}

struct Expr {
  enum class Op { int_lit, sym_lit, bool_lit, var, not_, and_, or_, eq, ne, lt, le, gt, ge, add, sub };

  Op op = Op::bool_lit;
  std::int64_t number = 1;
  std::string name;  // symbol or variable name
  std::vector<Expr> args;

  static Expr integer(std::int64_t n) { return {Op::int_lit, n, {}, {}}; }
  static Expr symbol(std::string s) { return {Op::sym_lit, 0, std::move(s), {}}; }
  static Expr boolean(bool b) { return {Op::bool_lit, b ? 1 : 0, {}, {}}; }
  static Expr variable(std::string v) { return {Op::var, 0, std::move(v), {}}; }
  static Expr negate(Expr e) { return {Op::not_, 0, {}, {std::move(e)}}; }
  static Expr binary(Op op, Expr l, Expr r) { return {op, 0, {}, {std::move(l), std::move(r)}}; }

  [[nodiscard]] bool is_true_literal() const { return op == Op::bool_lit && number != 0; }

  bool operator==(const Expr&) const = default;
};

namespace detail {

inline int precedence(Expr::Op op) {
  using Op = Expr::Op;
  switch (op) {
    case Op::or_: return 1;
    case Op::and_: return 2;
    case Op::eq: case Op::ne: case Op::lt: case Op::le: case Op::gt: case Op::ge: return 3;
    case Op::add: case Op::sub: return 4;
    case Op::not_: return 5;
    default: return 6;
  }
}

inline std::string_view spelling(Expr::Op op) {
  using Op = Expr::Op;
  switch (op) {
    case Op::and_: return "&";
    case Op::or_: return "|";
    case Op::eq: return "=";
    case Op::ne: return "!=";
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::gt: return ">";
    case Op::ge: return ">=";
    case Op::add: return "+";
    case Op::sub: return "-";
    default: return "?";
  }
}

inline bool is_comparison(Expr::Op op) {
  using Op = Expr::Op;
  return op == Op::eq || op == Op::ne || op == Op::lt || op == Op::le || op == Op::gt || op == Op::ge;
}

}  // namespace detail

/// Renders an expression in the concrete syntax of `.ad` files. Binary
/// operators are left-associative; parentheses are added exactly where the
/// tree would otherwise reparse differently, plus around comparisons nested
/// in connectives for readability.
inline std::string to_string(const Expr& e) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::int_lit: return std::to_string(e.number);
    case Op::bool_lit: return e.number ? "true" : "false";
    case Op::sym_lit:
    case Op::var: return e.name;
    case Op::not_: {
      const auto& a = e.args[0];
      auto inner = to_string(a);
      return detail::precedence(a.op) < detail::precedence(Op::not_) ? "!(" + inner + ")" : "!" + inner;
    }
    default: break;
  }
  const int p = detail::precedence(e.op);
  auto side = [&](const Expr& c, bool right) {
    auto s = to_string(c);
    const int cp = detail::precedence(c.op);
    bool paren = cp < p || (right && cp == p) || (detail::is_comparison(e.op) && cp == p);
    if (!paren && (e.op == Op::and_ || e.op == Op::or_) && detail::is_comparison(c.op)) paren = true;
    return paren ? "(" + s + ")" : s;
  };
  return side(e.args[0], false) + " " + std::string(detail::spelling(e.op)) + " " + side(e.args[1], true);
}

enum class VarKind { input, local };

struct VariableDecl {
  std::string name;
  Domain domain;
  VarKind kind = VarKind::local;
  std::optional<Value> init;
  SourceSpan span{};

  bool operator==(const VariableDecl& o) const {
    return name == o.name && domain == o.domain && kind == o.kind && init == o.init;
  }
};

struct Assignment {
  std::string target;
  Expr value;
  bool operator==(const Assignment&) const = default;
};

enum class NodeKind { initial, final_, action, decision, merge, fork, join };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::initial: return "initial";
    case NodeKind::final_: return "final";
    case NodeKind::action: return "action";
    case NodeKind::decision: return "decision";
    case NodeKind::merge: return "merge";
    case NodeKind::fork: return "fork";
    case NodeKind::join: return "join";
  }
  return "?";
}

/// Initial, final and action nodes carry control state; the rest only route.
inline bool is_control_node(NodeKind k) {
  return k == NodeKind::initial || k == NodeKind::final_ || k == NodeKind::action;
}

struct Node {
  std::string id;
  NodeKind kind = NodeKind::action;
  std::string action_name;
  std::vector<Assignment> assignments;
  SourceSpan span{};

  bool operator==(const Node& o) const {
    return id == o.id && kind == o.kind && action_name == o.action_name && assignments == o.assignments;
  }
};

struct Transition {
  std::string src;
  std::string tgt;
  Expr guard = Expr::boolean(true);
  SourceSpan span{};

  [[nodiscard]] std::string label() const { return src + "->" + tgt; }
  bool operator==(const Transition& o) const { return src == o.src && tgt == o.tgt && guard == o.guard; }
};

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;

struct ActivityDiagram {
  std::string name;
  std::vector<VariableDecl> vars;
  std::vector<Node> nodes;
  std::vector<Transition> transitions;

  [[nodiscard]] std::optional<NodeIndex> find_node(std::string_view id) const {
    for (NodeIndex i = 0; i < nodes.size(); ++i)
      if (nodes[i].id == id) return i;
    return std::nullopt;
  }

  [[nodiscard]] const VariableDecl* find_var(std::string_view n) const {
    for (const auto& v : vars)
      if (v.name == n) return &v;
    return nullptr;
  }

  [[nodiscard]] const Node& node(std::string_view id) const { return nodes.at(*find_node(id)); }

  [[nodiscard]] std::vector<EdgeIndex> incoming(std::string_view id) const {
    std::vector<EdgeIndex> out;
    for (EdgeIndex i = 0; i < transitions.size(); ++i)
      if (transitions[i].tgt == id) out.push_back(i);
    return out;
  }

  [[nodiscard]] std::vector<EdgeIndex> outgoing(std::string_view id) const {
    std::vector<EdgeIndex> out;
    for (EdgeIndex i = 0; i < transitions.size(); ++i)
      if (transitions[i].src == id) out.push_back(i);
    return out;
  }

  [[nodiscard]] std::vector<const VariableDecl*> vars_of(VarKind k) const {
    std::vector<const VariableDecl*> out;
    for (const auto& v : vars)
      if (v.kind == k) out.push_back(&v);
    return out;
  }

  bool operator==(const ActivityDiagram&) const = default;
};

using Env = std::map<std::string, Value, std::less<>>;

/// Evaluates a type-correct expression under a total environment.
/// Arithmetic results are plain integers; domain checks belong to the caller.
inline Value eval(const Expr& e, const Env& env) {
  using Op = Expr::Op;
  auto as_bool = [](const Value& v) {
    if (v.kind != Value::Kind::boolean) throw EvalError("expected a boolean operand, got '" + to_string(v) + "'");
    return v.number != 0;
  };
  auto as_int = [](const Value& v) {
    if (v.kind != Value::Kind::integer) throw EvalError("expected an integer operand, got '" + to_string(v) + "'");
    return v.number;
  };
  switch (e.op) {
    case Op::int_lit: return Value::integer(e.number);
    case Op::bool_lit: return Value::boolean(e.number != 0);
    case Op::sym_lit: return Value::sym(e.name);
    case Op::var: {
      auto it = env.find(e.name);
      if (it == env.end()) throw EvalError("unbound variable '" + e.name + "'");
      return it->second;
    }
    case Op::not_: return Value::boolean(!as_bool(eval(e.args[0], env)));
    case Op::and_: return Value::boolean(as_bool(eval(e.args[0], env)) && as_bool(eval(e.args[1], env)));
    case Op::or_: return Value::boolean(as_bool(eval(e.args[0], env)) || as_bool(eval(e.args[1], env)));
    case Op::add: return Value::integer(as_int(eval(e.args[0], env)) + as_int(eval(e.args[1], env)));
    case Op::sub: return Value::integer(as_int(eval(e.args[0], env)) - as_int(eval(e.args[1], env)));
    case Op::eq:
    case Op::ne: {
      auto l = eval(e.args[0], env);
      auto r = eval(e.args[1], env);
      if (l.kind != r.kind) throw EvalError("comparison of mismatched kinds in '" + to_string(e) + "'");
      return Value::boolean((l == r) == (e.op == Op::eq));
    }
    case Op::lt: return Value::boolean(as_int(eval(e.args[0], env)) < as_int(eval(e.args[1], env)));
    case Op::le: return Value::boolean(as_int(eval(e.args[0], env)) <= as_int(eval(e.args[1], env)));
    case Op::gt: return Value::boolean(as_int(eval(e.args[0], env)) > as_int(eval(e.args[1], env)));
    case Op::ge: return Value::boolean(as_int(eval(e.args[0], env)) >= as_int(eval(e.args[1], env)));
  }
  throw EvalError("unknown operator");
}

/// Static type of an expression relative to a diagram's declarations.
struct ExprType {
  enum class Kind { boolean, integer, enumeration, symbol, error };
  Kind kind = Kind::error;
  const Domain* domain = nullptr;  // enumeration
  std::string symbol;              // symbol literal

  ExprType() = default;
  ExprType(Kind k, const Domain* d = nullptr, std::string s = {}) : kind(k), domain(d), symbol(std::move(s)) {}
};

/// Infers the type of `e`, appending a "type" diagnostic for each fault.
inline ExprType infer_type(const Expr& e, const ActivityDiagram& ad, std::vector<Diagnostic>& out,
                           const std::string& subject, SourceSpan span = {}) {
  using Op = Expr::Op;
  using K = ExprType::Kind;
  auto fail = [&](std::string msg) {
    out.push_back({"type", subject, std::move(msg), span});
    return ExprType{};
  };
  auto sub = [&](const Expr& c) { return infer_type(c, ad, out, subject, span); };
  switch (e.op) {
    case Op::int_lit: return {K::integer};
    case Op::bool_lit: return {K::boolean};
    case Op::sym_lit: return {K::symbol, nullptr, e.name};
    case Op::var: {
      const auto* v = ad.find_var(e.name);
      if (!v) return fail("undeclared variable '" + e.name + "'");
      if (v->domain.kind == Domain::Kind::range) return {K::integer};
      return {K::enumeration, &v->domain};
    }
    case Op::not_: {
      auto t = sub(e.args[0]);
      if (t.kind == K::error) return t;
      if (t.kind != K::boolean) return fail("operand of '!' is not boolean in '" + to_string(e) + "'");
      return {K::boolean};
    }
    case Op::and_:
    case Op::or_: {
      auto l = sub(e.args[0]);
      auto r = sub(e.args[1]);
      if (l.kind == K::error || r.kind == K::error) return {};
      if (l.kind != K::boolean || r.kind != K::boolean)
        return fail("operands of '" + std::string(detail::spelling(e.op)) + "' are not boolean in '" + to_string(e) + "'");
      return {K::boolean};
    }
    case Op::add:
    case Op::sub:
    case Op::lt:
    case Op::le:
    case Op::gt:
    case Op::ge: {
      auto l = sub(e.args[0]);
      auto r = sub(e.args[1]);
      if (l.kind == K::error || r.kind == K::error) return {};
      if (l.kind != K::integer || r.kind != K::integer)
        return fail("'" + std::string(detail::spelling(e.op)) + "' needs integer operands in '" + to_string(e) + "'");
      return {(e.op == Op::add || e.op == Op::sub) ? K::integer : K::boolean};
    }
    case Op::eq:
    case Op::ne: {
      auto l = sub(e.args[0]);
      auto r = sub(e.args[1]);
      if (l.kind == K::error || r.kind == K::error) return {};
      if (l.kind == K::symbol) std::swap(l, r);
      bool ok = false;
      if (l.kind == K::enumeration && r.kind == K::symbol) {
        ok = l.domain->contains(Value::sym(r.symbol));
        if (!ok) return fail("'" + r.symbol + "' is neither a declared variable nor a member of " + to_string(*l.domain));
      } else if (l.kind == K::enumeration && r.kind == K::enumeration) {
        ok = *l.domain == *r.domain;
      } else if (l.kind == K::symbol && r.kind == K::symbol) {
        ok = true;
      } else {
        ok = l.kind == r.kind && (l.kind == K::integer || l.kind == K::boolean);
      }
      if (!ok) return fail("operands of '" + std::string(detail::spelling(e.op)) + "' have different kinds in '" + to_string(e) + "'");
      return {K::boolean};
    }
  }
  return fail("unknown operator");
}

/// Variables referenced anywhere in `e`, in first-occurrence order.
inline void referenced_vars(const Expr& e, std::vector<std::string>& out) {
  if (e.op == Expr::Op::var && std::find(out.begin(), out.end(), e.name) == out.end()) out.push_back(e.name);
  for (const auto& a : e.args) referenced_vars(a, out);
}

}  // namespace adsmv
