#pragma once

// The SMV subset produced by the translator: VAR, INIT, DEFINE and TRANS
// sections over boolean and enumerated variables, with `next(.)`.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "adsmv/diagnostic.hpp"

namespace adsmv::smv {

struct Expr {
  enum class Op { ident, integer, not_, next, and_, or_, implies, iff, eq, ne, lt, le, gt, ge, add, sub };

  Op op = Op::integer;
  std::string name;
  std::int64_t number = 0;
  std::vector<Expr> args;
  std::vector<std::string> comments;  // printed as `--` lines before the expression

  static Expr ident(std::string n) { return {Op::ident, std::move(n), 0, {}, {}}; }
  static Expr integer(std::int64_t v) { return {Op::integer, {}, v, {}, {}}; }
  static Expr negate(Expr e) { return {Op::not_, {}, 0, {std::move(e)}, {}}; }
  static Expr next(Expr e) { return {Op::next, {}, 0, {std::move(e)}, {}}; }
  static Expr binary(Op op, Expr l, Expr r) { return {op, {}, 0, {std::move(l), std::move(r)}, {}}; }

  Expr&& with_comments(std::vector<std::string> cs) && {
    comments = std::move(cs);
    return std::move(*this);
  }

  bool operator==(const Expr& o) const { return op == o.op && name == o.name && number == o.number && args == o.args; }
};

inline Expr eq(Expr l, Expr r) { return Expr::binary(Expr::Op::eq, std::move(l), std::move(r)); }
inline Expr next_var(const std::string& v) { return Expr::next(Expr::ident(v)); }

/// Left-nested fold `((a op b) op c) ...`; the parser builds the same shape.
inline Expr fold(Expr::Op op, std::vector<Expr> items) {
  Expr acc = std::move(items.at(0));
  for (std::size_t i = 1; i < items.size(); ++i) acc = Expr::binary(op, std::move(acc), std::move(items[i]));
  return acc;
}
inline Expr conj(std::vector<Expr> items) { return fold(Expr::Op::and_, std::move(items)); }
inline Expr disj(std::vector<Expr> items) { return fold(Expr::Op::or_, std::move(items)); }

struct Literal {
  std::variant<std::int64_t, std::string> value;

  static Literal integer(std::int64_t n) { return {n}; }
  static Literal symbol(std::string s) { return {std::move(s)}; }
  [[nodiscard]] bool is_int() const { return std::holds_alternative<std::int64_t>(value); }
  [[nodiscard]] std::string text() const {
    return is_int() ? std::to_string(std::get<std::int64_t>(value)) : std::get<std::string>(value);
  }

  bool operator==(const Literal&) const = default;
  // Integers first (numeric), then symbols (lexicographic).
  auto operator<=>(const Literal&) const = default;
};

struct VarDecl {
  std::string name;
  bool boolean = true;
  std::vector<Literal> literals;  // enumerated type
  std::vector<std::string> comments;

  static VarDecl boolean_var(std::string n) { return {std::move(n), true, {}, {}}; }
  static VarDecl enum_var(std::string n, std::vector<Literal> ls) { return {std::move(n), false, std::move(ls), {}}; }

  bool operator==(const VarDecl& o) const { return name == o.name && boolean == o.boolean && literals == o.literals; }
};

struct Define {
  std::string name;
  Expr expr;
  bool operator==(const Define& o) const { return name == o.name && expr == o.expr; }
};

struct DefineBlock {
  std::vector<Define> defines;
  std::vector<std::string> comments;
  bool operator==(const DefineBlock& o) const { return defines == o.defines; }
};

struct Module {
  std::optional<std::string> name;  // optional `MODULE name` header
  std::vector<VarDecl> vars;
  std::vector<Expr> inits;  // one entry per INIT block
  std::vector<DefineBlock> defines;
  std::vector<Expr> trans;  // one entry per TRANS block

  bool operator==(const Module&) const = default;

  [[nodiscard]] const VarDecl* find_var(const std::string& n) const {
    for (const auto& v : vars)
      if (v.name == n) return &v;
    return nullptr;
  }
  [[nodiscard]] const Define* find_define(const std::string& n) const {
    for (const auto& b : defines)
      for (const auto& d : b.defines)
        if (d.name == n) return &d;
    return nullptr;
  }
  [[nodiscard]] std::vector<const Define*> all_defines() const {
    std::vector<const Define*> out;
    for (const auto& b : defines)
      for (const auto& d : b.defines) out.push_back(&d);
    return out;
  }
};

namespace detail {

inline void strip_comments(Expr& e) {
  e.comments.clear();
  for (auto& a : e.args) strip_comments(a);
}

inline void check_expr(const Expr& e, const Module& m, const std::set<std::string>& symbols, bool allow_next,
                       bool inside_next, const std::string& where, std::vector<Diagnostic>& out) {
  switch (e.op) {
    case Expr::Op::ident:
      if (!m.find_var(e.name) && !m.find_define(e.name) && !symbols.count(e.name))
        out.push_back({"smv-undeclared", where, "'" + e.name + "' is neither a variable, a define, nor an enum literal"});
      return;
    case Expr::Op::next:
      if (!allow_next) out.push_back({"smv-next", where, "next() is not allowed here"});
      if (inside_next) out.push_back({"smv-next", where, "next() must not nest"});
      check_expr(e.args[0], m, symbols, allow_next, true, where, out);
      return;
    default:
      for (const auto& a : e.args) check_expr(a, m, symbols, allow_next, inside_next, where, out);
  }
}

inline void define_refs(const Expr& e, const Module& m, std::vector<std::string>& out) {
  if (e.op == Expr::Op::ident && m.find_define(e.name)) out.push_back(e.name);
  for (const auto& a : e.args) define_refs(a, m, out);
}

}  // namespace detail

/// Checks the IR invariants: declared references, non-nesting `next`,
/// unique names, non-empty duplicate-free enums and acyclic DEFINEs.
inline std::vector<Diagnostic> check_well_formed(const Module& m) {
  std::vector<Diagnostic> out;
  std::set<std::string> names;
  std::set<std::string> symbols;
  for (const auto& v : m.vars) {
    if (!names.insert(v.name).second) out.push_back({"smv-duplicate", v.name, "name declared twice"});
    if (v.boolean) continue;
    std::set<Literal> uniq(v.literals.begin(), v.literals.end());
    if (v.literals.empty() || uniq.size() != v.literals.size())
      out.push_back({"smv-enum", v.name, "enum literal list must be non-empty and duplicate-free"});
    for (const auto& l : v.literals)
      if (!l.is_int()) symbols.insert(l.text());
  }
  for (const auto* d : m.all_defines())
    if (!names.insert(d->name).second) out.push_back({"smv-duplicate", d->name, "name declared twice"});
  for (const auto& s : symbols)
    if (m.find_var(s) || m.find_define(s))
      out.push_back({"smv-ambiguous", s, "enum literal shadows a variable or define"});

  for (std::size_t i = 0; i < m.inits.size(); ++i)
    detail::check_expr(m.inits[i], m, symbols, false, false, "INIT #" + std::to_string(i + 1), out);
  for (const auto* d : m.all_defines()) detail::check_expr(d->expr, m, symbols, true, false, d->name, out);
  for (std::size_t i = 0; i < m.trans.size(); ++i)
    detail::check_expr(m.trans[i], m, symbols, true, false, "TRANS #" + std::to_string(i + 1), out);

  // DFS colouring over define references.
  std::map<std::string, int> colour;
  std::vector<std::string> stack_names;
  auto visit = [&](auto&& self, const std::string& n) -> void {
    colour[n] = 1;
    std::vector<std::string> refs;
    detail::define_refs(m.find_define(n)->expr, m, refs);
    for (const auto& r : refs) {
      if (colour[r] == 1) out.push_back({"smv-define-cycle", n, "DEFINE '" + n + "' depends on itself via '" + r + "'"});
      else if (colour[r] == 0) self(self, r);
    }
    colour[n] = 2;
  };
  for (const auto* d : m.all_defines())
    if (colour[d->name] == 0) visit(visit, d->name);
  return out;
}

/// Canonical form for golden comparisons: comments dropped, enum literal
/// lists sorted. Declaration, conjunct and block order are kept.
inline Module normalize(Module m) {
  for (auto& v : m.vars) {
    v.comments.clear();
    std::sort(v.literals.begin(), v.literals.end());
  }
  for (auto& e : m.inits) detail::strip_comments(e);
  for (auto& b : m.defines) {
    b.comments.clear();
    for (auto& d : b.defines) detail::strip_comments(d.expr);
  }
  for (auto& e : m.trans) detail::strip_comments(e);
  return m;
}

}  // namespace adsmv::smv
