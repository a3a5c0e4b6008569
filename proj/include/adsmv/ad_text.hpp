#pragma once

// Concrete syntax of `.ad` files:
//
//   activity NAME {
//     input v : {a, b};            local w : 0..4 [init 0];
//     initial ID;  final ID;  decision ID;  merge ID;  fork ID;  join ID;
//     action ID "Action Name" [{ w := w + 1; }];
//     edge SRC -> TGT [[GUARD]];
//   }
//
// `#` starts a comment that runs to the end of the line. Declaration order
// is preserved; it drives canonical node numbering in the translator.

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adsmv/ad_model.hpp"

namespace adsmv {

struct ParseResult {
  std::optional<ActivityDiagram> diagram;
  std::vector<Diagnostic> errors;

  explicit operator bool() const { return diagram.has_value(); }
};

namespace detail {

struct AdToken {
  enum class Kind { ident, integer, string, punct, end };
  Kind kind = Kind::end;
  std::string text;
  SourceSpan span;
};

class AdLexer {
 public:
  explicit AdLexer(std::string_view src) : src_(src) {}

  std::vector<AdToken> run(std::vector<Diagnostic>& errors) {
    std::vector<AdToken> toks;
    for (;;) {
      skip_space();
      const std::size_t b = pos_;
      const auto span_at = [&](std::size_t e) { return SourceSpan{b, e, line_at(b), col_at(b)}; };
      if (pos_ >= src_.size()) {
        toks.push_back({AdToken::Kind::end, "", span_at(pos_)});
        return toks;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        toks.push_back({AdToken::Kind::ident, std::string(src_.substr(b, pos_ - b)), span_at(pos_)});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        toks.push_back({AdToken::Kind::integer, std::string(src_.substr(b, pos_ - b)), span_at(pos_)});
      } else if (c == '"') {
        std::string s;
        ++pos_;
        bool closed = false;
        while (pos_ < src_.size() && src_[pos_] != '\n') {
          char ch = src_[pos_++];
          if (ch == '"') {
            closed = true;
            break;
          }
          if (ch == '\\' && pos_ < src_.size()) ch = src_[pos_++];
          s += ch;
        }
        if (!closed) errors.push_back({"syntax", "", "unterminated string literal", span_at(pos_)});
        toks.push_back({AdToken::Kind::string, s, span_at(pos_)});
      } else {
        static constexpr std::string_view two[] = {"->", "..", ":=", "!=", "<=", ">="};
        std::string_view p = src_.substr(pos_, 1);
        for (auto t : two)
          if (src_.substr(pos_, 2) == t) p = t;
        if (p.size() == 1 && std::string_view("{}[]();:,&|!=<>+-").find(c) == std::string_view::npos) {
          errors.push_back({"syntax", "", std::string("unexpected character '") + c + "'", span_at(pos_ + 1)});
          ++pos_;
          continue;
        }
        pos_ += p.size();
        toks.push_back({AdToken::Kind::punct, std::string(p), span_at(pos_)});
      }
    }
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }
  std::size_t line_at(std::size_t off) {
    while (scan_ < off) {
      if (src_[scan_] == '\n') {
        ++line_;
        line_start_ = scan_ + 1;
      }
      ++scan_;
    }
    return line_;
  }
  std::size_t col_at(std::size_t off) { return off - line_start_ + 1; }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t scan_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

class AdParser {
 public:
  AdParser(std::vector<AdToken> toks, std::vector<Diagnostic>& errors) : toks_(std::move(toks)), errors_(errors) {}

  std::optional<ActivityDiagram> run() {
    if (!is_ident("activity")) {
      error("expected 'activity' header");
      return std::nullopt;
    }
    advance();
    ActivityDiagram ad;
    if (!expect_ident(ad.name, "activity name") || !expect("{")) return std::nullopt;
    while (!at_end() && !is_punct("}")) {
      const std::size_t before = errors_.size();
      statement(ad);
      if (errors_.size() != before) recover();
    }
    if (!expect("}")) return std::nullopt;
    if (!at_end()) error("unexpected text after the closing '}'");
    resolve(ad);
    if (!errors_.empty()) return std::nullopt;
    return ad;
  }

 private:
  const AdToken& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == AdToken::Kind::end; }
  void advance() {
    if (!at_end()) ++pos_;
  }
  bool is_punct(std::string_view p) const { return peek().kind == AdToken::Kind::punct && peek().text == p; }
  bool is_ident(std::string_view w) const { return peek().kind == AdToken::Kind::ident && peek().text == w; }

  void error(std::string msg) { errors_.push_back({"syntax", "", std::move(msg), peek().span}); }

  bool expect(std::string_view p) {
    if (is_punct(p)) {
      advance();
      return true;
    }
    error("expected '" + std::string(p) + "' but found '" + describe() + "'");
    return false;
  }
  bool expect_ident(std::string& out, std::string_view what) {
    if (peek().kind == AdToken::Kind::ident) {
      out = peek().text;
      advance();
      return true;
    }
    error("expected " + std::string(what) + " but found '" + describe() + "'");
    return false;
  }
  std::string describe() const { return at_end() ? "end of input" : peek().text; }

  void recover() {
    while (!at_end() && !is_punct(";") && !is_punct("}")) advance();
    if (is_punct(";")) advance();
  }

  void statement(ActivityDiagram& ad) {
    if (peek().kind != AdToken::Kind::ident) {
      error("expected a declaration but found '" + describe() + "'");
      return;
    }
    const AdToken kw = peek();
    advance();
    const std::string& w = kw.text;
    if (w == "input" || w == "local") {
      VariableDecl v;
      v.kind = w == "input" ? VarKind::input : VarKind::local;
      v.span = kw.span;
      if (!expect_ident(v.name, "variable name") || !expect(":")) return;
      if (!domain(v.domain)) return;
      if (is_ident("init")) {
        advance();
        auto val = literal();
        if (!val) return;
        v.init = *val;
      }
      if (!expect(";")) return;
      if (!var_names_.insert(v.name).second) {
        errors_.push_back({"duplicate-id", v.name, "variable '" + v.name + "' declared twice", kw.span});
        return;
      }
      ad.vars.push_back(std::move(v));
      return;
    }
    static const std::pair<std::string_view, NodeKind> kinds[] = {
        {"initial", NodeKind::initial}, {"final", NodeKind::final_}, {"action", NodeKind::action},
        {"decision", NodeKind::decision}, {"merge", NodeKind::merge}, {"fork", NodeKind::fork},
        {"join", NodeKind::join}};
    for (const auto& [word, kind] : kinds) {
      if (w != word) continue;
      Node n;
      n.kind = kind;
      n.span = kw.span;
      if (!expect_ident(n.id, "node id")) return;
      if (kind == NodeKind::action) {
        if (peek().kind != AdToken::Kind::string) {
          error("expected a quoted action name");
          return;
        }
        n.action_name = peek().text;
        advance();
        if (is_punct("{")) {
          advance();
          while (!at_end() && !is_punct("}")) {
            Assignment a;
            if (!expect_ident(a.target, "assignment target") || !expect(":=")) return;
            auto e = expr();
            if (!e || !expect(";")) return;
            a.value = std::move(*e);
            n.assignments.push_back(std::move(a));
          }
          if (!expect("}")) return;
        }
      }
      if (!expect(";")) return;
      if (!node_ids_.insert(n.id).second) {
        errors_.push_back({"duplicate-id", n.id, "node '" + n.id + "' declared twice", kw.span});
        return;
      }
      ad.nodes.push_back(std::move(n));
      return;
    }
    if (w == "edge") {
      Transition t;
      t.span = kw.span;
      if (!expect_ident(t.src, "source node") || !expect("->") || !expect_ident(t.tgt, "target node")) return;
      if (is_punct("[")) {
        advance();
        auto g = expr();
        if (!g || !expect("]")) return;
        t.guard = std::move(*g);
      }
      if (!expect(";")) return;
      ad.transitions.push_back(std::move(t));
      return;
    }
    errors_.push_back({"syntax", "", "unknown declaration '" + w + "'", kw.span});
  }

  std::optional<std::int64_t> signed_int() {
    bool neg = false;
    if (is_punct("-")) {
      neg = true;
      advance();
    }
    if (peek().kind != AdToken::Kind::integer) {
      error("expected an integer but found '" + describe() + "'");
      return std::nullopt;
    }
    std::int64_t v = std::stoll(peek().text);
    advance();
    return neg ? -v : v;
  }

  bool domain(Domain& d) {
    if (is_punct("{")) {
      advance();
      d.kind = Domain::Kind::enumeration;
      for (;;) {
        std::string m;
        if (!expect_ident(m, "enumeration member")) return false;
        d.members.push_back(m);
        if (is_punct(",")) {
          advance();
          continue;
        }
        return expect("}");
      }
    }
    auto lo = signed_int();
    if (!lo || !expect("..")) return false;
    auto hi = signed_int();
    if (!hi) return false;
    d = Domain::range(*lo, *hi);
    return true;
  }

  std::optional<Value> literal() {
    if (peek().kind == AdToken::Kind::ident) {
      auto v = Value::sym(peek().text);
      advance();
      return v;
    }
    auto n = signed_int();
    if (!n) return std::nullopt;
    return Value::integer(*n);
  }

  // Precedence climbing: | < & < comparisons < + - < ! < atoms.
  std::optional<Expr> expr() { return binary_level(1); }

  std::optional<Expr> binary_level(int level) {
    if (level > 4) return unary();
    auto lhs = binary_level(level + 1);
    if (!lhs) return std::nullopt;
    for (;;) {
      auto op = binary_op(level);
      if (!op) return lhs;
      advance();
      auto rhs = binary_level(level + 1);
      if (!rhs) return std::nullopt;
      lhs = Expr::binary(*op, std::move(*lhs), std::move(*rhs));
    }
  }

  std::optional<Expr::Op> binary_op(int level) const {
    using Op = Expr::Op;
    if (peek().kind != AdToken::Kind::punct) return std::nullopt;
    const auto& t = peek().text;
    switch (level) {
      case 1: if (t == "|") return Op::or_; break;
      case 2: if (t == "&") return Op::and_; break;
      case 3:
        if (t == "=") return Op::eq;
        if (t == "!=") return Op::ne;
        if (t == "<") return Op::lt;
        if (t == "<=") return Op::le;
        if (t == ">") return Op::gt;
        if (t == ">=") return Op::ge;
        break;
      case 4:
        if (t == "+") return Op::add;
        if (t == "-") return Op::sub;
        break;
      default: break;
    }
    return std::nullopt;
  }

  std::optional<Expr> unary() {
    if (is_punct("!")) {
      advance();
      auto e = unary();
      if (!e) return std::nullopt;
      return Expr::negate(std::move(*e));
    }
    if (is_punct("(")) {
      advance();
      auto e = expr();
      if (!e || !expect(")")) return std::nullopt;
      return e;
    }
    if (peek().kind == AdToken::Kind::integer || (is_punct("-") && toks_[pos_ + 1].kind == AdToken::Kind::integer)) {
      auto v = signed_int();
      if (!v) return std::nullopt;
      return Expr::integer(*v);
    }
    if (peek().kind == AdToken::Kind::ident) {
      std::string w = peek().text;
      advance();
      if (w == "true" || w == "false") return Expr::boolean(w == "true");
      return Expr::symbol(std::move(w));
    }
    error("expected an expression but found '" + describe() + "'");
    return std::nullopt;
  }

  // Identifiers naming declared variables become variable references; the
  // rest stay symbol literals. Edges must name declared nodes.
  void resolve(ActivityDiagram& ad) {
    for (auto& n : ad.nodes)
      for (auto& a : n.assignments) resolve_expr(a.value);
    for (auto& t : ad.transitions) {
      resolve_expr(t.guard);
      for (const auto* end : {&t.src, &t.tgt})
        if (!node_ids_.count(*end))
          errors_.push_back({"edge-endpoint", t.label(), "unknown node '" + *end + "'", t.span});
    }
  }
  void resolve_expr(Expr& e) {
    if (e.op == Expr::Op::sym_lit && var_names_.count(e.name)) e.op = Expr::Op::var;
    for (auto& a : e.args) resolve_expr(a);
  }

  std::vector<AdToken> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& errors_;
  std::set<std::string> node_ids_;
  std::set<std::string> var_names_;
};

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline ParseResult parse_ad(std::string_view text) {
  ParseResult r;
  auto toks = detail::AdLexer(text).run(r.errors);
  auto ad = detail::AdParser(std::move(toks), r.errors).run();
  if (r.errors.empty()) r.diagram = std::move(ad);
  return r;
}

inline std::string print_ad(const ActivityDiagram& ad) {
  std::string out = "activity " + ad.name + " {\n";
  for (const auto& v : ad.vars) {
    out += std::string("  ") + (v.kind == VarKind::input ? "input " : "local ") + v.name + " : " + to_string(v.domain);
    if (v.init) out += " init " + to_string(*v.init);
    out += ";\n";
  }
  if (!ad.vars.empty()) out += "\n";
  for (const auto& n : ad.nodes) {
    out += "  " + std::string(to_string(n.kind)) + " " + n.id;
    if (n.kind == NodeKind::action) {
      out += " " + detail::quote(n.action_name);
      if (!n.assignments.empty()) {
        out += " {\n";
        for (const auto& a : n.assignments) out += "    " + a.target + " := " + to_string(a.value) + ";\n";
        out += "  }";
      }
    }
    out += ";\n";
  }
  if (!ad.nodes.empty() && !ad.transitions.empty()) out += "\n";
  for (const auto& t : ad.transitions) {
    out += "  edge " + t.src + " -> " + t.tgt;
    if (!t.guard.is_true_literal()) out += " [" + to_string(t.guard) + "]";
    out += ";\n";
  }
  return out + "}\n";
}

}  // namespace adsmv
