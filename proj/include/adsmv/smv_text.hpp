#pragma once

// Printer and subset parser for `.smv` text.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adsmv/smv_ir.hpp"

namespace adsmv::smv {

namespace detail {

// Binding strength, loosest first, following NuSMV.
inline int precedence(Expr::Op op) {
  using Op = Expr::Op;
  switch (op) {
    case Op::implies: return 1;
    case Op::iff: return 2;
    case Op::or_: return 3;
    case Op::and_: return 4;
    case Op::eq: case Op::ne: case Op::lt: case Op::le: case Op::gt: case Op::ge: return 5;
    case Op::add: case Op::sub: return 6;
    case Op::not_: return 7;
    default: return 8;
  }
}

inline bool is_comparison(Expr::Op op) { return precedence(op) == 5; }
inline bool is_connective(Expr::Op op) { return precedence(op) >= 1 && precedence(op) <= 4; }

inline std::string_view spelling(Expr::Op op) {
  using Op = Expr::Op;
  switch (op) {
    case Op::implies: return "->";
    case Op::iff: return "<->";
    case Op::or_: return "|";
    case Op::and_: return "&";
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

inline std::string inline_expr(const Expr& e);

// Parenthesise `child` as an operand of `parent` so that it reparses to the
// same tree; comparisons under connectives are bracketed for readability.
inline std::string operand(const Expr& child, Expr::Op parent, bool right) {
  auto s = inline_expr(child);
  const int cp = precedence(child.op);
  const int pp = precedence(parent);
  bool paren = cp < pp;
  if (cp == pp) {
    if (parent == Expr::Op::implies) paren = !right;  // right-associative
    else paren = right || is_comparison(parent);
  }
  if (is_connective(parent) && is_comparison(child.op)) paren = true;
  return paren ? "(" + s + ")" : s;
}

inline std::string inline_expr(const Expr& e) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::ident: return e.name;
    case Op::integer: return std::to_string(e.number);
    case Op::next: return "next(" + inline_expr(e.args[0]) + ")";
    case Op::not_: {
      const auto& a = e.args[0];
      return precedence(a.op) < precedence(Op::not_) ? "!(" + inline_expr(a) + ")" : "!" + inline_expr(a);
    }
    default:
      return operand(e.args[0], e.op, false) + " " + std::string(spelling(e.op)) + " " + operand(e.args[1], e.op, true);
  }
}

inline std::vector<const Expr*> flatten_left(const Expr& e, Expr::Op op) {
  std::vector<const Expr*> out;
  const Expr* cur = &e;
  while (cur->op == op) {
    out.push_back(&cur->args[1]);
    cur = &cur->args[0];
  }
  out.push_back(cur);
  return {out.rbegin(), out.rend()};
}

inline void comment_lines(std::string& out, const std::vector<std::string>& cs, int indent) {
  for (const auto& c : cs) out += std::string(indent, ' ') + "-- " + c + "\n";
}

// One chain element on its own line(s). An element that is itself a chain
// of the other connective is broken one operand per line inside parentheses.
inline void element(std::string& out, const Expr& x, Expr::Op chain, int indent, const std::string& lead,
                    const std::string& suffix) {
  comment_lines(out, x.comments, indent);
  const std::string pad(indent, ' ');
  const Expr::Op other = chain == Expr::Op::and_ ? Expr::Op::or_ : Expr::Op::and_;
  if (x.op == other) {
    auto parts = flatten_left(x, other);
    const std::string op = " " + std::string(spelling(other));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      comment_lines(out, parts[i]->comments, indent + 2);
      std::string text = operand(*parts[i], other, i != 0);
      out += (i == 0 ? pad + lead + "( " : pad + "    ") + text + (i + 1 < parts.size() ? op : " )" + suffix) + "\n";
    }
    return;
  }
  out += pad + lead + operand(x, chain, true) + suffix + "\n";
}

// A block-level expression, laid out one conjunct (or disjunct) per line.
inline void block(std::string& out, const Expr& e, int indent, const std::string& lead, const std::string& terminator) {
  const std::string pad(indent, ' ');
  if (e.op != Expr::Op::and_ && e.op != Expr::Op::or_) {
    comment_lines(out, e.comments, indent);
    out += pad + lead + inline_expr(e) + terminator + "\n";
    return;
  }
  comment_lines(out, e.comments, indent);
  auto parts = flatten_left(e, e.op);
  const std::string op = " " + std::string(spelling(e.op));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const bool last = i + 1 == parts.size();
    const int ind = i == 0 ? indent : indent + (lead.empty() ? 0 : 2);
    std::string text;
    element(text, *parts[i], e.op, ind, i == 0 ? lead : "", last ? terminator : op);
    out += text;
  }
}

}  // namespace detail

/// Renders a module as SMV text. Sections appear in the order VAR, INIT,
/// DEFINE blocks, TRANS blocks; comments become `--` lines.
inline std::string print_smv(const Module& m) {
  std::string out;
  if (m.name) out += "MODULE " + *m.name + "\n";
  if (!m.vars.empty()) {
    out += "VAR\n";
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
      const auto& v = m.vars[i];
      if (i && !v.comments.empty()) out += "\n";
      detail::comment_lines(out, v.comments, 2);
      out += "  " + v.name + " : ";
      if (v.boolean) {
        out += "boolean";
      } else {
        out += "{";
        for (std::size_t k = 0; k < v.literals.size(); ++k) out += (k ? ", " : "") + v.literals[k].text();
        out += "}";
      }
      out += ";\n";
    }
  }
  for (const auto& e : m.inits) {
    if (!out.empty()) out += "\n";
    out += "INIT\n";
    detail::block(out, e, 2, "", ";");
  }
  for (const auto& b : m.defines) {
    if (!out.empty()) out += "\n";
    detail::comment_lines(out, b.comments, 0);
    out += "DEFINE\n";
    for (const auto& d : b.defines) detail::block(out, d.expr, 2, d.name + " := ", ";");
  }
  for (const auto& e : m.trans) {
    if (!out.empty()) out += "\n";
    out += "TRANS\n";
    detail::block(out, e, 2, "", ";");
  }
  return out;
}

struct SmvParseResult {
  std::optional<Module> module;
  std::vector<Diagnostic> errors;
  explicit operator bool() const { return module.has_value(); }
};

namespace detail {

struct Token {
  enum class Kind { ident, integer, punct, end };
  Kind kind = Kind::end;
  std::string text;
  SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src, std::vector<Diagnostic>& errors) {
  std::vector<Token> toks;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t line_start = 0;
  auto span = [&](std::size_t b, std::size_t e) { return SourceSpan{b, e, line, b - line_start + 1}; };
  while (true) {
    while (pos < src.size()) {
      if (src[pos] == '\n') {
        ++pos;
        ++line;
        line_start = pos;
      } else if (std::isspace(static_cast<unsigned char>(src[pos]))) {
        ++pos;
      } else if (src.substr(pos, 2) == "--") {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    if (pos >= src.size()) {
      toks.push_back({Token::Kind::end, "", span(pos, pos)});
      return toks;
    }
    const std::size_t b = pos;
    const char c = src[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' || src[pos] == '$' ||
                                  src[pos] == '#'))
        ++pos;
      toks.push_back({Token::Kind::ident, std::string(src.substr(b, pos - b)), span(b, pos)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      toks.push_back({Token::Kind::integer, std::string(src.substr(b, pos - b)), span(b, pos)});
      continue;
    }
    static constexpr std::string_view puncts[] = {"<->", "->", ":=", "!=", "<=", ">=", "..", "{", "}", "(", ")", ";", ":",
                                                  ",", "&", "|", "!", "=", "<", ">", "+", "-", "[", "]", "*", "/"};
    bool matched = false;
    for (auto p : puncts) {
      if (src.substr(pos, p.size()) == p) {
        pos += p.size();
        toks.push_back({Token::Kind::punct, std::string(p), span(b, pos)});
        matched = true;
        break;
      }
    }
    if (!matched) {
      errors.push_back({"smv-syntax", "", std::string("unexpected character '") + c + "'", span(b, b + 1)});
      ++pos;
    }
  }
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& errors) : toks_(std::move(toks)), errors_(errors) {}

  std::optional<Module> run() {
    Module m;
    if (is_word("MODULE")) {
      advance();
      std::string n;
      if (!ident(n, "module name")) return std::nullopt;
      if (is_punct("(")) return fail("modules with parameters are outside the supported subset");
      m.name = n;
    }
    while (!at_end()) {
      if (is_word("VAR")) {
        advance();
        while (peek().kind == Token::Kind::ident && !is_section_word()) {
          auto v = var_decl();
          if (!v) return std::nullopt;
          m.vars.push_back(std::move(*v));
        }
      } else if (is_word("INIT") || is_word("TRANS")) {
        const bool init = is_word("INIT");
        advance();
        auto e = expr();
        if (!e) return std::nullopt;
        if (is_punct(";")) advance();
        (init ? m.inits : m.trans).push_back(std::move(*e));
      } else if (is_word("DEFINE")) {
        advance();
        DefineBlock b;
        while (peek().kind == Token::Kind::ident && !is_section_word()) {
          Define d;
          if (!ident(d.name, "define name") || !expect(":=")) return std::nullopt;
          auto e = expr();
          if (!e || !expect(";")) return std::nullopt;
          d.expr = std::move(*e);
          b.defines.push_back(std::move(d));
        }
        m.defines.push_back(std::move(b));
      } else if (peek().kind == Token::Kind::ident && is_unsupported_section(peek().text)) {
        return fail("'" + peek().text + "' is outside the supported SMV subset");
      } else {
        return fail("expected a section keyword but found '" + describe() + "'");
      }
    }
    return m;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == Token::Kind::end; }
  void advance() {
    if (!at_end()) ++pos_;
  }
  bool is_punct(std::string_view p) const { return peek().kind == Token::Kind::punct && peek().text == p; }
  bool is_word(std::string_view w) const { return peek().kind == Token::Kind::ident && peek().text == w; }
  bool is_section_word() const {
    return is_word("VAR") || is_word("INIT") || is_word("TRANS") || is_word("DEFINE") || is_word("MODULE") ||
           is_unsupported_section(peek().text);
  }
  static bool is_unsupported_section(std::string_view w) {
    static constexpr std::string_view words[] = {"ASSIGN", "SPEC", "CTLSPEC", "LTLSPEC", "INVARSPEC", "INVAR", "FAIRNESS",
                                                 "JUSTICE", "COMPASSION", "IVAR", "FROZENVAR", "CONSTANTS", "MODULE", "PSLSPEC"};
    for (auto x : words)
      if (w == x) return true;
    return false;
  }
  std::string describe() const { return at_end() ? "end of input" : peek().text; }

  std::nullopt_t fail(std::string msg) {
    errors_.push_back({"smv-syntax", "", std::move(msg), peek().span});
    return std::nullopt;
  }
  bool expect(std::string_view p) {
    if (is_punct(p)) {
      advance();
      return true;
    }
    fail("expected '" + std::string(p) + "' but found '" + describe() + "'");
    return false;
  }
  bool ident(std::string& out, std::string_view what) {
    if (peek().kind == Token::Kind::ident) {
      out = peek().text;
      advance();
      return true;
    }
    fail("expected " + std::string(what) + " but found '" + describe() + "'");
    return false;
  }

  std::optional<VarDecl> var_decl() {
    VarDecl v;
    if (!ident(v.name, "variable name") || !expect(":")) return std::nullopt;
    if (is_word("boolean")) {
      advance();
    } else if (is_punct("{")) {
      advance();
      v.boolean = false;
      for (;;) {
        if (peek().kind == Token::Kind::ident) {
          v.literals.push_back(Literal::symbol(peek().text));
          advance();
        } else {
          bool neg = false;
          if (is_punct("-")) {
            neg = true;
            advance();
          }
          if (peek().kind != Token::Kind::integer) return fail("expected an enum literal but found '" + describe() + "'");
          auto n = std::stoll(peek().text);
          v.literals.push_back(Literal::integer(neg ? -n : n));
          advance();
        }
        if (is_punct(",")) {
          advance();
          continue;
        }
        if (!expect("}")) return std::nullopt;
        break;
      }
    } else {
      return fail("type '" + describe() + "' is outside the supported subset (boolean or enumeration)");
    }
    if (!expect(";")) return std::nullopt;
    return v;
  }

  std::optional<Expr> expr() { return implies(); }

  std::optional<Expr> implies() {
    auto lhs = left_assoc(2);
    if (!lhs) return std::nullopt;
    if (!is_punct("->")) return lhs;
    advance();
    auto rhs = implies();
    if (!rhs) return std::nullopt;
    return Expr::binary(Expr::Op::implies, std::move(*lhs), std::move(*rhs));
  }

  std::optional<Expr::Op> op_at(int level) const {
    using Op = Expr::Op;
    if (peek().kind != Token::Kind::punct) return std::nullopt;
    const auto& t = peek().text;
    switch (level) {
      case 2: if (t == "<->") return Op::iff; break;
      case 3: if (t == "|") return Op::or_; break;
      case 4: if (t == "&") return Op::and_; break;
      case 5:
        if (t == "=") return Op::eq;
        if (t == "!=") return Op::ne;
        if (t == "<") return Op::lt;
        if (t == "<=") return Op::le;
        if (t == ">") return Op::gt;
        if (t == ">=") return Op::ge;
        break;
      case 6:
        if (t == "+") return Op::add;
        if (t == "-") return Op::sub;
        break;
      default: break;
    }
    return std::nullopt;
  }

  std::optional<Expr> left_assoc(int level) {
    if (level > 6) return unary();
    auto lhs = left_assoc(level + 1);
    if (!lhs) return std::nullopt;
    while (auto op = op_at(level)) {
      advance();
      auto rhs = left_assoc(level + 1);
      if (!rhs) return std::nullopt;
      lhs = Expr::binary(*op, std::move(*lhs), std::move(*rhs));
    }
    return lhs;
  }

  std::optional<Expr> unary() {
    if (is_punct("!")) {
      advance();
      auto e = unary();
      if (!e) return std::nullopt;
      return Expr::negate(std::move(*e));
    }
    if (is_punct("-")) {
      advance();
      if (peek().kind != Token::Kind::integer) return fail("unary minus applies to integer literals only");
      auto n = std::stoll(peek().text);
      advance();
      return Expr::integer(-n);
    }
    if (is_punct("(")) {
      advance();
      auto e = expr();
      if (!e || !expect(")")) return std::nullopt;
      return e;
    }
    if (peek().kind == Token::Kind::integer) {
      auto n = std::stoll(peek().text);
      advance();
      return Expr::integer(n);
    }
    if (is_word("next")) {
      advance();
      if (!expect("(")) return std::nullopt;
      auto e = expr();
      if (!e || !expect(")")) return std::nullopt;
      return Expr::next(std::move(*e));
    }
    if (is_word("TRUE") || is_word("FALSE")) {
      const bool t = is_word("TRUE");
      advance();
      return Expr::integer(t ? 1 : 0);
    }
    if (peek().kind == Token::Kind::ident && !is_section_word()) {
      auto e = Expr::ident(peek().text);
      advance();
      return e;
    }
    return fail("expected an expression but found '" + describe() + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& errors_;
};

}  // namespace detail

/// Parses the subset emitted by `print_smv`. Comments are discarded.
inline SmvParseResult parse_smv_subset(std::string_view text) {
  SmvParseResult r;
  auto toks = detail::lex(text, r.errors);
  if (!r.errors.empty()) return r;
  auto m = detail::Parser(std::move(toks), r.errors).run();
  if (r.errors.empty()) r.module = std::move(m);
  return r;
}

}  // namespace adsmv::smv
