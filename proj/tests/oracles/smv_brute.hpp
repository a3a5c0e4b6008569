#pragma once

// Naive reference semantics for SMV modules: values as strings, DEFINEs
// expanded by recursive substitution, every candidate valuation of the
// full domain product tested against every constraint.

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "adsmv/smv_ir.hpp"
#include "adsmv/trace.hpp"

namespace oracle {

using Valuation = std::map<std::string, std::string>;

struct Brute {
  const adsmv::smv::Module& m;

  std::vector<std::string> domain(const adsmv::smv::VarDecl& v) const {
    if (v.boolean) return {"0", "1"};
    std::vector<std::string> out;
    for (const auto& l : v.literals) out.push_back(l.text());
    return out;
  }

  // Evaluates to a string value; booleans are "0"/"1".
  std::string eval(const adsmv::smv::Expr& e, const Valuation& cur, const Valuation* nxt, bool in_next) const {
    using Op = adsmv::smv::Expr::Op;
    auto b = [](bool x) { return std::string(x ? "1" : "0"); };
    auto sub = [&](std::size_t i) { return eval(e.args[i], cur, nxt, in_next); };
    auto num = [&](std::size_t i) { return std::stoll(sub(i)); };
    switch (e.op) {
      case Op::integer: return std::to_string(e.number);
      case Op::ident: {
        const Valuation& env = in_next ? *nxt : cur;
        if (auto it = env.find(e.name); it != env.end()) return it->second;
        if (const auto* d = m.find_define(e.name)) return eval(d->expr, cur, nxt, in_next);
        return e.name;
      }
      case Op::next:
        if (!nxt) throw std::logic_error("next() without a next state");
        return eval(e.args[0], cur, nxt, true);
      case Op::not_: return b(sub(0) == "0");
      case Op::and_: return b(sub(0) == "1" && sub(1) == "1");
      case Op::or_: return b(sub(0) == "1" || sub(1) == "1");
      case Op::implies: return b(sub(0) == "0" || sub(1) == "1");
      case Op::iff: return b(sub(0) == sub(1));
      case Op::eq: return b(sub(0) == sub(1));
      case Op::ne: return b(sub(0) != sub(1));
      case Op::lt: return b(num(0) < num(1));
      case Op::le: return b(num(0) <= num(1));
      case Op::gt: return b(num(0) > num(1));
      case Op::ge: return b(num(0) >= num(1));
      case Op::add: return std::to_string(num(0) + num(1));
      case Op::sub: return std::to_string(num(0) - num(1));
    }
    throw std::logic_error("unknown operator");
  }

  void product(std::size_t k, Valuation& acc, const std::function<void(const Valuation&)>& f) const {
    if (k == m.vars.size()) {
      f(acc);
      return;
    }
    for (const auto& v : domain(m.vars[k])) {
      acc[m.vars[k].name] = v;
      product(k + 1, acc, f);
    }
  }

  std::vector<Valuation> initial_states() const {
    std::vector<Valuation> out;
    Valuation acc;
    product(0, acc, [&](const Valuation& s) {
      for (const auto& c : m.inits)
        if (eval(c, s, nullptr, false) != "1") return;
      out.push_back(s);
    });
    return out;
  }

  std::vector<Valuation> successors(const Valuation& pre) const {
    std::vector<Valuation> out;
    Valuation acc;
    product(0, acc, [&](const Valuation& post) {
      for (const auto& c : m.trans)
        if (eval(c, pre, &post, false) != "1") return;
      out.push_back(post);
    });
    return out;
  }

  // Plain depth-first enumeration, no memoisation.
  adsmv::TraceSet traces(std::size_t depth, const std::vector<std::string>& labels, const std::string& ac = "ac",
                         const std::string& idle = "nop") const {
    adsmv::TraceSet out;
    for (const auto& s : initial_states()) {
      adsmv::ActionTrace t;
      for (const auto& l : labels) t.labels.emplace_back(l, s.at(l));
      walk(s, depth, t, out, ac, idle);
    }
    return out;
  }

  void walk(const Valuation& s, std::size_t remaining, adsmv::ActionTrace& t, adsmv::TraceSet& out, const std::string& ac,
            const std::string& idle) const {
    if (remaining == 0) {
      t.end = adsmv::TraceEnd::cut;
      out.insert(t);
      return;
    }
    const auto next = successors(s);
    if (next.empty()) {
      t.end = adsmv::TraceEnd::deadlock;
      out.insert(t);
    }
    for (const auto& n : next) {
      if (n.at(ac) == idle) {
        t.end = adsmv::TraceEnd::terminated;
        out.insert(t);
        continue;
      }
      t.actions.push_back(n.at(ac));
      walk(n, remaining - 1, t, out, ac, idle);
      t.actions.pop_back();
    }
  }
};

}  // namespace oracle
