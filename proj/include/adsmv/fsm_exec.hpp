#pragma once

// Explicit-state execution of an SMV module: initial states, successors,
// bounded traces, deadlocks and per-step property checks.
//
// Expressions are compiled once into an arena and evaluated in Kleene
// three-valued logic over partial assignments, so that the candidate search
// for initial and next states can discard a partial valuation as soon as
// some INIT/TRANS conjunct is already false. Every complete valuation that
// survives is checked against all conjuncts, so the result equals plain
// enumeration of the domain product.

#include <cstdint>
#include <stdexcept>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adsmv/diagnostic.hpp"
#include "adsmv/smv_ir.hpp"
#include "adsmv/trace.hpp"

namespace adsmv::fsm {

struct Limits {
  std::size_t max_states = 1'000'000;  // reachable states and search nodes per enumeration
};

/// A variable value: an integer (booleans are 0/1) or an interned symbol.
struct Val {
  bool sym = false;
  std::int64_t v = 0;
  bool operator==(const Val&) const = default;
  auto operator<=>(const Val&) const = default;
};

using State = std::vector<Val>;

struct StepWitness {
  State pre;
  State post;
  std::set<std::string> taken;
};

class Model {
 public:
  explicit Model(smv::Module module, Limits limits = {}) : module_(std::move(module)), limits_(limits) {
    const smv::Module& m = module_;
    if (auto ds = smv::check_well_formed(m); !ds.empty()) throw DiagnosticError(std::move(ds));
    for (const auto& v : m.vars) {
      VarInfo info{v.name, v.boolean, {}};
      if (v.boolean) {
        info.domain = {Val{false, 0}, Val{false, 1}};
      } else {
        for (const auto& l : v.literals)
          info.domain.push_back(l.is_int() ? Val{false, std::get<std::int64_t>(l.value)} : Val{true, intern(l.text())});
      }
      var_index_[v.name] = vars_.size();
      vars_.push_back(std::move(info));
    }
    for (const auto* d : m.all_defines()) {
      define_index_[d->name] = defines_.size();
      defines_.push_back({d->name, &d->expr, {-1, -1}});
    }
    for (const auto& e : m.inits) flatten_into(e, false, init_roots_);
    for (const auto& e : m.trans) flatten_into(e, true, trans_roots_);
  }

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  [[nodiscard]] std::size_t var_count() const { return vars_.size(); }
  [[nodiscard]] const std::string& var_name(std::size_t i) const { return vars_[i].name; }
  [[nodiscard]] std::optional<std::size_t> var_index(const std::string& n) const {
    auto it = var_index_.find(n);
    if (it == var_index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] bool is_boolean(std::size_t i) const { return vars_[i].boolean; }
  [[nodiscard]] const Limits& limits() const { return limits_; }
  [[nodiscard]] const smv::Module& module() const { return module_; }

  [[nodiscard]] std::string text(const Val& v) const { return v.sym ? symbols_[static_cast<std::size_t>(v.v)] : std::to_string(v.v); }
  [[nodiscard]] std::optional<Val> symbol(const std::string& s) const {
    auto it = symbol_index_.find(s);
    if (it == symbol_index_.end()) return std::nullopt;
    return Val{true, static_cast<std::int64_t>(it->second)};
  }
  [[nodiscard]] std::string value_of(const State& s, const std::string& var) const { return text(s.at(*var_index(var))); }

  [[nodiscard]] std::string describe(const State& s) const {
    std::string out;
    for (std::size_t i = 0; i < vars_.size(); ++i) out += (i ? " " : "") + vars_[i].name + "=" + text(s[i]);
    return out;
  }

  /// Every total valuation satisfying the INIT constraints.
  [[nodiscard]] std::vector<State> initial_states() const {
    std::vector<State> out;
    State cur(vars_.size());
    State none;
    std::size_t budget = 0;
    auto search = [&](auto&& self, std::size_t k) -> void {
      if (++budget > limits_.max_states) throw ResourceLimitExceeded("initial-state search exceeded " + std::to_string(limits_.max_states) + " candidates");
      if (k == vars_.size()) {
        out.push_back(cur);
        return;
      }
      for (const auto& val : vars_[k].domain) {
        cur[k] = val;
        if (!refuted(init_roots_, cur, k + 1, none, 0)) self(self, k + 1);
      }
    };
    search(search, 0);
    return out;
  }

  /// All post-states related to `pre` by the TRANS constraints.
  [[nodiscard]] std::vector<State> successor_states(const State& pre) const {
    std::vector<State> out;
    State nxt(vars_.size());
    std::size_t budget = 0;
    auto search = [&](auto&& self, std::size_t k) -> void {
      if (++budget > limits_.max_states) throw ResourceLimitExceeded("successor search exceeded " + std::to_string(limits_.max_states) + " candidates");
      if (k == vars_.size()) {
        out.push_back(nxt);
        return;
      }
      for (const auto& val : vars_[k].domain) {
        nxt[k] = val;
        if (!refuted(trans_roots_, pre, vars_.size(), nxt, k + 1)) self(self, k + 1);
      }
    };
    search(search, 0);
    return out;
  }

  /// Names of defines ending in `suffix` that hold on the step (pre, post).
  [[nodiscard]] std::set<std::string> holding_defines(const State& pre, const State& post, const std::string& suffix) const {
    std::set<std::string> out;
    Ctx ctx{pre, post, vars_.size(), vars_.size(), std::vector<std::optional<std::optional<Val>>>(2 * defines_.size())};
    for (std::size_t d = 0; d < defines_.size(); ++d) {
      const auto& n = defines_[d].name;
      if (n.size() < suffix.size() || n.compare(n.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
      auto v = eval(define_root(d, false), ctx);
      if (v && !v->sym && v->v == 1) out.insert(n);
    }
    return out;
  }

  [[nodiscard]] std::vector<StepWitness> successors(const State& pre, const std::string& taken_suffix = "_taken") const {
    std::vector<StepWitness> out;
    for (auto& post : successor_states(pre)) {
      auto taken = holding_defines(pre, post, taken_suffix);
      out.push_back({pre, std::move(post), std::move(taken)});
    }
    return out;
  }

 private:
  struct VarInfo {
    std::string name;
    bool boolean = true;
    std::vector<Val> domain;
  };

  enum class K { constant, cur, nxt, define, not_, and_, or_, implies, iff, eq, ne, lt, le, gt, ge, add, sub };
  struct CNode {
    K kind = K::constant;
    Val value{};
    std::size_t index = 0;  // variable or define index
    bool shifted = false;   // define evaluated in the next state
    int lhs = -1;
    int rhs = -1;
  };
  struct DefineInfo {
    std::string name;
    const smv::Expr* expr;
    int roots[2];
  };
  struct Ctx {
    const State& cur;
    const State& nxt;
    std::size_t cur_known;
    std::size_t nxt_known;
    std::vector<std::optional<std::optional<Val>>> memo;
  };

  std::int64_t intern(const std::string& s) {
    auto [it, fresh] = symbol_index_.emplace(s, symbols_.size());
    if (fresh) symbols_.push_back(s);
    return static_cast<std::int64_t>(it->second);
  }

  int add(CNode n) const {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
  }

  int compile(const smv::Expr& e, bool allow_next, bool shifted) const {
    using Op = smv::Expr::Op;
    switch (e.op) {
      case Op::integer: return add({K::constant, Val{false, e.number}});
      case Op::ident: {
        if (auto it = var_index_.find(e.name); it != var_index_.end())
          return add({shifted ? K::nxt : K::cur, {}, it->second});
        if (auto it = define_index_.find(e.name); it != define_index_.end())
          return add({K::define, {}, it->second, shifted});
        auto it = symbol_index_.find(e.name);
        if (it == symbol_index_.end()) throw EvalError("unknown identifier '" + e.name + "'");
        return add({K::constant, Val{true, static_cast<std::int64_t>(it->second)}});
      }
      case Op::next:
        if (!allow_next || shifted) throw EvalError("next() used where it is not allowed");
        return compile(e.args[0], allow_next, true);
      case Op::not_: {
        int a = compile(e.args[0], allow_next, shifted);
        CNode n{K::not_};
        n.lhs = a;
        return add(n);
      }
      default: break;
    }
    K k = K::and_;
    switch (e.op) {
      case Op::and_: k = K::and_; break;
      case Op::or_: k = K::or_; break;
      case Op::implies: k = K::implies; break;
      case Op::iff: k = K::iff; break;
      case Op::eq: k = K::eq; break;
      case Op::ne: k = K::ne; break;
      case Op::lt: k = K::lt; break;
      case Op::le: k = K::le; break;
      case Op::gt: k = K::gt; break;
      case Op::ge: k = K::ge; break;
      case Op::add: k = K::add; break;
      case Op::sub: k = K::sub; break;
      default: break;
    }
    int l = compile(e.args[0], allow_next, shifted);
    int r = compile(e.args[1], allow_next, shifted);
    CNode n{k};
    n.lhs = l;
    n.rhs = r;
    return add(n);
  }

  void flatten_into(const smv::Expr& e, bool allow_next, std::vector<int>& roots) const {
    if (e.op == smv::Expr::Op::and_) {
      flatten_into(e.args[0], allow_next, roots);
      flatten_into(e.args[1], allow_next, roots);
      return;
    }
    roots.push_back(compile(e, allow_next, false));
  }

  int define_root(std::size_t d, bool shifted) const {
    auto& slot = defines_[d].roots[shifted ? 1 : 0];
    if (slot < 0) slot = compile(*defines_[d].expr, true, shifted);
    return slot;
  }

  static bool truth(const Val& v) {
    if (v.sym || (v.v != 0 && v.v != 1)) throw EvalError("non-boolean operand of a logical connective");
    return v.v == 1;
  }

  std::optional<Val> eval(int idx, Ctx& ctx) const {
    const CNode n = nodes_[static_cast<std::size_t>(idx)];
    auto boolean = [](bool b) { return std::optional<Val>(Val{false, b ? 1 : 0}); };
    switch (n.kind) {
      case K::constant: return n.value;
      case K::cur: return n.index < ctx.cur_known ? std::optional<Val>(ctx.cur[n.index]) : std::nullopt;
      case K::nxt: return n.index < ctx.nxt_known ? std::optional<Val>(ctx.nxt[n.index]) : std::nullopt;
      case K::define: {
        auto& slot = ctx.memo[2 * n.index + (n.shifted ? 1 : 0)];
        if (!slot) slot = eval(define_root(n.index, n.shifted), ctx);
        return *slot;
      }
      case K::not_: {
        auto a = eval(n.lhs, ctx);
        if (!a) return std::nullopt;
        return boolean(!truth(*a));
      }
      case K::and_:
      case K::or_:
      case K::implies: {
        // Short-circuit on a decided left operand, then on the right.
        const bool dominant = n.kind == K::and_ ? false : true;
        auto a = eval(n.lhs, ctx);
        std::optional<bool> av;
        if (a) av = n.kind == K::implies ? !truth(*a) : truth(*a);
        if (av && *av == dominant) return boolean(dominant);
        auto b = eval(n.rhs, ctx);
        std::optional<bool> bv;
        if (b) bv = truth(*b);
        if (bv && *bv == dominant) return boolean(dominant);
        if (av && bv) return boolean(!dominant);
        return std::nullopt;
      }
      default: break;
    }
    auto a = eval(n.lhs, ctx);
    if (!a) return std::nullopt;
    auto b = eval(n.rhs, ctx);
    if (!b) return std::nullopt;
    auto ints = [&]() {
      if (a->sym || b->sym) throw EvalError("arithmetic or ordering over symbols");
    };
    switch (n.kind) {
      case K::iff: return boolean(truth(*a) == truth(*b));
      case K::eq: return boolean(*a == *b);
      case K::ne: return boolean(!(*a == *b));
      case K::lt: ints(); return boolean(a->v < b->v);
      case K::le: ints(); return boolean(a->v <= b->v);
      case K::gt: ints(); return boolean(a->v > b->v);
      case K::ge: ints(); return boolean(a->v >= b->v);
      case K::add: ints(); return Val{false, a->v + b->v};
      case K::sub: ints(); return Val{false, a->v - b->v};
      default: break;
    }
    throw EvalError("unknown operator");
  }

  // True when some conjunct is already false under the partial valuation;
  // on a total valuation also demands every conjunct be true.
  bool refuted(const std::vector<int>& roots, const State& cur, std::size_t cur_known, const State& nxt,
               std::size_t nxt_known) const {
    Ctx ctx{cur, nxt, cur_known, nxt_known, std::vector<std::optional<std::optional<Val>>>(2 * defines_.size())};
    const bool total = cur_known == vars_.size() && (nxt.empty() || nxt_known == vars_.size());
    for (int r : roots) {
      auto v = eval(r, ctx);
      if (v && !truth(*v)) return true;
      if (total && !v) return true;
    }
    return false;
  }

  smv::Module module_;  // defines_ points into it
  Limits limits_;
  std::vector<VarInfo> vars_;
  std::map<std::string, std::size_t> var_index_;
  std::vector<std::string> symbols_;
  std::map<std::string, std::size_t> symbol_index_;
  mutable std::vector<DefineInfo> defines_;
  std::map<std::string, std::size_t> define_index_;
  mutable std::vector<CNode> nodes_;
  std::vector<int> init_roots_;
  std::vector<int> trans_roots_;
};

/// Names the observable and bookkeeping variables of a translated module.
struct Observation {
  std::string action_var = "ac";
  std::string node_var = "acnode";
  std::string idle = "nop";
  std::string taken_suffix = "_taken";
  std::vector<std::string> labels;  // variables whose initial values label each trace
};

inline std::vector<std::pair<State, std::vector<std::pair<std::string, std::string>>>> labelled_initials(
    const Model& model, const Observation& obs) {
  std::vector<std::pair<State, std::vector<std::pair<std::string, std::string>>>> out;
  for (auto& s : model.initial_states()) {
    std::vector<std::pair<std::string, std::string>> labels;
    for (const auto& l : obs.labels) labels.emplace_back(l, model.value_of(s, l));
    out.emplace_back(std::move(s), std::move(labels));
  }
  return out;
}

/// All maximal action traces of at most `depth` steps.
inline TraceSet action_traces(const Model& model, std::size_t depth, const Observation& obs = {}, TraceStats* stats = nullptr) {
  if (depth == 0) throw std::invalid_argument("depth must be positive");
  const auto ac = model.var_index(obs.action_var);
  if (!ac) throw EvalError("module has no action variable '" + obs.action_var + "'");
  std::size_t seen = 0;
  auto succ = [&](const State& s) {
    if (++seen > model.limits().max_states)
      throw ResourceLimitExceeded("trace enumeration exceeded " + std::to_string(model.limits().max_states) + " states");
    std::vector<std::pair<State, std::string>> out;
    for (auto& post : model.successor_states(s)) {
      auto a = model.text(post[*ac]);
      out.emplace_back(std::move(post), std::move(a));
    }
    return out;
  };
  return enumerate_traces(labelled_initials(model, obs), succ, depth, obs.idle, stats);
}

/// Breadth-first exploration to `depth` steps with shortest-path parents.
class Reachability {
 public:
  Reachability(const Model& model, std::size_t depth) : model_(model) {
    if (depth == 0) throw std::invalid_argument("depth must be positive");
    std::deque<std::size_t> queue;
    for (auto& s : model.initial_states()) {
      if (index_.emplace(s, states_.size()).second) {
        states_.push_back(std::move(s));
        parent_.push_back(npos);
        dist_.push_back(0);
        queue.push_back(states_.size() - 1);
      }
    }
    while (!queue.empty()) {
      const auto id = queue.front();
      queue.pop_front();
      auto steps = model.successors(states_[id]);
      for (const auto& w : steps) {
        if (dist_[id] >= depth) break;
        if (index_.emplace(w.post, states_.size()).second) {
          if (states_.size() >= model.limits().max_states)
            throw ResourceLimitExceeded("reachable state space exceeded " + std::to_string(model.limits().max_states) + " states");
          states_.push_back(w.post);
          parent_.push_back(id);
          dist_.push_back(dist_[id] + 1);
          queue.push_back(states_.size() - 1);
        }
      }
      steps_.push_back({id, std::move(steps)});
    }
  }

  struct Expansion {
    std::size_t state;
    std::vector<StepWitness> steps;
  };

  [[nodiscard]] const std::vector<State>& states() const { return states_; }
  [[nodiscard]] const std::vector<Expansion>& expansions() const { return steps_; }
  [[nodiscard]] std::size_t distance(std::size_t id) const { return dist_[id]; }

  [[nodiscard]] std::vector<State> path_to(std::size_t id) const {
    std::vector<State> out;
    for (auto cur = id; cur != npos; cur = parent_[cur]) out.push_back(states_[cur]);
    return {out.rbegin(), out.rend()};
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  const Model& model_;
  std::map<State, std::size_t> index_;
  std::vector<State> states_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> dist_;
  std::vector<Expansion> steps_;
};

struct Deadlock {
  State state;
  std::vector<State> path;  // initial state first, `state` last
};

/// Reachable states within `depth` steps that have no successor, each with a
/// shortest witness path.
inline std::vector<Deadlock> find_deadlocks(const Model& model, std::size_t depth) {
  Reachability r(model, depth);
  std::vector<Deadlock> out;
  for (const auto& e : r.expansions())
    if (e.steps.empty()) out.push_back({r.states()[e.state], r.path_to(e.state)});
  return out;
}

struct UniqueTakenResult {
  bool pass = true;
  std::optional<StepWitness> counterexample;
  std::size_t steps_checked = 0;
};

/// Every reachable step that does not move to the idle node must make
/// exactly one `_taken` define true.
inline UniqueTakenResult check_unique_taken(const Model& model, std::size_t depth, const Observation& obs = {}) {
  Reachability r(model, depth);
  const auto node = model.var_index(obs.node_var);
  const auto idle = model.symbol(obs.idle);
  UniqueTakenResult res;
  for (const auto& e : r.expansions()) {
    for (const auto& w : e.steps) {
      if (node && idle && w.post[*node] == *idle) continue;
      ++res.steps_checked;
      if (w.taken.size() != 1) {
        res.pass = false;
        res.counterexample = w;
        return res;
      }
    }
  }
  return res;
}

/// Frame properties expected of every translated module.
struct StepInvariants {
  std::vector<std::string> inputs;
  std::map<std::string, std::set<std::string>> local_writers;  // local -> node literals assigning it
  std::vector<std::string> control;                            // node/fork/join occupancy variables
};

/// Checks, on every reachable step within `depth`: inputs stay constant;
/// once the action is idle after the first step it stays idle and control
/// variables freeze; a local changes only when the next node assigns it.
/// Returns one message per violation (empty when all hold).
inline std::vector<std::string> check_step_invariants(const Model& model, std::size_t depth, const StepInvariants& inv,
                                                      const Observation& obs = {}) {
  Reachability r(model, depth);
  const auto ac = *model.var_index(obs.action_var);
  const auto node = *model.var_index(obs.node_var);
  const auto idle = model.symbol(obs.idle);
  std::vector<std::string> out;
  for (const auto& e : r.expansions()) {
    const bool started = r.distance(e.state) > 0;
    for (const auto& w : e.steps) {
      for (const auto& v : inv.inputs) {
        const auto i = *model.var_index(v);
        if (w.pre[i] != w.post[i]) out.push_back("input " + v + " changed: " + model.describe(w.pre) + " => " + model.describe(w.post));
      }
      if (started && idle && w.pre[ac] == *idle) {
        if (w.post[ac] != *idle) out.push_back("left idle: " + model.describe(w.pre) + " => " + model.describe(w.post));
        for (const auto& c : inv.control) {
          const auto i = *model.var_index(c);
          if (w.pre[i] != w.post[i]) out.push_back("control " + c + " changed after termination: " + model.describe(w.post));
        }
      }
      for (const auto& [v, writers] : inv.local_writers) {
        const auto i = *model.var_index(v);
        if (w.pre[i] != w.post[i] && !writers.count(model.text(w.post[node])))
          out.push_back("local " + v + " changed without assignment: " + model.describe(w.pre) + " => " + model.describe(w.post));
      }
    }
  }
  return out;
}

}  // namespace adsmv::fsm
