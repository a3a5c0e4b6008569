// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "adsmv/adsmv.hpp"
#include "support.hpp"

using namespace adsmv;
using testing_support::load_ad;
using testing_support::load_golden;
using testing_support::normalized_text;

namespace {

const std::string kLoop = "controlledLoop";
const std::string kHire = "hireEmployeeSimplified";

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

struct Emitted {
  int code = -1;
  std::string text;
};

Emitted cli_emit(const std::string& name) {
  const std::string cmd = std::string(ADSMV_CLI) + " emit " + testing_support::fixture_path(name + ".ad");
  Emitted e;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return e;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) e.text += buf.data();
  const int status = pclose(p);
  e.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return e;
}

Outcome golden(const std::string& name) {
  const auto t0 = Clock::now();
  const auto emitted = cli_emit(name);
  if (emitted.code != 0) return {false, "emit exited with " + std::to_string(emitted.code)};
  auto parsed = smv::parse_smv_subset(emitted.text);
  if (!parsed) return {false, "emitted text does not parse: " + to_string(parsed.errors)};
  const bool same = normalized_text(*parsed.module) == normalized_text(load_golden(name));
  const double s = seconds_since(t0);
  return {same && s < 1.0, std::string(same ? "normalized text identical" : "normalized text differs") + " in " + fmt_seconds(s)};
}

Outcome size_claim() {
  std::string detail;
  bool ok = true;
  for (const auto& name : {kLoop, kHire}) {
    const auto text = cli_emit(name).text;
    const auto lines = static_cast<long>(std::count(text.begin(), text.end(), '\n'));
    ok = ok && lines >= 130 && lines <= 190;
    detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(lines) + " lines";
  }
  return {ok, detail};
}

std::size_t count_terminated(const TraceSet& ts, const std::string& project = {}) {
  return static_cast<std::size_t>(std::count_if(ts.begin(), ts.end(), [&](const ActionTrace& t) {
    if (!t.terminated()) return false;
    if (project.empty()) return true;
    return !t.labels.empty() && t.labels[0].second == project;
  }));
}

// The expected counts come from the token game, which shares no code with
// the translator or the module evaluator.
Outcome trace_equivalence(const TranslateOptions& opts = {}) {
  std::string detail;
  bool ok = true;
  for (const auto& name : {kLoop, kHire}) {
    const auto ad = load_ad(name);
    const auto t0 = Clock::now();
    const auto report = check_equivalence(ad, 12, opts);
    const double s = seconds_since(t0);
    const auto oracle = ad_action_traces(ad, 12);
    const auto fsm_side = report.equal() ? report.common : TraceSet{};
    bool counts = false;
    if (name == kLoop)
      counts = count_terminated(oracle, "long") == 1 && count_terminated(oracle, "short") == 3 && count_terminated(fsm_side) == 4;
    else
      counts = count_terminated(oracle) == 2 && count_terminated(fsm_side) == 2;
    ok = ok && report.equal() && counts && s < 10.0;
    detail += (detail.empty() ? "" : "; ") + name + ": " + (report.equal() ? "equal" : "differ at depth " + std::to_string(report.witness_depth)) +
              ", " + std::to_string(count_terminated(fsm_side)) + " terminated, " + fmt_seconds(s);
  }
  return {ok, detail};
}

Outcome unique_taken(const TranslateOptions& opts = {}) {
  std::string detail;
  bool ok = true;
  for (const auto& name : {kLoop, kHire}) {
    const fsm::Model m(translate(load_ad(name), opts));
    const auto r = fsm::check_unique_taken(m, 15);
    ok = ok && r.pass;
    detail += (detail.empty() ? "" : "; ") + name + ": " + std::to_string(r.steps_checked) + " steps " + (r.pass ? "ok" : "violated");
  }
  return {ok, detail};
}

Outcome step_invariants() {
  std::string detail;
  bool ok = true;
  for (const auto& name : {kLoop, kHire}) {
    const auto ad = load_ad(name);
    const fsm::Model m(translate(ad));
    const auto violations = fsm::check_step_invariants(m, 15, step_invariants_for(ad));
    ok = ok && violations.empty();
    detail += (detail.empty() ? "" : "; ") + name + ": " + std::to_string(violations.size()) + " violations";
    if (!violations.empty()) detail += " (" + violations.front() + ")";
  }
  return {ok, detail};
}

Outcome round_trips() {
  std::size_t ad_ok = 0;
  for (const auto& name : testing_support::corpus()) {
    const auto ad = load_ad(name);
    auto again = parse_ad(print_ad(ad));
    ad_ok += again && *again.diagram == ad;
  }
  std::size_t smv_ok = 0;
  for (const auto& name : {kLoop, kHire}) {
    const auto m = translate(load_ad(name));
    auto again = smv::parse_smv_subset(smv::print_smv(m));
    smv_ok += again && smv::normalize(*again.module) == smv::normalize(m);
  }
  const auto total = testing_support::corpus().size();
  return {ad_ok == total && total >= 10 && smv_ok == 2,
          std::to_string(ad_ok) + "/" + std::to_string(total) + " diagrams, " + std::to_string(smv_ok) + "/2 modules"};
}

Outcome mutation_sensitivity() {
  std::string detail;
  bool ok = true;
  for (int rule = 5; rule <= 9; ++rule) {
    const TranslateOptions opts{{rule}};
    const bool c4 = trace_equivalence(opts).pass;
    const bool c5 = unique_taken(opts).pass;
    const bool caught = !c4 || !c5;
    ok = ok && caught;
    detail += (detail.empty() ? "" : ", ") + std::string("without ") + std::to_string(rule) + ": " +
              (caught ? std::string(!c4 ? "traces" : "") + (!c4 && !c5 ? "+" : "") + (!c5 ? "unique" : "") : "undetected");
  }
  return {ok, detail};
}

Outcome deadlocks() {
  const auto variant = load_ad("controlledLoopGuardIncomplete");
  const fsm::Model m(translate(variant));
  const auto found = fsm::find_deadlocks(m, 15);
  const auto oracle = ad_action_traces(variant, 15);
  const auto oracle_dead = std::count_if(oracle.begin(), oracle.end(), [](const ActionTrace& t) { return t.end == TraceEnd::deadlock; });
  bool ok = found.size() == 1 && oracle_dead == 1 && m.value_of(found[0].state, "project") == "long";
  std::string detail = "variant: " + std::to_string(found.size()) + " (token game " + std::to_string(oracle_dead) + ")";
  for (const auto& name : {kLoop, kHire}) {
    const auto n = fsm::find_deadlocks(fsm::Model(translate(load_ad(name))), 15).size();
    ok = ok && n == 0;
    detail += ", " + name + ": " + std::to_string(n);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"golden translation, controlledLoop", [] { return golden(kLoop); }},
      {"golden translation, hireEmployeeSimplified", [] { return golden(kHire); }},
      {"module size", size_claim},
      {"trace equivalence at depth 12", [] { return trace_equivalence(); }},
      {"unique taken edge at depth 15", [] { return unique_taken(); }},
      {"input constancy and idle absorption at depth 15", step_invariants},
      {"round trips", round_trips},
      {"mutation sensitivity", mutation_sensitivity},
      {"deadlock detection", deadlocks},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << o.detail << '\n';
  }
  return failures == 0 ? 0 : 1;
}
