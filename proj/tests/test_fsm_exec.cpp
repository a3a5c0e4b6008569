#include <gtest/gtest.h>

#include "adsmv/conformance.hpp"
#include "adsmv/fsm_exec.hpp"
#include "adsmv/translate.hpp"
#include "oracles/smv_brute.hpp"
#include "support.hpp"

using namespace adsmv;
using testing_support::load_ad;
using testing_support::trace;

namespace {

fsm::Model model_of(const std::string& name, TranslateOptions opts = {}) { return fsm::Model(translate(load_ad(name), opts)); }

oracle::Valuation valuation(const fsm::Model& m, const fsm::State& s) {
  oracle::Valuation out;
  for (std::size_t i = 0; i < m.var_count(); ++i) out[m.var_name(i)] = m.text(s[i]);
  return out;
}

std::set<oracle::Valuation> valuations(const fsm::Model& m, const std::vector<fsm::State>& ss) {
  std::set<oracle::Valuation> out;
  for (const auto& s : ss) out.insert(valuation(m, s));
  return out;
}

smv::Module parse_module(const std::string& text) {
  auto r = smv::parse_smv_subset(text);
  if (!r) throw std::runtime_error(to_string(r.errors));
  return *r.module;
}

}  // namespace

TEST(FsmModel, InitialStateCounts) {
  EXPECT_EQ(model_of("controlledLoop").initial_states().size(), 2u);
  EXPECT_EQ(model_of("hireEmployeeSimplified").initial_states().size(), 1u);
  EXPECT_EQ(model_of("twoInputs").initial_states().size(), 4u);
  const fsm::Model contradictory(parse_module("VAR x : boolean;\nINIT x = 1 & x = 0;\n"));
  EXPECT_TRUE(contradictory.initial_states().empty());
}

TEST(FsmModel, FirstStepOfControlledLoop) {
  const auto m = model_of("controlledLoop");
  for (const auto& s : m.initial_states()) {
    EXPECT_EQ(m.value_of(s, "acnode"), "n0_initial");
    EXPECT_EQ(m.value_of(s, "ac"), "nop");
    EXPECT_EQ(m.value_of(s, "iterations"), "0");
    const auto next = m.successors(s);
    ASSERT_EQ(next.size(), 1u) << m.describe(s);
    EXPECT_EQ(m.value_of(next[0].post, "ac"), "receive_project");
    EXPECT_EQ(m.value_of(next[0].post, "project"), m.value_of(s, "project"));
    EXPECT_EQ(next[0].taken, (std::set<std::string>{"en0_initialn1_taken"}));
  }
}

TEST(FsmModel, ForkOffersBothBranches) {
  const auto m = model_of("hireEmployeeSimplified");
  const auto s0 = m.initial_states().at(0);
  const auto s1 = m.successor_states(s0);
  ASSERT_EQ(s1.size(), 1u);
  EXPECT_EQ(m.value_of(s1[0], "ac"), "register");
  std::set<std::string> actions;
  for (const auto& s : m.successor_states(s1[0])) actions.insert(m.value_of(s, "ac"));
  EXPECT_EQ(actions, (std::set<std::string>{"add_to_website", "assign_to_project"}));
}

TEST(FsmModel, FinalStateStepsToIdle) {
  const auto m = model_of("singleAction");
  auto s = m.initial_states().at(0);
  s = m.successor_states(s).at(0);
  s = m.successor_states(s).at(0);
  EXPECT_EQ(m.value_of(s, "acnode"), "n2_final");
  const auto idle = m.successor_states(s);
  ASSERT_EQ(idle.size(), 1u);
  EXPECT_EQ(m.value_of(idle[0], "acnode"), "nop");
  EXPECT_EQ(m.value_of(idle[0], "ac"), "nop");
  EXPECT_EQ(m.successor_states(idle[0]), idle);
}

// The compiled evaluator agrees with exhaustive enumeration of the domain
// product on every state reachable within a few steps.
class AgainstBruteForce : public ::testing::TestWithParam<std::string> {};

TEST_P(AgainstBruteForce, InitialAndSuccessorStates) {
  const auto m = model_of(GetParam());
  const oracle::Brute brute{m.module()};
  const auto brute_inits = brute.initial_states();
  ASSERT_EQ(valuations(m, m.initial_states()), std::set<oracle::Valuation>(brute_inits.begin(), brute_inits.end()));
  const fsm::Reachability r(m, 4);
  for (const auto& s : r.states()) {
    const auto expected = brute.successors(valuation(m, s));
    EXPECT_EQ(valuations(m, m.successor_states(s)), std::set<oracle::Valuation>(expected.begin(), expected.end())) << m.describe(s);
  }
}

TEST_P(AgainstBruteForce, ShortTraces) {
  const auto ad = load_ad(GetParam());
  const fsm::Model m(translate(ad));
  const oracle::Brute brute{m.module()};
  const auto obs = observation_for(ad);
  EXPECT_EQ(fsm::action_traces(m, 5, obs), brute.traces(5, obs.labels));
}

INSTANTIATE_TEST_SUITE_P(Corpus, AgainstBruteForce,
                         ::testing::Values("singleAction", "controlledLoop", "twoInputs", "overflowCounter", "twoFinals",
                                           "mergeChain", "sequence"));

TEST(FsmTraces, ControlledLoopAtDepthTwelve) {
  const auto ad = load_ad("controlledLoop");
  const fsm::Model m(translate(ad));
  const auto ts = fsm::action_traces(m, 12, observation_for(ad));
  TraceSet terminated;
  for (const auto& t : ts)
    if (t.terminated()) terminated.insert(t);
  const std::vector<std::string> loop{"define_work", "work"};
  auto run = [&](int loops) {
    std::vector<std::string> a{"receive_project"};
    for (int i = 0; i < loops; ++i) a.insert(a.end(), loop.begin(), loop.end());
    a.push_back("final_report");
    return a;
  };
  EXPECT_EQ(terminated, (TraceSet{trace({{"project", "long"}}, run(3)), trace({{"project", "short"}}, run(1)),
                                   trace({{"project", "short"}}, run(2)), trace({{"project", "short"}}, run(3))}));
  for (const auto& t : ts) EXPECT_NE(t.end, TraceEnd::deadlock) << format_trace(t);
}

TEST(FsmTraces, DepthOneCutsEveryRun) {
  const auto ad = load_ad("controlledLoop");
  const fsm::Model m(translate(ad));
  EXPECT_EQ(fsm::action_traces(m, 1, observation_for(ad)),
            (TraceSet{trace({{"project", "long"}}, {"receive_project"}, TraceEnd::cut),
                      trace({{"project", "short"}}, {"receive_project"}, TraceEnd::cut)}));
  EXPECT_THROW(fsm::action_traces(m, 0), std::invalid_argument);
}

TEST(FsmTraces, HireInterleavings) {
  const fsm::Model m(translate(load_ad("hireEmployeeSimplified")));
  EXPECT_EQ(fsm::action_traces(m, 12),
            (TraceSet{trace({}, {"register", "add_to_website", "assign_to_project", "authorize_payment"}),
                      trace({}, {"register", "assign_to_project", "add_to_website", "authorize_payment"})}));
}

TEST(FsmTraces, NestedForkInterleavings) {
  const fsm::Model m(translate(load_ad("nestedFork")));
  const auto ts = fsm::action_traces(m, 15);
  EXPECT_EQ(std::count_if(ts.begin(), ts.end(), [](const ActionTrace& t) { return t.terminated(); }), 12);
}

TEST(FsmTraces, MissingActionVariable) {
  const fsm::Model m(parse_module("VAR x : boolean;\n"));
  EXPECT_THROW(fsm::action_traces(m, 2), EvalError);
}

TEST(Deadlocks, NoneInWellFormedLoop) { EXPECT_TRUE(fsm::find_deadlocks(model_of("controlledLoop"), 15).empty()); }

TEST(Deadlocks, IncompleteGuardLeavesOneStuckState) {
  const auto m = model_of("controlledLoopGuardIncomplete");
  const auto found = fsm::find_deadlocks(m, 15);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].path.size(), 8u);
  EXPECT_EQ(found[0].path.back(), found[0].state);
  EXPECT_EQ(m.value_of(found[0].state, "project"), "long");
  EXPECT_EQ(m.value_of(found[0].state, "iterations"), "3");
  EXPECT_EQ(m.value_of(found[0].state, "acnode"), "n3");
}

TEST(Deadlocks, DomainOverflowBlocksTheStep) {
  const auto m = model_of("overflowCounter");
  const auto found = fsm::find_deadlocks(m, 10);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(m.value_of(found[0].state, "count"), "2");
  EXPECT_EQ(fsm::action_traces(m, 10), (TraceSet{trace({}, {"tick", "tick"}, TraceEnd::deadlock)}));
}

TEST(UniqueTaken, HoldsOnCorpus) {
  for (const auto& name : testing_support::corpus()) {
    const auto r = fsm::check_unique_taken(model_of(name), 12);
    EXPECT_TRUE(r.pass) << name;
    EXPECT_GT(r.steps_checked, 0u) << name;
  }
}

TEST(UniqueTaken, ReportsOverlappingDefines) {
  const fsm::Model m(parse_module(
      "VAR x : boolean;\nacnode : {a, nop};\nac : {go, nop};\n"
      "INIT x = 0 & acnode = a & ac = nop;\n"
      "DEFINE\n  p_taken := !x & next(x);\n  q_taken := next(x);\n"
      "TRANS next(x) & next(acnode = a) & next(ac = go);\n"));
  const auto r = fsm::check_unique_taken(m, 3);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.counterexample);
  EXPECT_EQ(r.counterexample->taken, (std::set<std::string>{"p_taken", "q_taken"}));
}

TEST(StepInvariants, HoldOnCorpus) {
  for (const auto& name : testing_support::corpus()) {
    const auto ad = load_ad(name);
    const fsm::Model m(translate(ad));
    EXPECT_EQ(fsm::check_step_invariants(m, 12, step_invariants_for(ad)), std::vector<std::string>{}) << name;
  }
}

TEST(StepInvariants, DetectDroppedFrames) {
  const auto ad = load_ad("controlledLoop");
  const auto inv = step_invariants_for(ad);
  auto mentions = [](const std::vector<std::string>& vs, const std::string& word) {
    return std::any_of(vs.begin(), vs.end(), [&](const std::string& v) { return v.rfind(word, 0) == 0; });
  };
  EXPECT_TRUE(mentions(fsm::check_step_invariants(fsm::Model(translate(ad, {{7}})), 4, inv), "input project"));
  EXPECT_TRUE(mentions(fsm::check_step_invariants(fsm::Model(translate(ad, {{8}})), 4, inv), "local iterations"));
  EXPECT_FALSE(fsm::check_step_invariants(fsm::Model(translate(ad, {{6}})), 12, inv).empty());
}

TEST(Limits, StateBoundThrows) {
  const auto ad = load_ad("nestedFork");
  const fsm::Model m(translate(ad), {5});
  EXPECT_THROW(fsm::action_traces(m, 15), ResourceLimitExceeded);
  EXPECT_THROW(fsm::find_deadlocks(m, 15), ResourceLimitExceeded);
}
