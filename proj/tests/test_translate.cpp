#include <gtest/gtest.h>

#include <sstream>

#include "adsmv/ad_text.hpp"
#include "adsmv/translate.hpp"
#include "support.hpp"

using namespace adsmv;
using testing_support::load_ad;
using testing_support::load_golden;
using testing_support::normalized_text;

namespace {

std::vector<std::string> var_names(const smv::Module& m) {
  std::vector<std::string> out;
  for (const auto& v : m.vars) out.push_back(v.name);
  return out;
}

std::vector<std::string> literal_texts(const smv::VarDecl& v) {
  std::vector<std::string> out;
  for (const auto& l : v.literals) out.push_back(l.text());
  return out;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::size_t count_top(const smv::Expr& e, smv::Expr::Op op) {
  return e.op == op ? count_top(e.args[0], op) + count_top(e.args[1], op) : 1;
}

// The TRANS clause of the frame block whose left side mentions `var`.
std::string frame_clause(const smv::Module& m, const std::string& var) {
  std::vector<const smv::Expr*> clauses;
  for (const auto* c : smv::detail::flatten_left(m.trans.at(0), smv::Expr::Op::and_)) clauses.push_back(c);
  for (const auto* c : clauses) {
    const auto text = smv::detail::inline_expr(*c);
    if (text.rfind("(" + var + " = next(" + var + "))", 0) == 0) return text;
  }
  return {};
}

}  // namespace

TEST(CanonicalNames, ControlledLoop) {
  const auto ad = load_ad("controlledLoop");
  const auto names = canonical_names(ad);
  std::vector<std::string> ids;
  for (const auto& [i, id] : names.node_id) ids.push_back(ad.nodes[i].id + "=" + id);
  EXPECT_EQ(ids, (std::vector<std::string>{"start=n0_initial", "receive=n1", "define=n2", "work=n3", "report=n4", "done=n5_final"}));
  std::set<std::string> edges;
  for (const auto& [e, n] : names.edge_name) edges.insert(n);
  EXPECT_EQ(edges, (std::set<std::string>{"en0_initialn1", "en1n2", "en2n3", "en3n2", "en3n4", "en4n5_final"}));
  EXPECT_TRUE(names.fork_var.empty());
  EXPECT_TRUE(names.join_var.empty());
}

TEST(CanonicalNames, ForkAndJoinVariables) {
  const auto ad = load_ad("hireEmployeeSimplified");
  const auto names = canonical_names(ad);
  std::set<std::string> forks, joins, edges;
  for (const auto& [e, v] : names.fork_var) forks.insert(v);
  for (const auto& [e, v] : names.join_var) joins.insert(v);
  for (const auto& [e, n] : names.edge_name) edges.insert(n);
  EXPECT_EQ(forks, (std::set<std::string>{"in_Fn3", "in_Fn4"}));
  EXPECT_EQ(joins, (std::set<std::string>{"in_Jn3", "in_Jn4"}));
  EXPECT_EQ(edges, (std::set<std::string>{"en0_initialn2", "eFn3n3", "eFn4n4", "eJn3Jn4n5", "en5n1_final"}));
}

TEST(SanitizeActionName, ReplacesNonWordCharacters) {
  EXPECT_EQ(sanitize_action_name("assign to project"), "assign_to_project");
  EXPECT_EQ(sanitize_action_name("a-b/c.d"), "a_b_c_d");
  EXPECT_EQ(sanitize_action_name("plain_1"), "plain_1");
}

TEST(Translate, ControlledLoopDeclarations) {
  const auto m = translate(load_ad("controlledLoop"));
  EXPECT_EQ(var_names(m), (std::vector<std::string>{"in_n0_initial", "in_n1", "in_n2", "in_n3", "in_n4", "in_n5_final", "acnode",
                                                    "ac", "project", "iterations"}));
  EXPECT_EQ(literal_texts(*m.find_var("acnode")),
            (std::vector<std::string>{"n0_initial", "n1", "n2", "n3", "n4", "n5_final", "nop"}));
  EXPECT_EQ(literal_texts(*m.find_var("ac")),
            (std::vector<std::string>{"define_work", "final_report", "receive_project", "work", "nop"}));
  EXPECT_EQ(literal_texts(*m.find_var("iterations")), (std::vector<std::string>{"0", "1", "2", "3", "4"}));
  ASSERT_EQ(m.inits.size(), 1u);
  const auto init = smv::detail::inline_expr(m.inits[0]);
  EXPECT_NE(init.find("(iterations = 0)"), std::string::npos);
  EXPECT_NE(init.find("(acnode = n0_initial)"), std::string::npos);
  EXPECT_EQ(init.find("project"), std::string::npos);
  EXPECT_EQ(m.defines.size(), 6u);
  EXPECT_EQ(m.trans.size(), 5u);
}

TEST(Translate, HireDeclarations) {
  const auto m = translate(load_ad("hireEmployeeSimplified"));
  std::size_t booleans = 0;
  for (const auto& v : m.vars) booleans += v.boolean;
  EXPECT_EQ(booleans, 10u);
  EXPECT_EQ(m.defines.size(), 5u);
  // No inputs and no locals: only the frame, step and naming blocks.
  EXPECT_EQ(m.trans.size(), 3u);
}

TEST(Translate, TakenDefineShape) {
  const auto m = translate(load_ad("controlledLoop"));
  const auto* work = m.find_define("en2n3_taken");
  ASSERT_NE(work, nullptr);
  EXPECT_EQ(smv::detail::inline_expr(work->expr),
            "en2n3_enabled & !next(in_n2) & next(in_n3) & (next(iterations) = iterations + 1) & next(acnode = n3)");
  const auto* exit = m.find_define("en3n4_enabled");
  ASSERT_NE(exit, nullptr);
  EXPECT_EQ(smv::detail::inline_expr(exit->expr), "in_n3 & ((project = short) | (iterations = 3))");
}

TEST(Translate, JoinClearsSlotsAndPredecessors) {
  const auto m = translate(load_ad("hireEmployeeSimplified"));
  const auto* join = m.find_define("eJn3Jn4n5_taken");
  ASSERT_NE(join, nullptr);
  EXPECT_EQ(smv::detail::inline_expr(join->expr),
            "eJn3Jn4n5_enabled & !next(in_Jn3) & !next(in_n3) & !next(in_Jn4) & !next(in_n4) & next(in_n5) & next(acnode = n5)");
  EXPECT_EQ(smv::detail::inline_expr(m.find_define("eJn3Jn4n5_enabled")->expr), "in_Jn3 & in_Jn4");
}

TEST(Translate, FrameClauses) {
  const auto loop = translate(load_ad("controlledLoop"));
  EXPECT_EQ(frame_clause(loop, "in_n2"), "(in_n2 = next(in_n2)) | en3n2_taken | en1n2_taken | en2n3_taken");
  const auto hire = translate(load_ad("hireEmployeeSimplified"));
  EXPECT_EQ(frame_clause(hire, "in_n2"), "(in_n2 = next(in_n2)) | en0_initialn2_taken | eFn3n3_taken | eFn4n4_taken");
  EXPECT_EQ(frame_clause(hire, "in_Jn3"), "(in_Jn3 = next(in_Jn3)) | eFn3n3_taken | eJn3Jn4n5_taken");
  EXPECT_EQ(count_top(hire.trans[0], smv::Expr::Op::and_), 10u);
}

TEST(Translate, StepObligationWithTwoFinals) {
  const auto m = translate(load_ad("twoFinals"));
  const auto text = smv::detail::inline_expr(m.trans.at(1));
  EXPECT_EQ(text.rfind("(next(acnode = nop) <-> in_n4_final | in_n5_final) & (in_n4_final | in_n5_final | (", 0), 0u) << text;
}

TEST(Translate, InputAndLocalFramesPresentOnlyWhenNeeded) {
  const auto loop = translate(load_ad("controlledLoop"));
  EXPECT_EQ(smv::detail::inline_expr(loop.trans.at(2)), "project = next(project)");
  EXPECT_EQ(smv::detail::inline_expr(loop.trans.at(3)),
            "(iterations = next(iterations)) | (next(acnode) = n1) | (next(acnode) = n3)");

  const auto inputs_only = translate(load_ad("twoInputs"));
  EXPECT_EQ(inputs_only.trans.size(), 4u);
  EXPECT_EQ(smv::detail::inline_expr(inputs_only.trans.at(2)), "(mode = next(mode)) & (urgent = next(urgent))");

  const auto locals_only = translate(load_ad("overflowCounter"));
  EXPECT_EQ(locals_only.trans.size(), 4u);
  EXPECT_EQ(smv::detail::inline_expr(locals_only.trans.at(2)).rfind("(count = next(count))", 0), 0u);
}

TEST(Translate, ActionNamingImplications) {
  const auto loop = translate(load_ad("controlledLoop"));
  EXPECT_EQ(count_top(loop.trans.back(), smv::Expr::Op::and_), 7u);
  const auto single = translate(load_ad("singleAction"));
  EXPECT_EQ(count_top(single.trans.back(), smv::Expr::Op::and_), 4u);
  EXPECT_EQ(smv::detail::inline_expr(single.trans.back()),
            "((next(acnode) = n0_initial) -> (next(ac) = nop)) & ((next(acnode) = n1) -> (next(ac) = a)) & "
            "((next(acnode) = n2_final) -> (next(ac) = nop)) & ((next(acnode) = nop) -> (next(ac) = nop))");
}

TEST(Translate, MatchesGoldenModules) {
  for (const auto* name : {"controlledLoop", "hireEmployeeSimplified"}) {
    const auto emitted = translate(load_ad(name));
    EXPECT_EQ(normalized_text(emitted), normalized_text(load_golden(name))) << name;
    const auto lines = line_count(smv::print_smv(emitted));
    EXPECT_GE(lines, 130u) << name;
    EXPECT_LE(lines, 190u) << name;
  }
}

TEST(Translate, GoldenDiffersWhenTampered) {
  auto golden = load_golden("controlledLoop");
  golden.trans.pop_back();
  EXPECT_NE(normalized_text(translate(load_ad("controlledLoop"))), normalized_text(golden));
}

TEST(Translate, OmitRules) {
  const auto ad = load_ad("controlledLoop");
  const auto full = translate(ad);
  for (int rule = 5; rule <= 9; ++rule) {
    const auto m = translate(ad, {{rule}});
    EXPECT_EQ(m.trans.size(), full.trans.size() - 1) << rule;
    EXPECT_EQ(m.vars, full.vars) << rule;
    EXPECT_EQ(m.defines, full.defines) << rule;
  }
  EXPECT_EQ(translate(ad, {{5, 6, 7, 8, 9}}).trans.size(), 0u);
}

TEST(Translate, Deterministic) {
  for (const auto& name : testing_support::corpus()) {
    const auto ad = load_ad(name);
    EXPECT_EQ(smv::print_smv(translate(ad)), smv::print_smv(translate(ad))) << name;
    EXPECT_TRUE(smv::check_well_formed(translate(ad)).empty()) << name;
  }
}

TEST(Translate, RejectsInvalidDiagram) {
  auto ad = load_ad("singleAction");
  ad.transitions.pop_back();
  EXPECT_THROW(translate(ad), DiagnosticError);
}

TEST(Translate, ActionNameCollision) {
  auto r = parse_ad(
      "activity c { initial i; action a \"x-y\"; action b \"x y\"; final f; edge i -> a; edge a -> b; edge b -> f; }");
  ASSERT_TRUE(r);
  try {
    translate(*r.diagram);
    FAIL() << "expected a collision";
  } catch (const DiagnosticError& e) {
    ASSERT_FALSE(e.diagnostics().empty());
    EXPECT_EQ(e.diagnostics()[0].rule, "name-collision");
  }
}

TEST(Translate, ReservedActionName) {
  auto r = parse_ad("activity c { initial i; action a \"nop\"; final f; edge i -> a; edge a -> f; }");
  ASSERT_TRUE(r);
  EXPECT_THROW(translate(*r.diagram), DiagnosticError);
}

TEST(Translate, VariableShadowingGeneratedName) {
  auto r = parse_ad("activity c { input acnode : {x, y}; initial i; action a \"a\"; final f; edge i -> a; edge a -> f; }");
  ASSERT_TRUE(r);
  EXPECT_THROW(translate(*r.diagram), DiagnosticError);
}
