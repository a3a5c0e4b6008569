// adsmv: validate, translate and execute activity diagrams.
//
// Exit status: 0 success, 1 check failed or diagnostics, 2 usage or I/O
// error, 3 resource bound exceeded.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "adsmv/adsmv.hpp"

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kResource = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_diagnostics(const std::string& path, const std::vector<adsmv::Diagnostic>& ds) {
  for (const auto& d : ds) std::cerr << path << ':' << d << '\n';
}

// Parses and validates; prints diagnostics and returns nullopt on failure.
std::optional<adsmv::ActivityDiagram> load(const std::string& path) {
  auto parsed = adsmv::parse_ad(read_file(path));
  if (!parsed) {
    print_diagnostics(path, parsed.errors);
    return std::nullopt;
  }
  if (auto ds = adsmv::validate(*parsed.diagram); !ds.empty()) {
    print_diagnostics(path, ds);
    return std::nullopt;
  }
  return std::move(parsed.diagram);
}

struct Options {
  std::string path;
  std::string out;
  std::string golden;
  std::string semantics = "fsm";
  std::string format = "text";
  std::size_t depth = 12;
  std::size_t max_states = 1'000'000;
  bool normalized = false;
  std::vector<int> omit_rules;
};

adsmv::TranslateOptions translate_options(const Options& o) {
  return {std::set<int>(o.omit_rules.begin(), o.omit_rules.end())};
}

int cmd_validate(const Options& o) {
  if (!load(o.path)) return kFailed;
  std::cout << o.path << ": ok\n";
  return kOk;
}

int cmd_emit(const Options& o) {
  auto ad = load(o.path);
  if (!ad) return kFailed;
  auto m = adsmv::translate(*ad, translate_options(o));
  if (o.normalized) m = adsmv::smv::normalize(std::move(m));
  const auto text = adsmv::smv::print_smv(m);
  if (o.out.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f || !(f << text)) throw IoError("cannot write '" + o.out + "'");
  return kOk;
}

void print_traces(const adsmv::TraceSet& ts, const std::string& format) {
  for (const auto& t : ts) {
    if (format == "structured") std::cout << adsmv::trace_json(t).dump() << '\n';
    else std::cout << adsmv::format_trace(t) << '\n';
  }
}

int cmd_traces(const Options& o) {
  auto ad = load(o.path);
  if (!ad) return kFailed;
  adsmv::TraceSet ts;
  if (o.semantics == "ad") {
    ts = adsmv::ad_action_traces(*ad, o.depth, o.max_states);
  } else {
    const adsmv::fsm::Model model(adsmv::translate(*ad, translate_options(o)), {o.max_states});
    ts = adsmv::fsm::action_traces(model, o.depth, adsmv::observation_for(*ad));
  }
  print_traces(ts, o.format);
  return kOk;
}

int cmd_check(const Options& o) {
  auto ad = load(o.path);
  if (!ad) return kFailed;
  bool ok = true;
  if (!o.golden.empty()) {
    auto golden = adsmv::smv::parse_smv_subset(read_file(o.golden));
    if (!golden) {
      print_diagnostics(o.golden, golden.errors);
      return kFailed;
    }
    using adsmv::smv::normalize;
    using adsmv::smv::print_smv;
    const bool same = print_smv(normalize(*golden.module)) == print_smv(normalize(adsmv::translate(*ad, translate_options(o))));
    std::cout << "golden: " << (same ? "match" : "MISMATCH") << '\n';
    ok = ok && same;
  }
  const auto report = adsmv::check_equivalence(*ad, o.depth, translate_options(o), {o.max_states});
  if (o.format == "structured") {
    std::cout << adsmv::report_json(report).dump(2) << '\n';
  } else {
    std::cout << "equivalence at depth " << o.depth << ": " << (report.equal() ? "equal" : "differ") << " ("
              << report.stats.fsm_traces << " traces, " << report.stats.fsm_terminated << " terminated)\n";
    if (!report.equal()) std::cout << "  first difference at depth " << report.witness_depth << '\n';
    for (const auto& t : report.only_in_fsm) std::cout << "  only in fsm: " << adsmv::format_trace(t) << '\n';
    for (const auto& t : report.only_in_ad) std::cout << "  only in ad:  " << adsmv::format_trace(t) << '\n';
  }
  return ok && report.equal() ? kOk : kFailed;
}

int cmd_deadlocks(const Options& o) {
  auto ad = load(o.path);
  if (!ad) return kFailed;
  const adsmv::fsm::Model model(adsmv::translate(*ad, translate_options(o)), {o.max_states});
  const auto found = adsmv::fsm::find_deadlocks(model, o.depth);
  if (found.empty()) {
    std::cout << "no deadlocks within " << o.depth << " steps\n";
    return kOk;
  }
  for (std::size_t i = 0; i < found.size(); ++i) {
    std::cout << "deadlock " << i + 1 << " after " << found[i].path.size() - 1 << " steps:\n";
    for (const auto& s : found[i].path) std::cout << "  " << model.describe(s) << '\n';
  }
  return kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translate activity diagrams to SMV modules and check the translation"};
  app.require_subcommand(1);
  Options o;

  auto add_path = [&](CLI::App* sub) { sub->add_option("path", o.path, "Activity diagram file")->required(); };
  auto add_depth = [&](CLI::App* sub) {
    sub->add_option("--depth", o.depth, "Maximum number of steps")->check(CLI::PositiveNumber);
    sub->add_option("--max-states", o.max_states, "State bound for enumeration")->check(CLI::PositiveNumber);
  };
  auto add_omit = [&](CLI::App* sub) {
    sub->add_option("--omit-rule", o.omit_rules, "Leave out a TRANS block (5-9) for mutation experiments")
        ->check(CLI::Range(5, 9))
        ->group("Testing");
  };

  auto* validate = app.add_subcommand("validate", "Parse and validate a diagram");
  add_path(validate);

  auto* emit = app.add_subcommand("emit", "Write the SMV module");
  add_path(emit);
  emit->add_option("-o,--out", o.out, "Output file (default stdout)");
  emit->add_flag("--normalized", o.normalized, "Drop comments and sort enum literals");
  add_omit(emit);

  auto* traces = app.add_subcommand("traces", "List bounded action traces");
  add_path(traces);
  add_depth(traces);
  traces->add_option("--semantics", o.semantics, "fsm or ad")->check(CLI::IsMember({"fsm", "ad"}));
  traces->add_option("--format", o.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  add_omit(traces);

  auto* check = app.add_subcommand("check", "Compare the module's traces with the diagram's");
  add_path(check);
  add_depth(check);
  check->add_option("--golden", o.golden, "Also compare against an SMV file");
  check->add_option("--format", o.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  add_omit(check);

  auto* deadlocks = app.add_subcommand("deadlocks", "Find reachable states without successors");
  add_path(deadlocks);
  add_depth(deadlocks);
  add_omit(deadlocks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*emit) return cmd_emit(o);
    if (*traces) return cmd_traces(o);
    if (*check) return cmd_check(o);
    if (*deadlocks) return cmd_deadlocks(o);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const adsmv::ResourceLimitExceeded& e) {
    std::cerr << "resource bound: " << e.what() << '\n';
    return kResource;
  } catch (const adsmv::DiagnosticError& e) {
    print_diagnostics(o.path, e.diagnostics());
    return kFailed;
  } catch (const adsmv::EvalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
