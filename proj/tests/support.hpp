#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "adsmv/adsmv.hpp"

namespace testing_support {

inline std::string fixture_path(const std::string& name) { return std::string(ADSMV_FIXTURE_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline adsmv::ActivityDiagram load_ad(const std::string& name) {
  auto r = adsmv::parse_ad(read_text(fixture_path(name + ".ad")));
  if (!r) throw std::runtime_error(name + ": " + adsmv::to_string(r.errors));
  return *r.diagram;
}

inline adsmv::smv::Module load_golden(const std::string& name) {
  auto r = adsmv::smv::parse_smv_subset(read_text(fixture_path("golden/" + name + ".golden.smv")));
  if (!r) throw std::runtime_error(name + ": " + adsmv::to_string(r.errors));
  return *r.module;
}

inline std::string normalized_text(const adsmv::smv::Module& m) { return adsmv::smv::print_smv(adsmv::smv::normalize(m)); }

// Diagrams in the corpus that validate.
inline const std::vector<std::string>& corpus() {
  static const std::vector<std::string> names{
      "controlledLoop", "hireEmployeeSimplified", "controlledLoopGuardIncomplete", "singleAction",
      "twoInputs",      "overflowCounter",        "nestedFork",                    "mergeChain",
      "retryLoop",      "forkWithLocals",         "sequence",                      "twoFinals"};
  return names;
}

inline adsmv::ActionTrace trace(std::vector<std::pair<std::string, std::string>> labels, std::vector<std::string> actions,
                                adsmv::TraceEnd end = adsmv::TraceEnd::terminated) {
  return {std::move(labels), std::move(actions), end};
}

}  // namespace testing_support
