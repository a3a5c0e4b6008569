#pragma once

#include <cstddef>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adsmv {

/// Byte range plus 1-based line/column of `begin` in the source text.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t line = 0;
  std::size_t column = 0;

  [[nodiscard]] bool known() const { return line != 0; }
  bool operator==(const SourceSpan&) const = default;
};

struct Diagnostic {
  std::string rule;     // stable id, e.g. "final-outgoing"
  std::string subject;  // node id, "src->tgt" edge, or variable name
  std::string message;
  SourceSpan span{};
};

inline std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  if (d.span.known()) os << d.span.line << ':' << d.span.column << ": ";
  os << '[' << d.rule << ']';
  if (!d.subject.empty()) os << ' ' << d.subject;
  return os << ": " << d.message;
}

inline std::string to_string(const std::vector<Diagnostic>& ds) {
  std::ostringstream os;
  for (const auto& d : ds) os << d << '\n';
  return os.str();
}

/// Thrown when an operation is handed input that fails its preconditions.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(std::vector<Diagnostic> ds)
      : std::runtime_error(to_string(ds)), diagnostics_(std::move(ds)) {}
  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Type errors and similar faults during expression evaluation.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration hit its configured state or candidate bound.
class ResourceLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adsmv
