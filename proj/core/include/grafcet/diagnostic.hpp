#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace grafcet {

struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int end_line = 1;
  int end_column = 1;

  bool operator==(const SourceSpan&) const = default;
};

/// Where a model element came from. Never participates in structural
/// equality: two models parsed from differently formatted text compare equal.
struct Origin {
  SourceSpan span;

  friend bool operator==(const Origin&, const Origin&) { return true; }
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string message;
  SourceSpan span;

  bool operator==(const Diagnostic&) const = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// `file:line:col: error: message`
std::string format_diagnostic(const Diagnostic& diagnostic);
std::ostream& operator<<(std::ostream& os, const Diagnostic& diagnostic);

}  // namespace grafcet
