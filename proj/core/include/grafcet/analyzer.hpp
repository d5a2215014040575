#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "grafcet/diagnostic.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

enum class AnalysisErrorKind {
  missing_expansion,
  recursive_macro,
  entry_exit_violation,
  source_sink_in_expansion,
  hierarchy_cycle,
  self_force,
};

const char* to_string(AnalysisErrorKind kind);

class AnalysisError : public std::runtime_error {
 public:
  AnalysisError(AnalysisErrorKind kind, const std::string& message, SourceSpan span = {})
      : std::runtime_error(message), kind_(kind), span_(std::move(span)) {}

  AnalysisErrorKind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }

 private:
  AnalysisErrorKind kind_;
  SourceSpan span_;
};

/// Substitutes every macro step by its expansion chart, innermost first.
/// Expanded elements are renamed `<macro>.<local id>`; transitions into the
/// macro step enter its entry step, transitions out of it leave from all of
/// its exit steps. Warnings (e.g. steps active in parallel to an exit step)
/// are appended to `warnings` when given.
GrafcetModel expand_macros(const GrafcetModel& model, std::vector<Diagnostic>* warnings = nullptr);

enum class HierarchyReason { forcing, enclosing };

struct HierarchyEdge {
  std::string superior;
  std::string inferior;
  HierarchyReason reason = HierarchyReason::forcing;

  auto operator<=>(const HierarchyEdge&) const = default;
};

struct HierarchyGraph {
  std::vector<std::string> nodes;  // declaration order
  std::set<HierarchyEdge> edges;
  std::map<std::string, int> depth;
};

/// Forcing/enclosing dependency graph of a macro-expanded model and the
/// longest-path depth of every partial Grafcet. Throws AnalysisError on a
/// cycle (the message names every partial Grafcet on it) or a self-forcing.
HierarchyGraph compute_hierarchy(const GrafcetModel& model);

/// Well-formedness rules for an expanded model; never throws.
std::vector<Diagnostic> validate(const GrafcetModel& model);

struct AnalysisResult {
  std::optional<GrafcetModel> model;  // expanded, depth_of filled; empty on error
  HierarchyGraph hierarchy;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

/// Expansion, hierarchy and validation in one pass; errors become diagnostics.
AnalysisResult analyze(const GrafcetModel& parsed);

/// parse_model_file followed by analyze.
AnalysisResult load_model(const std::filesystem::path& path);

}  // namespace grafcet
