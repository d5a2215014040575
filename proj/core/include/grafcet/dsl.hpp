#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grafcet/diagnostic.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

struct ParseResult {
  std::optional<GrafcetModel> model;  // empty iff diagnostics contain an error
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

/// Parses `.gft` text. Element order follows the source; spans point into it.
ParseResult parse_model(std::string_view source, const std::string& file = "<input>");

/// Reads and parses a `.gft` file; I/O failures become a diagnostic.
ParseResult parse_model_file(const std::filesystem::path& path);

/// Canonical text: one declaration per line, steps before transitions in each
/// chart, expansion blocks after partial Grafcets. parse(print(m)) == m.
std::string print_model(const GrafcetModel& model);

bool is_keyword(std::string_view word);

}  // namespace grafcet
