#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "grafcet/analyzer.hpp"
#include "grafcet/compiled_model.hpp"
#include "grafcet/explorer.hpp"
#include "grafcet/model.hpp"

namespace grafcet::testing {

/// `fixtures/<name>.gft`
std::filesystem::path fixture_path(const std::string& name);

/// Analyzed model of `fixtures/<name>.gft`; throws std::runtime_error with
/// the diagnostics if analysis fails.
GrafcetModel load_fixture(const std::string& name);
std::shared_ptr<const CompiledModel> compile_fixture(const std::string& name);

/// Parse and analyze inline source, throwing on errors.
GrafcetModel analyzed(const std::string& source);

/// Fixtures that analyze cleanly and are small enough for the oracle.
const std::vector<std::string>& runnable_fixtures();

/// Every sequence of 0..max_length single-input toggles over the model's
/// boolean inputs (at most `max_inputs` of them), starting from their
/// initial values.
std::vector<std::vector<InputChanges>> toggle_sequences(const GrafcetModel& model, int max_length,
                                                        int max_inputs = 3);

}  // namespace grafcet::testing
