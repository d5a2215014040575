#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "grafcet/engine.hpp"

namespace grafcet {

/// One JSON object for an evolution record, keys in fixed order:
/// evolution, cleared, activated, deactivated, rule5, writes, forcings,
/// suppressed, stable.
std::string record_to_json(const EvolutionRecord& record);

/// `{"report":{...}}` or `{"error":{...}}`.
std::string outcome_to_json(const RunResult& result);

/// All records of a run followed by its outcome line.
void write_run(std::ostream& os, const RunResult& result);

/// Concatenation of write_run over `runs`.
std::string to_jsonl(const std::vector<RunResult>& runs);

}  // namespace grafcet
