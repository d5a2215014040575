#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grafcet/engine.hpp"
#include "grafcet/explorer.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

/// Stable outcome after initialization or after one input event.
struct Observation {
  std::optional<RunErrorKind> error;
  std::vector<PartialSituation> situation;  // empty on error
  std::vector<Binding> outputs;             // empty on error

  bool operator==(const Observation&) const = default;
};

std::string describe(const Observation& observation);

class OracleScaleExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleLimits {
  int max_steps = 32;
  int max_inputs = 8;
  int max_transitions_per_partial = 16;
};

/// Reference interpretation working directly on the (analyzed) model with
/// string-keyed state, recursive expression evaluation and brute-force
/// transition subsets. Returns the initial observation followed by one per
/// event; stops after the first error.
std::vector<Observation> oracle_run(const GrafcetModel& model,
                                    const std::vector<InputChanges>& sequence, Policy policy = {},
                                    OracleLimits limits = {});

/// Same contract driven by the Interpreter.
std::vector<Observation> engine_run(std::shared_ptr<const CompiledModel> model,
                                    const std::vector<InputChanges>& sequence, Policy policy = {});

}  // namespace grafcet
