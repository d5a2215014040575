#include "grafcet/trace.hpp"

#include <sstream>

#include <json.hpp>

namespace grafcet {

namespace {

using Json = nlohmann::ordered_json;

Json value_json(const Binding& b) {
  if (b.type == ValueType::boolean) return Json(b.value != 0);
  return Json(b.value);
}

Json bindings_json(const std::vector<Binding>& bindings) {
  Json out = Json::object();
  for (const auto& b : bindings) out[b.name] = value_json(b);
  return out;
}

}  // namespace

std::string record_to_json(const EvolutionRecord& r) {
  Json j;
  j["evolution"] = r.index;
  j["cleared"] = r.cleared;
  j["activated"] = r.activated;
  j["deactivated"] = r.deactivated;
  j["rule5"] = r.rule_five;
  j["writes"] = bindings_json(r.writes);
  Json forcings = Json::array();
  for (const auto& f : r.forcings) {
    Json fj;
    fj["owner"] = f.owner;
    fj["target"] = f.target;
    fj["situation"] = f.situation;
    forcings.push_back(std::move(fj));
  }
  j["forcings"] = std::move(forcings);
  j["suppressed"] = r.suppressed;
  j["stable"] = r.stable;
  return j.dump();
}

std::string outcome_to_json(const RunResult& result) {
  Json j;
  if (const auto* report = std::get_if<StableReport>(&result)) {
    Json situation = Json::object();
    for (const auto& ps : report->situation) situation[ps.partial] = ps.steps;
    j["report"]["situation"] = std::move(situation);
    j["report"]["outputs"] = bindings_json(report->outputs);
  } else {
    const auto& error = std::get<RunError>(result);
    j["error"]["kind"] = to_string(error.kind);
    j["error"]["detail"] = error.detail;
  }
  return j.dump();
}

void write_run(std::ostream& os, const RunResult& result) {
  for (const auto& r : evolutions_of(result)) os << record_to_json(r) << '\n';
  os << outcome_to_json(result) << '\n';
}

std::string to_jsonl(const std::vector<RunResult>& runs) {
  std::ostringstream os;
  for (const auto& run : runs) write_run(os, run);
  return os.str();
}

}  // namespace grafcet
