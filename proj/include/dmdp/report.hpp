// Copyright 2026 The dmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON encodings of results, used by run reports and search traces.

#ifndef DMDP_REPORT_HPP_
#define DMDP_REPORT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmdp/bellman.hpp"
#include "dmdp/composition.hpp"
#include "dmdp/core.hpp"
#include "dmdp/gds.hpp"
#include "dmdp/io.hpp"
#include "dmdp/oracle.hpp"
#include "json.hpp"

namespace dmdp {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kReportVersion = 1;
inline constexpr int kTraceVersion = 1;

inline nlohmann::json to_json(const TimeVaryingPolicy& policy) {
  nlohmann::json rules = nlohmann::json::array();
  for (const DecisionRule& rule : policy.rules()) {
    nlohmann::json actions = nlohmann::json::array();
    for (ActionId a : rule.actions()) actions.push_back(a.index);
    rules.push_back(std::move(actions));
  }
  return rules;
}

/// Inverse of to_json(TimeVaryingPolicy). Shape errors throw DimensionError.
inline TimeVaryingPolicy policy_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw DimensionError("policy must be an array of rules");
  std::vector<DecisionRule> rules;
  for (const auto& rule : doc) {
    if (!rule.is_array()) throw DimensionError("rule must be an array of actions");
    std::vector<ActionId> actions;
    for (const auto& a : rule) {
      if (!a.is_number_unsigned()) {
        throw DimensionError("action must be a nonnegative integer");
      }
      actions.emplace_back(a.get<std::size_t>());
    }
    rules.emplace_back(std::move(actions));
  }
  return TimeVaryingPolicy(std::move(rules));
}

inline nlohmann::json to_json(GoalSet goal) {
  nlohmann::json members = nlohmann::json::array();
  for (StateId s : goal.members()) members.push_back(s.index);
  return members;
}

inline nlohmann::json to_json(const ValueTable& values) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t t = 0; t < values.rows(); ++t) {
    auto row = values.row(t);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

inline nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const Violation& v : report.violations) {
    violations.push_back({{"rule", v.rule},
                          {"location", v.location},
                          {"measured", v.measured},
                          {"message", v.message}});
  }
  return {{"ok", report.ok()}, {"violations", std::move(violations)}};
}

inline nlohmann::json to_json(const TraceEvent& event, std::uint64_t seq) {
  nlohmann::json e = {{"seq", seq},
                      {"kind", to_string(event.kind)},
                      {"depth", event.depth}};
  if (event.kind != TraceKind::kRecordUpdate) {
    e["policy"] = event.policy;
    e["value"] = event.value;
    e["goal"] = to_json(event.goal);
  }
  if (!event.detail.empty()) e["detail"] = event.detail;
  if (event.record_goal) {
    e["record_goal"] = to_json(*event.record_goal);
    e["record_value"] = event.record_value;
  }
  return e;
}

/// Trace document: ordered events, policies as rule indices.
inline nlohmann::json trace_to_json(const std::vector<TraceEvent>& events) {
  nlohmann::json list = nlohmann::json::array();
  for (std::uint64_t i = 0; i < events.size(); ++i) {
    list.push_back(to_json(events[i], i));
  }
  return {{"format", "gds-trace"},
          {"format_version", kTraceVersion},
          {"events", std::move(list)}};
}

inline nlohmann::json to_json(const GdsResult& result) {
  nlohmann::json out = {{"found", result.found},
                        {"nodes_popped", result.nodes_popped},
                        {"nodes_pushed", result.nodes_pushed},
                        {"nodes_pruned", result.nodes_pruned},
                        {"nodes_pruned_by_record", result.nodes_pruned_by_record},
                        {"verified_pushes", result.verified_pushes}};
  if (result.found) {
    out["value"] = result.value;
    out["policy"] = to_json(result.policy);
    out["goal"] = to_json(result.goal);
    out["depth"] = result.policy.length();
  }
  return out;
}

inline nlohmann::json to_json(const std::optional<OracleAnswer>& answer) {
  if (!answer) return {{"found", false}};
  return {{"found", true},
          {"value", answer->value},
          {"policy", to_json(answer->policy)},
          {"goal", to_json(answer->goal)},
          {"depth", answer->policy.length()}};
}

inline nlohmann::json to_json(const GdsConfig& config) {
  return {{"start", config.start.index},
          {"target", to_json(config.target)},
          {"mode", to_string(config.mode)},
          {"strict_subset", config.strict_subset},
          {"verify", config.verify},
          {"node_budget", config.node_budget}};
}

/// Report document with every field except timing; callers add "timing".
inline nlohmann::json make_report(const std::string& command,
                                  const std::string& status,
                                  nlohmann::json config, nlohmann::json result) {
  return {{"report_version", kReportVersion},
          {"library_version", kLibraryVersion},
          {"command", command},
          {"status", status},
          {"config", std::move(config)},
          {"result", std::move(result)}};
}

/// Identifies an instance inside a report.
inline nlohmann::json instance_summary(const DmdpInstance& instance) {
  nlohmann::json out = {{"digest", instance_digest(instance)},
                        {"num_states", instance.num_states()},
                        {"num_actions", instance.num_actions()},
                        {"horizon", instance.horizon()},
                        {"gamma", instance.gamma()}};
  if (instance.metadata().name) out["name"] = *instance.metadata().name;
  if (instance.metadata().seed) out["seed"] = *instance.metadata().seed;
  return out;
}

}  // namespace dmdp

#endif  // DMDP_REPORT_HPP_
