#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/kb.hpp"
#include "techdoc/plan.hpp"

namespace techdoc {

struct PreconditionResult {
  Query query;
  bool holds = false;
};

enum class TraceStatus { kExecuted, kSkippedByCondition, kBlocked };

std::string_view trace_status_name(TraceStatus s);

struct TraceEntry {
  std::string action_id;
  std::vector<PreconditionResult> preconditions;
  StateDelta delta;
  std::vector<std::string> fired_rules;
  TraceStatus status = TraceStatus::kExecuted;
};

struct Trace {
  std::string plan_id;
  ExpandedPlan plan;
  std::vector<TraceEntry> entries;

  bool blocked() const;
  const TraceEntry* find(const std::string& action_id) const;
};

std::vector<PreconditionResult> check_preconditions(const PlanAction& action,
                                                    const KnowledgeBase& kb);

// Runs one action. A blocked action leaves `kb` untouched; a postcondition
// that fails to apply rolls the KB back and rethrows.
TraceEntry execute_action(const PlanAction& action, KnowledgeBase& kb);

// Walks the expanded plan against `kb`, which is mutated. Pass a copy to keep
// the original state.
Trace simulate(const std::string& plan_id, const PlanLibrary& plans, KnowledgeBase& kb);

// Drops conditional branches that the current state decides. Conditions on
// facts with no asserted data stay in the plan.
ExpandedPlan filter_relevant_steps(const std::string& plan_id, const PlanLibrary& plans,
                                   const KnowledgeBase& kb);
ExpandedPlan filter_relevant_steps(const ExpandedPlan& plan, const KnowledgeBase& kb);

nlohmann::json trace_to_json(const Trace& trace);

}  // namespace techdoc
