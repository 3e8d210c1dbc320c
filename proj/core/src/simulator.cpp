#include "techdoc/simulator.hpp"

#include <algorithm>

#include "techdoc/io.hpp"

namespace techdoc {

std::string_view trace_status_name(TraceStatus s) {
  switch (s) {
    case TraceStatus::kExecuted: return "executed";
    case TraceStatus::kSkippedByCondition: return "skipped-by-condition";
    case TraceStatus::kBlocked: return "blocked";
  }
  return "?";
}

bool Trace::blocked() const {
  return !entries.empty() && entries.back().status == TraceStatus::kBlocked;
}

const TraceEntry* Trace::find(const std::string& action_id) const {
  for (const auto& e : entries) {
    if (e.action_id == action_id) return &e;
  }
  return nullptr;
}

std::vector<PreconditionResult> check_preconditions(const PlanAction& action,
                                                    const KnowledgeBase& kb) {
  std::vector<PreconditionResult> out;
  for (const auto& q : action.preconditions) out.push_back({q, kb.ask(q).holds});
  return out;
}

TraceEntry execute_action(const PlanAction& action, KnowledgeBase& kb) {
  TraceEntry entry;
  entry.action_id = action.id;
  entry.preconditions = check_preconditions(action, kb);
  for (const auto& r : entry.preconditions) {
    if (!r.holds) {
      entry.status = TraceStatus::kBlocked;
      return entry;
    }
  }
  if (!action.postconditions.empty()) {
    entry.delta = kb.tell(action.postconditions);
    entry.fired_rules = entry.delta.fired_rules;
  }
  entry.status = TraceStatus::kExecuted;
  return entry;
}

namespace {

class Walker {
 public:
  Walker(Trace& trace, KnowledgeBase& kb) : trace_(trace), kb_(kb) {}

  // Returns false once an action blocks.
  bool walk(const std::vector<ExpandedStep>& steps) {
    for (const auto& s : steps) {
      if (s.kind == Step::Kind::kConditional) {
        bool holds = kb_.ask(s.condition).holds;
        skip(holds ? s.else_steps : s.then_steps, s.condition);
        if (!walk(holds ? s.then_steps : s.else_steps)) return false;
      } else if (!s.refinement_steps.empty()) {
        // The parent's preconditions gate its refinement; its postconditions
        // hold once the refinement is done.
        auto pre = check_preconditions(s.action, kb_);
        bool ok = std::all_of(pre.begin(), pre.end(), [](const auto& r) { return r.holds; });
        if (!ok) {
          TraceEntry e;
          e.action_id = s.action.id;
          e.preconditions = std::move(pre);
          e.status = TraceStatus::kBlocked;
          trace_.entries.push_back(std::move(e));
          return false;
        }
        if (!walk(s.refinement_steps)) return false;
        if (!s.action.postconditions.empty()) {
          TraceEntry e = execute_action(s.action, kb_);
          trace_.entries.push_back(e);
          if (e.status == TraceStatus::kBlocked) return false;
        }
      } else {
        TraceEntry e = execute_action(s.action, kb_);
        trace_.entries.push_back(e);
        if (e.status == TraceStatus::kBlocked) return false;
      }
    }
    return true;
  }

 private:
  void skip(const std::vector<ExpandedStep>& steps, const Query& condition) {
    for (const auto& s : steps) {
      if (s.kind == Step::Kind::kConditional) {
        skip(s.then_steps, condition);
        skip(s.else_steps, condition);
        continue;
      }
      if (!s.refinement_steps.empty()) skip(s.refinement_steps, condition);
      if (s.refinement_steps.empty() || !s.action.postconditions.empty()) {
        TraceEntry e;
        e.action_id = s.action.id;
        e.preconditions.push_back({condition, false});
        e.status = TraceStatus::kSkippedByCondition;
        trace_.entries.push_back(std::move(e));
      }
    }
  }

  Trace& trace_;
  KnowledgeBase& kb_;
};

std::vector<ExpandedStep> filter(const std::vector<ExpandedStep>& steps, const KnowledgeBase& kb) {
  std::vector<ExpandedStep> out;
  for (const auto& s : steps) {
    if (s.kind != Step::Kind::kConditional) {
      ExpandedStep copy = s;
      copy.refinement_steps = filter(s.refinement_steps, kb);
      out.push_back(std::move(copy));
      continue;
    }
    Truth t = kb.evaluate_known(s.condition);
    if (t == Truth::kUnknown) {
      ExpandedStep copy = s;
      copy.then_steps = filter(s.then_steps, kb);
      copy.else_steps = filter(s.else_steps, kb);
      copy.condition_retained = true;
      out.push_back(std::move(copy));
      continue;
    }
    for (auto& kept : filter(t == Truth::kTrue ? s.then_steps : s.else_steps, kb)) {
      out.push_back(std::move(kept));
    }
  }
  return out;
}

}  // namespace

Trace simulate(const std::string& plan_id, const PlanLibrary& plans, KnowledgeBase& kb) {
  Trace trace;
  trace.plan_id = plan_id;
  trace.plan = expand_plan(plan_id, plans, kb);
  Walker(trace, kb).walk(trace.plan.steps);
  return trace;
}

ExpandedPlan filter_relevant_steps(const std::string& plan_id, const PlanLibrary& plans,
                                   const KnowledgeBase& kb) {
  return filter_relevant_steps(expand_plan(plan_id, plans, kb), kb);
}

ExpandedPlan filter_relevant_steps(const ExpandedPlan& plan, const KnowledgeBase& kb) {
  ExpandedPlan out;
  out.plan_id = plan.plan_id;
  out.steps = filter(plan.steps, kb);
  return out;
}

nlohmann::json trace_to_json(const Trace& trace) {
  Json entries = Json::array();
  for (const auto& e : trace.entries) {
    Json pre = Json::array();
    for (const auto& r : e.preconditions) {
      pre.push_back({{"query", query_to_json(r.query)}, {"holds", r.holds}});
    }
    entries.push_back({{"action", e.action_id},
                       {"status", std::string(trace_status_name(e.status))},
                       {"preconditions", pre},
                       {"delta", delta_to_json(e.delta)},
                       {"fired_rules", e.fired_rules}});
  }
  return {{"plan", trace.plan_id}, {"blocked", trace.blocked()}, {"entries", entries}};
}

}  // namespace techdoc
