#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "techdoc/kb.hpp"

namespace techdoc {

enum class ActionCategory {
  kCheckAttribute,
  kAddSubstance,
  kReplacePart,
  kPrimitiveMotorAction,
};

std::string_view category_name(ActionCategory c);
std::optional<ActionCategory> parse_category(std::string_view s);

// Participant roles every action may bind. Other KB roles are accepted too.
inline const std::vector<std::string> kParticipantRoles = {
    "patient", "instrument", "source", "destination", "location"};

// Participants of a refinement step may name a role of the refined parent
// step ("$patient"); expansion substitutes the parent's binding.
inline constexpr char kPlaceholderPrefix = '$';

struct PlanAction {
  std::string id;
  ActionCategory category = ActionCategory::kPrimitiveMotorAction;
  std::string process;                              // KB action concept
  std::string actor = "reader";
  std::map<std::string, std::string> participants;  // role -> instance id
  std::string attribute;                            // role read by check-attribute
  std::vector<Query> preconditions;
  std::vector<Assertion> postconditions;
  std::optional<std::string> refinement;            // plan id
};

struct Step {
  enum class Kind { kAction, kConditional };
  Kind kind = Kind::kAction;
  PlanAction action;
  Query condition;
  std::vector<Step> then_steps;
  std::vector<Step> else_steps;

  static Step of(PlanAction a);
  static Step when(Query condition, std::vector<Step> then_steps,
                   std::vector<Step> else_steps = {});
};

struct Plan {
  std::string id;
  Query goal;
  std::string target_device;
  // Concepts the device must belong to for the plan to be offered. Defaults
  // to the asserted types of `target_device`.
  std::vector<std::string> device_concepts;
  std::vector<Query> preconditions;
  std::vector<Step> steps;
  std::vector<std::string> replacement_items;
  std::string location_info;     // site instance
  std::string location_subject;  // what is located there; defaults to target
};

using PlanLibrary = std::map<std::string, Plan>;

// A step tree with every refinement inlined.
struct ExpandedStep {
  Step::Kind kind = Step::Kind::kAction;
  PlanAction action;
  // Inlined refinement; non-empty iff the action had a refinement.
  std::vector<ExpandedStep> refinement_steps;
  Query condition;
  std::vector<ExpandedStep> then_steps;
  std::vector<ExpandedStep> else_steps;
  // Set by state filtering when the condition was left undecided.
  bool condition_retained = true;

  bool is_leaf_action() const {
    return kind == Step::Kind::kAction && refinement_steps.empty();
  }
};

struct ExpandedPlan {
  std::string plan_id;
  std::vector<ExpandedStep> steps;

  std::size_t leaf_count() const;
  // Leaf actions in document order, descending into both branches.
  std::vector<const PlanAction*> leaves() const;
};

ExpandedPlan expand_plan(const std::string& plan_id, const PlanLibrary& plans,
                         const KnowledgeBase& kb);
// Expanding an already expanded plan is the identity.
ExpandedPlan expand_plan(const ExpandedPlan& expanded, const PlanLibrary& plans,
                         const KnowledgeBase& kb);

std::vector<std::string> applicable_plans(const std::string& device,
                                          const PlanLibrary& plans,
                                          const KnowledgeBase& kb);

struct Diagnostic {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
  std::string subject;
};

std::vector<Diagnostic> validate_plan(const std::string& plan_id, const PlanLibrary& plans,
                                      const KnowledgeBase& kb);
std::vector<Diagnostic> validate_plan(const Plan& plan, const PlanLibrary& plans,
                                      const KnowledgeBase& kb);

// Checks one participant binding against the process concept's value
// restrictions. Shared by plan validation and the authoring menus.
bool participant_fits(const std::string& process, const std::string& role,
                      const std::string& instance, const KnowledgeBase& kb);
// Concepts a participant of `process` in `role` must belong to.
std::vector<std::string> participant_ranges(const std::string& process,
                                            const std::string& role,
                                            const KnowledgeBase& kb);

}  // namespace techdoc
