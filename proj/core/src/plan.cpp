#include "techdoc/plan.hpp"

#include <algorithm>
#include <functional>

namespace techdoc {

std::string_view category_name(ActionCategory c) {
  switch (c) {
    case ActionCategory::kCheckAttribute: return "check-attribute";
    case ActionCategory::kAddSubstance: return "add-substance";
    case ActionCategory::kReplacePart: return "replace-part";
    case ActionCategory::kPrimitiveMotorAction: return "primitive-motor-action";
  }
  return "?";
}

std::optional<ActionCategory> parse_category(std::string_view s) {
  if (s == "check-attribute") return ActionCategory::kCheckAttribute;
  if (s == "add-substance") return ActionCategory::kAddSubstance;
  if (s == "replace-part") return ActionCategory::kReplacePart;
  if (s == "primitive-motor-action") return ActionCategory::kPrimitiveMotorAction;
  return std::nullopt;
}

Step Step::of(PlanAction a) {
  Step s;
  s.kind = Kind::kAction;
  s.action = std::move(a);
  return s;
}

Step Step::when(Query condition, std::vector<Step> then_steps, std::vector<Step> else_steps) {
  Step s;
  s.kind = Kind::kConditional;
  s.condition = std::move(condition);
  s.then_steps = std::move(then_steps);
  s.else_steps = std::move(else_steps);
  return s;
}

namespace {

void collect_leaves(const std::vector<ExpandedStep>& steps,
                    std::vector<const PlanAction*>& out) {
  for (const auto& s : steps) {
    if (s.kind == Step::Kind::kConditional) {
      collect_leaves(s.then_steps, out);
      collect_leaves(s.else_steps, out);
    } else if (s.refinement_steps.empty()) {
      out.push_back(&s.action);
    } else {
      collect_leaves(s.refinement_steps, out);
    }
  }
}

bool is_placeholder(const std::string& s) {
  return !s.empty() && s.front() == kPlaceholderPrefix;
}

using Bindings = std::map<std::string, std::string>;

std::string substitute(const std::string& id, const Bindings& parent,
                       const std::string& where) {
  if (!is_placeholder(id)) return id;
  auto it = parent.find(id.substr(1));
  if (it == parent.end()) {
    throw Error(ErrorCode::kUnresolvedPlaceholder,
                "placeholder '" + id + "' in '" + where + "' has no binding in the parent step",
                id);
  }
  return it->second;
}

Term substitute(const Term& t, const Bindings& parent, const std::string& where) {
  if (t.is_variable() || !t.constant.is_instance()) return t;
  Term out = t;
  out.constant.text = substitute(t.constant.text, parent, where);
  return out;
}

Query substitute(const Query& q, const Bindings& parent, const std::string& where) {
  Query out = q;
  for (auto& a : out.atoms) {
    a.subject = substitute(a.subject, parent, where);
    if (a.kind == Atom::Kind::kFiller) a.object = substitute(a.object, parent, where);
  }
  return out;
}

class Expander {
 public:
  Expander(const PlanLibrary& plans) : plans_(plans) {}

  std::vector<ExpandedStep> expand_plan_steps(const std::string& plan_id,
                                              const Bindings& parent,
                                              const std::string& id_prefix) {
    auto it = plans_.find(plan_id);
    if (it == plans_.end()) {
      throw Error(ErrorCode::kUnknownId, "unknown plan '" + plan_id + "'", plan_id);
    }
    if (std::find(stack_.begin(), stack_.end(), plan_id) != stack_.end()) {
      std::string path;
      auto start = std::find(stack_.begin(), stack_.end(), plan_id);
      for (auto p = start; p != stack_.end(); ++p) path += *p + ",";
      path += plan_id;
      throw Error(ErrorCode::kRefinementCycle, "refinement cycle [" + path + "]", path);
    }
    stack_.push_back(plan_id);
    auto out = expand_steps(it->second.steps, parent, id_prefix);
    stack_.pop_back();
    return out;
  }

  std::vector<ExpandedStep> expand_steps(const std::vector<Step>& steps,
                                         const Bindings& parent,
                                         const std::string& id_prefix) {
    std::vector<ExpandedStep> out;
    for (const auto& s : steps) out.push_back(expand_step(s, parent, id_prefix));
    return out;
  }

  ExpandedStep expand_step(const Step& s, const Bindings& parent, const std::string& id_prefix) {
    ExpandedStep e;
    e.kind = s.kind;
    if (s.kind == Step::Kind::kConditional) {
      e.condition = substitute(s.condition, parent, "condition");
      e.then_steps = expand_steps(s.then_steps, parent, id_prefix);
      e.else_steps = expand_steps(s.else_steps, parent, id_prefix);
      return e;
    }
    e.action = instantiate(s.action, parent, id_prefix);
    if (e.action.refinement) {
      e.refinement_steps =
          expand_plan_steps(*e.action.refinement, e.action.participants, e.action.id + "/");
    }
    return e;
  }

  // Re-expansion of an expanded tree: only unexpanded refinements change.
  void reexpand(std::vector<ExpandedStep>& steps) {
    for (auto& s : steps) {
      if (s.kind == Step::Kind::kConditional) {
        reexpand(s.then_steps);
        reexpand(s.else_steps);
      } else if (s.action.refinement && s.refinement_steps.empty()) {
        s.refinement_steps =
            expand_plan_steps(*s.action.refinement, s.action.participants, s.action.id + "/");
      } else {
        reexpand(s.refinement_steps);
      }
    }
  }

  std::vector<std::string> stack_;

 private:
  PlanAction instantiate(const PlanAction& a, const Bindings& parent,
                         const std::string& id_prefix) {
    PlanAction out = a;
    out.id = id_prefix + a.id;
    for (auto& [role, inst] : out.participants) inst = substitute(inst, parent, out.id);
    for (auto& q : out.preconditions) q = substitute(q, parent, out.id);
    for (auto& p : out.postconditions) {
      p.instance = substitute(p.instance, parent, out.id);
      if (p.value.is_instance()) p.value.text = substitute(p.value.text, parent, out.id);
    }
    return out;
  }

  const PlanLibrary& plans_;
};

}  // namespace

std::size_t ExpandedPlan::leaf_count() const { return leaves().size(); }

std::vector<const PlanAction*> ExpandedPlan::leaves() const {
  std::vector<const PlanAction*> out;
  collect_leaves(steps, out);
  return out;
}

ExpandedPlan expand_plan(const std::string& plan_id, const PlanLibrary& plans,
                         const KnowledgeBase&) {
  Expander ex(plans);
  ExpandedPlan out;
  out.plan_id = plan_id;
  out.steps = ex.expand_plan_steps(plan_id, {}, "");
  return out;
}

ExpandedPlan expand_plan(const ExpandedPlan& expanded, const PlanLibrary& plans,
                         const KnowledgeBase&) {
  Expander ex(plans);
  ex.stack_.push_back(expanded.plan_id);
  ExpandedPlan out = expanded;
  ex.reexpand(out.steps);
  return out;
}

namespace {

std::vector<std::string> device_concepts_of(const Plan& p, const KnowledgeBase& kb) {
  if (!p.device_concepts.empty()) return p.device_concepts;
  if (kb.has_instance(p.target_device)) {
    const auto& t = kb.instance(p.target_device).asserted_types;
    return {t.begin(), t.end()};
  }
  return {};
}

}  // namespace

std::vector<std::string> applicable_plans(const std::string& device, const PlanLibrary& plans,
                                          const KnowledgeBase& kb) {
  const Instance& dev = kb.instance(device);
  std::vector<std::string> out;
  for (const auto& [id, plan] : plans) {
    auto concepts = device_concepts_of(plan, kb);
    if (concepts.empty()) continue;
    bool fits = std::all_of(concepts.begin(), concepts.end(), [&](const std::string& c) {
      return dev.derived_types.count(c) > 0;
    });
    if (!fits) continue;
    bool ready = true;
    for (const auto& q : plan.preconditions) {
      try {
        if (!kb.ask(q).holds) {
          ready = false;
          break;
        }
      } catch (const Error&) {
        ready = false;
        break;
      }
    }
    if (ready) out.push_back(id);
  }
  return out;
}

std::vector<std::string> participant_ranges(const std::string& process, const std::string& role,
                                            const KnowledgeBase& kb) {
  std::vector<std::string> out;
  if (kb.has_role(role)) {
    const Role& r = kb.role(role);
    if (!r.is_literal() && r.range_concept != kThing) out.push_back(r.range_concept);
  }
  if (!kb.has_concept(process)) return out;
  for (const auto& r : kb.effective_restrictions(process)) {
    if (r.kind == RestrictionKind::kAll && r.role == role &&
        std::find(out.begin(), out.end(), r.concept_id) == out.end()) {
      out.push_back(r.concept_id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool participant_fits(const std::string& process, const std::string& role,
                      const std::string& instance, const KnowledgeBase& kb) {
  if (!kb.has_instance(instance)) return false;
  for (const auto& c : participant_ranges(process, role, kb)) {
    if (!kb.is_a(instance, c)) return false;
  }
  return true;
}

namespace {

class Validator {
 public:
  Validator(const Plan& plan, const PlanLibrary& plans, const KnowledgeBase& kb)
      : plan_(plan), plans_(plans), kb_(kb) {
    // Refinement plans are templates: their participants may be placeholders.
    for (const auto& [id, p] : plans_) {
      for_each_action(p.steps, [&](const PlanAction& a) {
        if (a.refinement == plan_.id) is_refinement_ = true;
      });
    }
  }

  std::vector<Diagnostic> run() {
    if (plan_.steps.empty()) error("empty-plan", "plan has no steps", plan_.id);
    if (!plan_.target_device.empty() && !kb_.has_instance(plan_.target_device)) {
      error("unknown-instance", "target device does not exist", plan_.target_device);
    }
    for (const auto& c : plan_.device_concepts) {
      if (!kb_.has_concept(c)) error("unknown-concept", "unknown device concept", c);
    }
    if (!plan_.location_info.empty()) check_instance(plan_.location_info, "location-info");
    if (!plan_.location_subject.empty()) {
      check_instance(plan_.location_subject, "location-subject");
    }
    for (const auto& item : plan_.replacement_items) check_instance(item, "replacement-item");
    if (!plan_.goal.atoms.empty()) check_query(plan_.goal, "goal");
    for (const auto& q : plan_.preconditions) check_query(q, "plan precondition");
    check_steps(plan_.steps);
    if (!has_error_) {
      try {
        PlanLibrary with_draft = plans_;
        with_draft[plan_.id] = plan_;
        Expander ex(with_draft);
        ex.expand_plan_steps(plan_.id, {}, "");
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kRefinementCycle || e.code() == ErrorCode::kUnknownId ||
            !is_refinement_) {
          error(std::string(error_code_name(e.code())), e.what(), e.subject());
        }
      }
    }
    return std::move(out_);
  }

 private:
  static void for_each_action(const std::vector<Step>& steps,
                              const std::function<void(const PlanAction&)>& fn) {
    for (const auto& s : steps) {
      if (s.kind == Step::Kind::kAction) {
        fn(s.action);
      } else {
        for_each_action(s.then_steps, fn);
        for_each_action(s.else_steps, fn);
      }
    }
  }

  void error(std::string code, std::string message, std::string subject) {
    has_error_ = true;
    out_.push_back({Diagnostic::Severity::kError, std::move(code), std::move(message),
                    std::move(subject)});
  }

  void warning(std::string code, std::string message, std::string subject) {
    out_.push_back({Diagnostic::Severity::kWarning, std::move(code), std::move(message),
                    std::move(subject)});
  }

  bool deferred(const std::string& id) const { return is_refinement_ && is_placeholder(id); }

  void check_instance(const std::string& id, const std::string& what) {
    if (deferred(id)) return;
    if (is_placeholder(id)) {
      error("unresolved-placeholder", what + " uses a placeholder outside a refinement plan", id);
    } else if (!kb_.has_instance(id)) {
      error("unknown-instance", what + " refers to an unknown instance", id);
    }
  }

  void check_query(const Query& q, const std::string& what) {
    try {
      kb_.validate_query(q);
    } catch (const Error& e) {
      error("malformed-query", what + ": " + e.what(), e.subject());
      return;
    }
    for (const auto& a : q.atoms) {
      if (!a.subject.is_variable()) check_instance(a.subject.constant.text, what);
    }
  }

  void check_condition(const Query& q) {
    check_query(q, "condition");
    if (has_error_) return;
    for (const auto& a : q.atoms) {
      if (a.subject.is_variable()) continue;
      const std::string& x = a.subject.constant.text;
      if (!kb_.has_instance(x)) continue;
      const auto& types = kb_.instance(x).derived_types;
      if (a.kind == Atom::Kind::kType) {
        // Without assertions of new primitive types the condition can never
        // hold when a primitive ancestor is missing.
        for (const auto& anc : kb_.ancestors(a.concept_id)) {
          if (kb_.concept_def(anc).primitive && !types.count(anc)) {
            warning("unsatisfiable-condition",
                    "'" + x + "' is not a " + anc + ", so it can never be a " + a.concept_id,
                    x);
            break;
          }
        }
      } else {
        const std::string& domain = kb_.role(a.role).domain;
        if (!types.count(domain)) {
          warning("unsatisfiable-condition",
                  "'" + x + "' is outside the domain of role " + a.role, x);
        }
      }
    }
  }

  void check_steps(const std::vector<Step>& steps) {
    for (const auto& s : steps) {
      if (s.kind == Step::Kind::kConditional) {
        check_condition(s.condition);
        if (s.then_steps.empty() && s.else_steps.empty()) {
          error("empty-conditional", "conditional step has no branches", plan_.id);
        }
        check_steps(s.then_steps);
        check_steps(s.else_steps);
      } else {
        check_action(s.action);
      }
    }
  }

  void check_action(const PlanAction& a) {
    if (a.id.empty()) error("missing-id", "action without id", plan_.id);
    if (!kb_.has_concept(a.process)) {
      error("unknown-process", "action '" + a.id + "' has unknown process", a.process);
    }
    for (const auto& [role, inst] : a.participants) {
      bool known_role = std::find(kParticipantRoles.begin(), kParticipantRoles.end(), role) !=
                            kParticipantRoles.end() ||
                        kb_.has_role(role);
      if (!known_role) {
        error("unknown-role", "action '" + a.id + "' binds unknown role", role);
        continue;
      }
      check_instance(inst, "participant " + role + " of '" + a.id + "'");
      if (kb_.has_instance(inst) && kb_.has_concept(a.process) &&
          !participant_fits(a.process, role, inst, kb_)) {
        error("participant-type",
              "'" + inst + "' does not fit role " + role + " of " + a.process, inst);
      }
    }
    if (a.category == ActionCategory::kCheckAttribute) {
      if (a.attribute.empty() || !kb_.has_role(a.attribute)) {
        error("missing-attribute", "check-attribute action '" + a.id + "' needs an attribute role",
              a.id);
      } else {
        const Role& r = kb_.role(a.attribute);
        bool ok = r.is_literal() &&
                  (*r.literal == LiteralType::kNumber || *r.literal == LiteralType::kEnum);
        if (!ok) {
          error("attribute-range", "attribute of '" + a.id + "' must be number or enum ranged",
                a.attribute);
        }
      }
    }
    for (const auto& q : a.preconditions) check_query(q, "precondition of '" + a.id + "'");
    for (const auto& p : a.postconditions) check_postcondition(a, p);
    if (a.refinement && !plans_.count(*a.refinement) && *a.refinement != plan_.id) {
      error("unknown-plan", "refinement of '" + a.id + "' does not resolve", *a.refinement);
    }
  }

  void check_postcondition(const PlanAction& a, const Assertion& p) {
    check_instance(p.instance, "postcondition of '" + a.id + "'");
    if (p.kind == Assertion::Kind::kType) {
      if (!kb_.has_concept(p.concept_id)) {
        error("unknown-concept", "postcondition of '" + a.id + "' names unknown concept",
              p.concept_id);
      }
      return;
    }
    if (!kb_.has_role(p.role)) {
      error("unknown-role", "postcondition of '" + a.id + "' uses unknown role", p.role);
      return;
    }
    try {
      kb_.check_filler(p.role, p.value);
    } catch (const Error& e) {
      error("range-violation", e.what(), p.role);
      return;
    }
    const Role& r = kb_.role(p.role);
    if (!r.is_literal() && !deferred(p.value.text)) {
      if (!kb_.has_instance(p.value.text)) {
        error("unknown-instance", "postcondition filler does not exist", p.value.text);
      } else if (!kb_.is_a(p.value.text, r.range_concept)) {
        error("range-violation", "postcondition filler is not a " + r.range_concept,
              p.value.text);
      }
    }
  }

  const Plan& plan_;
  const PlanLibrary& plans_;
  const KnowledgeBase& kb_;
  bool is_refinement_ = false;
  bool has_error_ = false;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate_plan(const Plan& plan, const PlanLibrary& plans,
                                      const KnowledgeBase& kb) {
  return Validator(plan, plans, kb).run();
}

std::vector<Diagnostic> validate_plan(const std::string& plan_id, const PlanLibrary& plans,
                                      const KnowledgeBase& kb) {
  auto it = plans.find(plan_id);
  if (it == plans.end()) {
    return {{Diagnostic::Severity::kError, "unknown-plan", "no such plan", plan_id}};
  }
  return validate_plan(it->second, plans, kb);
}

}  // namespace techdoc
