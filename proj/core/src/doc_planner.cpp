#include "techdoc/doc_planner.hpp"

#include <algorithm>
#include <unordered_set>

#include "techdoc/io.hpp"
#include "techdoc/text.hpp"

namespace techdoc {

std::string_view relation_name(RstRelation r) {
  switch (r) {
    case RstRelation::kSequence: return "SEQUENCE";
    case RstRelation::kPurpose: return "PURPOSE";
    case RstRelation::kCondition: return "CONDITION";
    case RstRelation::kElaboration: return "ELABORATION";
    case RstRelation::kMeans: return "MEANS";
    case RstRelation::kMotivation: return "MOTIVATION";
    case RstRelation::kPrecondition: return "PRECONDITION";
    case RstRelation::kResult: return "RESULT";
    case RstRelation::kUntil: return "UNTIL";
    case RstRelation::kJoint: return "JOINT";
    case RstRelation::kContrast: return "CONTRAST";
  }
  return "?";
}

bool is_multinuclear(RstRelation r) {
  return r == RstRelation::kSequence || r == RstRelation::kJoint || r == RstRelation::kContrast;
}

std::string_view speech_act_name(SpeechAct s) {
  switch (s) {
    case SpeechAct::kInstruction: return "instruction";
    case SpeechAct::kDescription: return "description";
    case SpeechAct::kWarning: return "warning";
  }
  return "?";
}

RstNodePtr RstNode::leaf(Proposition p) {
  auto n = std::make_shared<RstNode>();
  n->kind = Kind::kLeaf;
  n->proposition = std::move(p);
  return n;
}

RstNodePtr RstNode::with_satellites(RstNodePtr nucleus, std::vector<Satellite> satellites) {
  auto n = std::make_shared<RstNode>();
  n->kind = Kind::kNucleusSatellite;
  n->nucleus = std::move(nucleus);
  n->satellites = std::move(satellites);
  return n;
}

RstNodePtr RstNode::multi(RstRelation r, std::vector<RstNodePtr> nuclei) {
  auto n = std::make_shared<RstNode>();
  n->kind = Kind::kMultinuclear;
  n->relation = r;
  n->nuclei = std::move(nuclei);
  return n;
}

std::string semantic_role(const std::string& participant_role) {
  if (participant_role == "patient") return "actee";
  return participant_role;
}

namespace {

void require_instance(const std::string& id, const KnowledgeBase& kb, const std::string& where) {
  if (!kb.has_instance(id)) {
    throw Error(ErrorCode::kUnresolvedParticipant,
                "participant '" + id + "' of '" + where + "' is not a KB instance", id);
  }
}

Proposition action_proposition(const PlanAction& a, const KnowledgeBase& kb) {
  Proposition p;
  p.predicate = a.process;
  p.action_id = a.id;
  p.participants["actor"] = a.actor;
  for (const auto& [role, inst] : a.participants) {
    require_instance(inst, kb, a.id);
    p.participants[semantic_role(role)] = inst;
  }
  p.annotation.speech_act = SpeechAct::kInstruction;
  if (!a.attribute.empty()) p.annotation.hints.insert("attribute:" + a.attribute);
  return p;
}

Proposition condition_proposition(const Query& q, const KnowledgeBase& kb, bool negated) {
  if (q.atoms.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "conditions must be a single atom to be expressed in text");
  }
  const Atom& a = q.atoms.front();
  if (a.subject.is_variable() || !a.subject.constant.is_instance()) {
    throw Error(ErrorCode::kInvalidArgument, "condition subject must be an instance");
  }
  Proposition p;
  p.from_query = true;
  p.negated = negated;
  p.annotation.speech_act = SpeechAct::kDescription;
  require_instance(a.subject.constant.text, kb, "condition");
  p.participants["actee"] = a.subject.constant.text;
  if (a.kind == Atom::Kind::kType) {
    p.predicate = a.concept_id;
  } else if (a.kind == Atom::Kind::kFiller && !a.object.is_variable() &&
             a.object.constant.kind == Value::Kind::kEnum) {
    p.predicate = a.role + "=" + a.object.constant.text;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "only type atoms and enum filler atoms can be expressed as conditions");
  }
  return p;
}

class Builder {
 public:
  explicit Builder(const KnowledgeBase& kb) : kb_(kb) {}

  std::vector<RstNodePtr> steps(const std::vector<ExpandedStep>& steps) {
    std::vector<RstNodePtr> out;
    for (const auto& s : steps) {
      if (s.kind == Step::Kind::kConditional) {
        if (!s.then_steps.empty()) {
          out.push_back(conditional(s.then_steps, s.condition, false));
        }
        if (!s.else_steps.empty()) {
          out.push_back(conditional(s.else_steps, s.condition, true));
        }
      } else if (s.refinement_steps.empty()) {
        out.push_back(RstNode::leaf(action_proposition(s.action, kb_)));
      } else if (s.action.postconditions.empty()) {
        // The parent step has no effect of its own: its refinement replaces it.
        for (auto& n : steps_of(s.refinement_steps)) out.push_back(std::move(n));
      } else {
        auto parent = RstNode::leaf(action_proposition(s.action, kb_));
        out.push_back(RstNode::with_satellites(
            parent, {{RstRelation::kMeans, group(steps_of(s.refinement_steps))}}));
      }
    }
    return out;
  }

  RstNodePtr group(std::vector<RstNodePtr> nodes) {
    if (nodes.size() == 1) return nodes.front();
    return RstNode::multi(RstRelation::kSequence, std::move(nodes));
  }

 private:
  std::vector<RstNodePtr> steps_of(const std::vector<ExpandedStep>& s) { return steps(s); }

  RstNodePtr conditional(const std::vector<ExpandedStep>& branch, const Query& q, bool negated) {
    auto body = steps(branch);
    auto cond = RstNode::leaf(condition_proposition(q, kb_, negated));
    return RstNode::with_satellites(group(std::move(body)), {{RstRelation::kCondition, cond}});
  }

  const KnowledgeBase& kb_;
};

std::vector<ExpandedStep> keep_traced(const std::vector<ExpandedStep>& steps,
                                      const std::set<std::string>& kept) {
  std::vector<ExpandedStep> out;
  for (const auto& s : steps) {
    ExpandedStep copy = s;
    if (s.kind == Step::Kind::kConditional) {
      copy.then_steps = keep_traced(s.then_steps, kept);
      copy.else_steps = keep_traced(s.else_steps, kept);
      if (copy.then_steps.empty() && copy.else_steps.empty()) continue;
    } else if (!s.refinement_steps.empty()) {
      copy.refinement_steps = keep_traced(s.refinement_steps, kept);
      if (copy.refinement_steps.empty()) continue;
    } else if (!kept.count(s.action.id)) {
      continue;
    }
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace

SectionSchema build_document(const ExpandedPlan& expanded, const PlanLibrary& plans,
                             const KnowledgeBase& kb) {
  auto it = plans.find(expanded.plan_id);
  if (it == plans.end()) {
    throw Error(ErrorCode::kUnknownId, "unknown plan '" + expanded.plan_id + "'",
                expanded.plan_id);
  }
  const Plan& plan = it->second;
  SectionSchema schema;
  schema.plan_id = plan.id;

  if (!plan.location_info.empty()) {
    std::string subject = plan.location_subject.empty() ? plan.target_device : plan.location_subject;
    require_instance(subject, kb, plan.id);
    require_instance(plan.location_info, kb, plan.id);
    Proposition where;
    where.predicate = kBeLocatedIn;
    where.participants = {{"actee", subject}, {"location", plan.location_info}};
    auto node = RstNode::leaf(where);
    const auto& under = kb.instance(plan.location_info).fillers_of("located-under");
    if (!under.empty()) {
      Proposition above;
      above.predicate = kBeLocatedUnder;
      above.participants = {{"actee", plan.location_info}, {"location", under.front().text}};
      node = RstNode::with_satellites(node, {{RstRelation::kElaboration, RstNode::leaf(above)}});
    }
    schema.location = node;
  }

  if (!plan.replacement_items.empty()) {
    std::vector<RstNodePtr> items;
    for (const auto& item : plan.replacement_items) {
      require_instance(item, kb, plan.id);
      Proposition p;
      p.predicate = kBeRequired;
      p.participants = {{"actee", item}};
      items.push_back(RstNode::leaf(p));
    }
    schema.replacement = items.size() == 1 ? items.front()
                                           : RstNode::multi(RstRelation::kJoint, std::move(items));
  }

  Builder b(kb);
  auto nodes = b.steps(expanded.steps);
  if (nodes.empty()) {
    throw Error(ErrorCode::kEmptyPlan, "plan '" + plan.id + "' has no steps to describe", plan.id);
  }
  schema.activity = b.group(std::move(nodes));
  return schema;
}

SectionSchema build_document(const Trace& trace, const PlanLibrary& plans,
                             const KnowledgeBase& kb) {
  std::set<std::string> kept;
  for (const auto& e : trace.entries) {
    if (e.status != TraceStatus::kSkippedByCondition) kept.insert(e.action_id);
  }
  ExpandedPlan filtered;
  filtered.plan_id = trace.plan.plan_id;
  filtered.steps = keep_traced(trace.plan.steps, kept);
  return build_document(filtered, plans, kb);
}

namespace {

class TreeChecker {
 public:
  TreeChecker(const KnowledgeBase* kb, std::vector<Diagnostic>& out) : kb_(kb), out_(out) {}

  void visit(const RstNodePtr& n, const std::string& path) {
    if (!n) {
      report("null-node", "missing node", path);
      return;
    }
    if (!seen_.insert(n.get()).second) {
      report("shared-node", "node reachable from more than one parent", path);
      return;
    }
    switch (n->kind) {
      case RstNode::Kind::kLeaf:
        leaf(n->proposition, path);
        break;
      case RstNode::Kind::kNucleusSatellite:
        if (n->satellites.empty()) report("arity", "nucleus without satellites", path);
        visit(n->nucleus, path + "/n");
        for (std::size_t i = 0; i < n->satellites.size(); ++i) {
          const auto& s = n->satellites[i];
          std::string sp = path + "/s" + std::to_string(i);
          if (is_multinuclear(s.relation)) {
            report("arity", std::string(relation_name(s.relation)) + " used as a satellite", sp);
          }
          bool needs_query = s.relation == RstRelation::kCondition ||
                             s.relation == RstRelation::kPrecondition ||
                             s.relation == RstRelation::kUntil;
          if (needs_query && (!s.node || s.node->kind != RstNode::Kind::kLeaf ||
                              !s.node->proposition.from_query)) {
            report("annotation", std::string(relation_name(s.relation)) +
                                     " satellite must carry a condition proposition", sp);
          }
          visit(s.node, sp);
        }
        break;
      case RstNode::Kind::kMultinuclear:
        if (!is_multinuclear(n->relation)) {
          report("arity", std::string(relation_name(n->relation)) + " is not multinuclear", path);
        }
        if (n->relation == RstRelation::kSequence && n->nuclei.size() < 2) {
          report("arity", "SEQUENCE needs at least two nuclei", path);
        }
        if (n->nuclei.empty()) report("arity", "multinuclear node without nuclei", path);
        for (std::size_t i = 0; i < n->nuclei.size(); ++i) {
          visit(n->nuclei[i], path + "/" + std::to_string(i));
        }
        break;
    }
  }

 private:
  void leaf(const Proposition& p, const std::string& path) {
    if (p.predicate.empty()) report("empty-predicate", "leaf without predicate", path);
    if (p.annotation.speech_act == SpeechAct::kInstruction && p.action_id.empty()) {
      report("annotation", "instruction on a proposition not derived from an action", path);
    }
    if (!kb_) return;
    for (const auto& [role, inst] : p.participants) {
      if (role == "actor") continue;
      if (!kb_->has_instance(inst)) {
        report("unresolved-participant", "participant '" + inst + "' is not a KB instance", path);
      }
    }
  }

  void report(const std::string& code, const std::string& message, const std::string& subject) {
    out_.push_back({Diagnostic::Severity::kError, code, message, subject});
  }

  const KnowledgeBase* kb_;
  std::vector<Diagnostic>& out_;
  std::unordered_set<const RstNode*> seen_;
};

void canonical(const RstNodePtr& n, std::string& out) {
  switch (n->kind) {
    case RstNode::Kind::kLeaf: {
      const Proposition& p = n->proposition;
      out += "(P ";
      out += p.predicate;
      if (p.negated) out += " !";
      if (!p.action_id.empty()) out += " #" + p.action_id;
      out += " ";
      out += speech_act_name(p.annotation.speech_act);
      for (const auto& [role, inst] : p.participants) out += " " + role + "=" + inst;
      for (const auto& h : p.annotation.hints) out += " +" + h;
      out += ")";
      break;
    }
    case RstNode::Kind::kNucleusSatellite:
      out += "(N ";
      canonical(n->nucleus, out);
      for (const auto& s : n->satellites) {
        out += " ";
        out += relation_name(s.relation);
        out += " ";
        canonical(s.node, out);
      }
      out += ")";
      break;
    case RstNode::Kind::kMultinuclear:
      out += "(M ";
      out += relation_name(n->relation);
      for (const auto& c : n->nuclei) {
        out += " ";
        canonical(c, out);
      }
      out += ")";
      break;
  }
}

void collect(const RstNodePtr& n, std::vector<const Proposition*>& out) {
  if (!n) return;
  switch (n->kind) {
    case RstNode::Kind::kLeaf:
      out.push_back(&n->proposition);
      break;
    case RstNode::Kind::kNucleusSatellite:
      collect(n->nucleus, out);
      for (const auto& s : n->satellites) collect(s.node, out);
      break;
    case RstNode::Kind::kMultinuclear:
      for (const auto& c : n->nuclei) collect(c, out);
      break;
  }
}

}  // namespace

std::vector<Diagnostic> check_tree(const RstNodePtr& root, const KnowledgeBase* kb) {
  std::vector<Diagnostic> out;
  TreeChecker(kb, out).visit(root, "");
  return out;
}

std::vector<Diagnostic> check_schema(const SectionSchema& schema, const KnowledgeBase* kb) {
  std::vector<Diagnostic> out;
  if (!schema.activity) {
    out.push_back({Diagnostic::Severity::kError, "missing-activity", "no activity block",
                   schema.plan_id});
  }
  // One checker across blocks so sharing between blocks is caught too.
  TreeChecker checker(kb, out);
  if (schema.location) checker.visit(schema.location, "location");
  if (schema.replacement) checker.visit(schema.replacement, "replacement");
  if (schema.activity) checker.visit(schema.activity, "activity");
  return out;
}

std::string schema_digest(const SectionSchema& schema) {
  std::string s = "schema " + schema.plan_id;
  for (const auto& [name, node] : {std::pair{"location", schema.location},
                                   std::pair{"replacement", schema.replacement},
                                   std::pair{"activity", schema.activity}}) {
    s += " [";
    s += name;
    if (node) {
      s += " ";
      canonical(node, s);
    }
    s += "]";
  }
  return text::fnv1a_hex(s);
}

std::vector<const Proposition*> propositions(const RstNodePtr& root) {
  std::vector<const Proposition*> out;
  collect(root, out);
  return out;
}

nlohmann::json node_to_json(const RstNodePtr& n) {
  Json j;
  switch (n->kind) {
    case RstNode::Kind::kLeaf: {
      const Proposition& p = n->proposition;
      j["node"] = "proposition";
      j["predicate"] = p.predicate;
      j["participants"] = p.participants;
      if (!p.action_id.empty()) j["action"] = p.action_id;
      if (p.negated) j["negated"] = true;
      j["speech_act"] = std::string(speech_act_name(p.annotation.speech_act));
      j["prominence"] = p.annotation.prominence == Prominence::kMain ? "main" : "aside";
      if (!p.annotation.hints.empty()) {
        j["hints"] = std::vector<std::string>(p.annotation.hints.begin(), p.annotation.hints.end());
      }
      break;
    }
    case RstNode::Kind::kNucleusSatellite: {
      j["node"] = "nucleus-satellite";
      j["nucleus"] = node_to_json(n->nucleus);
      Json sats = Json::array();
      for (const auto& s : n->satellites) {
        sats.push_back({{"relation", std::string(relation_name(s.relation))},
                        {"node", node_to_json(s.node)}});
      }
      j["satellites"] = std::move(sats);
      break;
    }
    case RstNode::Kind::kMultinuclear: {
      j["node"] = "multinuclear";
      j["relation"] = std::string(relation_name(n->relation));
      Json nuclei = Json::array();
      for (const auto& c : n->nuclei) nuclei.push_back(node_to_json(c));
      j["nuclei"] = std::move(nuclei);
      break;
    }
  }
  return j;
}

nlohmann::json schema_to_json(const SectionSchema& schema) {
  Json j;
  j["plan"] = schema.plan_id;
  j["digest"] = schema_digest(schema);
  j["location"] = schema.location ? node_to_json(schema.location) : Json(nullptr);
  j["replacement"] = schema.replacement ? node_to_json(schema.replacement) : Json(nullptr);
  j["activity"] = node_to_json(schema.activity);
  return j;
}

}  // namespace techdoc
