#include "techdoc/kb.hpp"

#include <algorithm>
#include <sstream>

namespace techdoc {

// --- Value ---------------------------------------------------------------

Value Value::instance(std::string id) {
  Value v;
  v.kind = Kind::kInstance;
  v.text = std::move(id);
  return v;
}

Value Value::num(double d) {
  Value v;
  v.kind = Kind::kNumber;
  v.number = d;
  return v;
}

Value Value::str(std::string s) {
  Value v;
  v.kind = Kind::kString;
  v.text = std::move(s);
  return v;
}

Value Value::boolean(bool b) {
  Value v;
  v.kind = Kind::kBoolean;
  v.flag = b;
  return v;
}

Value Value::symbol(std::string s) {
  Value v;
  v.kind = Kind::kEnum;
  v.text = std::move(s);
  return v;
}

std::string Value::to_string() const {
  switch (kind) {
    case Kind::kNumber: {
      std::ostringstream os;
      os << number;
      return os.str();
    }
    case Kind::kBoolean:
      return flag ? "true" : "false";
    default:
      return text;
  }
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::kNumber: return a.number == b.number;
    case Value::Kind::kBoolean: return a.flag == b.flag;
    default: return a.text == b.text;
  }
}

bool operator<(const Value& a, const Value& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  switch (a.kind) {
    case Value::Kind::kNumber: return a.number < b.number;
    case Value::Kind::kBoolean: return a.flag < b.flag;
    default: return a.text < b.text;
  }
}

const std::vector<Value>& Instance::fillers_of(const std::string& role) const {
  static const std::vector<Value> kNone;
  auto it = fillers.find(role);
  return it == fillers.end() ? kNone : it->second;
}

// --- query construction ------------------------------------------------------

Term Term::var(std::string name) {
  Term t;
  if (!name.empty() && name.front() != '?') name.insert(name.begin(), '?');
  t.variable = std::move(name);
  return t;
}

Term Term::of(Value v) {
  Term t;
  t.constant = std::move(v);
  return t;
}

std::string_view compare_op_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
  }
  return "?";
}

std::optional<CompareOp> parse_compare_op(std::string_view s) {
  if (s == "=") return CompareOp::kEq;
  if (s == "!=" || s == "≠") return CompareOp::kNe;
  if (s == "<") return CompareOp::kLt;
  if (s == "<=" || s == "≤") return CompareOp::kLe;
  if (s == ">") return CompareOp::kGt;
  if (s == ">=" || s == "≥") return CompareOp::kGe;
  return std::nullopt;
}

Atom Atom::type(Term x, std::string concept_id) {
  Atom a;
  a.kind = Kind::kType;
  a.subject = std::move(x);
  a.concept_id = std::move(concept_id);
  return a;
}

Atom Atom::filler(Term x, std::string role, Term y) {
  Atom a;
  a.kind = Kind::kFiller;
  a.subject = std::move(x);
  a.role = std::move(role);
  a.object = std::move(y);
  return a;
}

Atom Atom::compare(Term x, std::string role, CompareOp op, double value) {
  Atom a;
  a.kind = Kind::kCompare;
  a.subject = std::move(x);
  a.role = std::move(role);
  a.op = op;
  a.number = value;
  return a;
}

bool Query::is_ground() const { return variables().empty(); }

std::set<std::string> Query::variables() const {
  std::set<std::string> vars;
  for (const auto& a : atoms) {
    if (a.subject.is_variable()) vars.insert(a.subject.variable);
    if (a.kind == Atom::Kind::kFiller && a.object.is_variable()) {
      vars.insert(a.object.variable);
    }
  }
  return vars;
}

Assertion Assertion::type(std::string instance, std::string concept_id) {
  Assertion a;
  a.kind = Kind::kType;
  a.instance = std::move(instance);
  a.concept_id = std::move(concept_id);
  return a;
}

Assertion Assertion::filler(std::string instance, std::string role, Value v) {
  Assertion a;
  a.kind = Kind::kFiller;
  a.instance = std::move(instance);
  a.role = std::move(role);
  a.value = std::move(v);
  return a;
}

Assertion Assertion::retract(std::string instance, std::string role, Value v) {
  Assertion a = filler(std::move(instance), std::move(role), std::move(v));
  a.kind = Kind::kRetract;
  return a;
}

bool StateDelta::empty() const {
  return type_gains.empty() && type_losses.empty() && asserted_gains.empty() &&
         filler_changes.empty() && fired_rules.empty() && events.empty();
}

// --- terminological part -------------------------------------------------------

KnowledgeBase::KnowledgeBase() {
  Concept thing;
  thing.id = kThing;
  concepts_.emplace(thing.id, thing);
  ancestors_[kThing] = {kThing};
  topo_.push_back(kThing);
}

const Concept& KnowledgeBase::concept_def(const std::string& id) const {
  auto it = concepts_.find(id);
  if (it == concepts_.end()) {
    throw Error(ErrorCode::kUnknownConcept, "unknown concept '" + id + "'", id);
  }
  return it->second;
}

const Role& KnowledgeBase::role(const std::string& id) const {
  auto it = roles_.find(id);
  if (it == roles_.end()) {
    throw Error(ErrorCode::kUnknownRole, "unknown role '" + id + "'", id);
  }
  return it->second;
}

const Instance& KnowledgeBase::instance(const std::string& id) const {
  auto it = instances_.find(id);
  if (it == instances_.end()) {
    throw Error(ErrorCode::kUnknownId, "unknown instance '" + id + "'", id);
  }
  return it->second;
}

const std::set<std::string>& KnowledgeBase::ancestors(const std::string& c) const {
  auto it = ancestors_.find(c);
  if (it == ancestors_.end()) {
    throw Error(ErrorCode::kUnknownConcept, "unknown concept '" + c + "'", c);
  }
  return it->second;
}

void KnowledgeBase::define_role(Role r) {
  if (r.id.empty()) throw Error(ErrorCode::kInvalidArgument, "role without id");
  if (roles_.count(r.id)) {
    throw Error(ErrorCode::kDuplicateId, "duplicate role '" + r.id + "'", r.id);
  }
  if (r.domain.empty()) r.domain = kThing;
  if (!has_concept(r.domain)) {
    throw Error(ErrorCode::kUnknownConcept,
                "role '" + r.id + "' has unknown domain '" + r.domain + "'", r.domain);
  }
  if (!r.is_literal()) {
    if (r.range_concept.empty()) r.range_concept = kThing;
    if (!has_concept(r.range_concept)) {
      throw Error(ErrorCode::kUnknownConcept,
                  "role '" + r.id + "' has unknown range '" + r.range_concept + "'",
                  r.range_concept);
    }
  } else if (*r.literal == LiteralType::kEnum && r.enum_values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "enum role '" + r.id + "' has no values", r.id);
  }
  roles_.emplace(r.id, std::move(r));
}

void KnowledgeBase::check_filler(const std::string& role_id, const Value& v) const {
  const Role& r = role(role_id);
  auto violation = [&](const std::string& why) {
    return Error(ErrorCode::kRangeViolation,
                 "value '" + v.to_string() + "' violates range of role '" + role_id +
                     "': " + why,
                 role_id);
  };
  if (!r.is_literal()) {
    if (!v.is_instance()) throw violation("expected an instance");
    return;
  }
  switch (*r.literal) {
    case LiteralType::kNumber:
      if (v.kind != Value::Kind::kNumber) throw violation("expected a number");
      break;
    case LiteralType::kString:
      if (v.kind != Value::Kind::kString) throw violation("expected a string");
      break;
    case LiteralType::kBoolean:
      if (v.kind != Value::Kind::kBoolean) throw violation("expected a boolean");
      break;
    case LiteralType::kEnum:
      if (v.kind != Value::Kind::kEnum) throw violation("expected an enum symbol");
      if (std::find(r.enum_values.begin(), r.enum_values.end(), v.text) ==
          r.enum_values.end()) {
        throw violation("not one of the declared symbols");
      }
      break;
  }
}

const std::string& KnowledgeBase::define_concept(Concept c) {
  if (c.id.empty()) throw Error(ErrorCode::kInvalidArgument, "concept without id");
  if (concepts_.count(c.id)) {
    throw Error(ErrorCode::kDuplicateId, "duplicate concept '" + c.id + "'", c.id);
  }
  if (c.parents.empty()) c.parents.insert(kThing);
  if (c.parents.count(c.id)) {
    throw Error(ErrorCode::kCycle, "concept '" + c.id + "' is its own parent", c.id);
  }
  for (const auto& p : c.parents) {
    if (!has_concept(p)) {
      throw Error(ErrorCode::kUnknownParent,
                  "concept '" + c.id + "' has unknown parent '" + p + "'", p);
    }
  }
  for (const auto& r : c.restrictions) {
    if (!has_role(r.role)) {
      throw Error(ErrorCode::kUnknownRole,
                  "concept '" + c.id + "' restricts unknown role '" + r.role + "'", r.role);
    }
    switch (r.kind) {
      case RestrictionKind::kAll:
        if (!has_concept(r.concept_id)) {
          throw Error(ErrorCode::kUnknownConcept,
                      "value restriction on '" + r.role + "' names unknown concept '" +
                          r.concept_id + "'",
                      r.concept_id);
        }
        break;
      case RestrictionKind::kFiller:
        check_filler(r.role, r.filler);
        break;
      case RestrictionKind::kCard:
        if (r.max && *r.max < r.min) {
          throw Error(ErrorCode::kInvalidArgument,
                      "cardinality min > max on role '" + r.role + "'", c.id);
        }
        break;
    }
  }
  std::set<std::string> anc{c.id};
  for (const auto& p : c.parents) {
    const auto& pa = ancestors_.at(p);
    anc.insert(pa.begin(), pa.end());
  }
  ancestors_[c.id] = std::move(anc);
  topo_.push_back(c.id);
  auto [it, _] = concepts_.emplace(c.id, std::move(c));
  return it->first;
}

std::vector<RoleRestriction> KnowledgeBase::effective_restrictions(
    const std::string& c) const {
  std::vector<RoleRestriction> out;
  for (const auto& a : ancestors(c)) {
    const auto& rs = concepts_.at(a).restrictions;
    out.insert(out.end(), rs.begin(), rs.end());
  }
  return out;
}

bool KnowledgeBase::subsumes(const std::string& general,
                             const std::string& specific) const {
  concept_def(general);
  concept_def(specific);
  std::set<std::pair<std::string, std::string>> visiting;
  return subsumes_impl(general, specific, visiting);
}

bool KnowledgeBase::subsumes_impl(
    const std::string& general, const std::string& specific,
    std::set<std::pair<std::string, std::string>>& visiting) const {
  if (ancestors_.at(specific).count(general)) return true;
  const Concept& g = concepts_.at(general);
  if (g.primitive) return false;
  auto key = std::make_pair(general, specific);
  if (!visiting.insert(key).second) return false;
  bool result = true;
  for (const auto& p : g.parents) {
    if (!subsumes_impl(p, specific, visiting)) {
      result = false;
      break;
    }
  }
  if (result) {
    for (const auto& r : g.restrictions) {
      if (!entails(specific, r, visiting)) {
        result = false;
        break;
      }
    }
  }
  visiting.erase(key);
  return result;
}

// Does every member of `specific` satisfy restriction `r`, judging only by
// the definitions?
bool KnowledgeBase::entails(
    const std::string& specific, const RoleRestriction& r,
    std::set<std::pair<std::string, std::string>>& visiting) const {
  auto rs = effective_restrictions(specific);
  std::size_t lo = 0;
  std::optional<std::size_t> hi;
  if (roles_.at(r.role).functional) hi = 1;
  std::set<Value> fillers;
  for (const auto& s : rs) {
    if (s.role != r.role) continue;
    if (s.kind == RestrictionKind::kCard) {
      lo = std::max(lo, s.min);
      if (s.max) hi = hi ? std::min(*hi, *s.max) : *s.max;
    } else if (s.kind == RestrictionKind::kFiller) {
      fillers.insert(s.filler);
    }
  }
  lo = std::max(lo, fillers.size());
  switch (r.kind) {
    case RestrictionKind::kAll:
      if (hi && *hi == 0) return true;
      for (const auto& s : rs) {
        if (s.role == r.role && s.kind == RestrictionKind::kAll &&
            subsumes_impl(r.concept_id, s.concept_id, visiting)) {
          return true;
        }
      }
      return false;
    case RestrictionKind::kFiller:
      return fillers.count(r.filler) > 0;
    case RestrictionKind::kCard:
      if (lo < r.min) return false;
      if (!r.max) return true;
      return hi && *hi <= *r.max;
  }
  return false;
}

// --- classification ----------------------------------------------------------

std::set<std::string> KnowledgeBase::upward_closure(
    const std::set<std::string>& types) const {
  std::set<std::string> out;
  for (const auto& t : types) {
    const auto& a = ancestors_.at(t);
    out.insert(a.begin(), a.end());
  }
  out.insert(kThing);
  return out;
}

bool KnowledgeBase::satisfies(
    const Instance& inst, const RoleRestriction& r,
    const std::map<std::string, std::set<std::string>>& types) const {
  const auto& vals = inst.fillers_of(r.role);
  switch (r.kind) {
    case RestrictionKind::kAll:
      for (const auto& v : vals) {
        if (!v.is_instance()) return false;
        auto it = types.find(v.text);
        if (it == types.end() || !it->second.count(r.concept_id)) return false;
      }
      return true;
    case RestrictionKind::kFiller:
      return std::find(vals.begin(), vals.end(), r.filler) != vals.end();
    case RestrictionKind::kCard:
      if (vals.size() < r.min) return false;
      return !r.max || vals.size() <= *r.max;
  }
  return false;
}

void KnowledgeBase::reclassify_all() {
  std::map<std::string, std::set<std::string>> types;
  for (const auto& [id, inst] : instances_) {
    types[id] = upward_closure(inst.asserted_types);
  }
  std::vector<const Concept*> defined;
  for (const auto& id : topo_) {
    const Concept& c = concepts_.at(id);
    if (!c.primitive) defined.push_back(&c);
  }
  // Value restrictions look at the fillers' types, so iterate to a fixpoint.
  // Membership only grows, which bounds the number of rounds.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [id, inst] : instances_) {
      auto& mine = types[id];
      for (const Concept* c : defined) {
        if (mine.count(c->id)) continue;
        bool ok = std::all_of(c->parents.begin(), c->parents.end(),
                              [&](const std::string& p) { return mine.count(p) > 0; });
        if (!ok) continue;
        for (const auto& r : c->restrictions) {
          if (!satisfies(inst, r, types)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          mine.insert(c->id);
          changed = true;
        }
      }
    }
  }
  for (auto& [id, inst] : instances_) inst.derived_types = std::move(types[id]);
}

std::set<std::string> KnowledgeBase::classify(const std::string& id) {
  instance(id);
  reclassify_all();
  return most_specific_types(id);
}

std::set<std::string> KnowledgeBase::most_specific_types(const std::string& id) const {
  const auto& derived = instance(id).derived_types;
  std::set<std::string> out;
  for (const auto& c : derived) {
    bool minimal = true;
    for (const auto& d : derived) {
      if (d == c) continue;
      if (subsumes(c, d) && !subsumes(d, c)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.insert(c);
  }
  return out;
}

bool KnowledgeBase::is_a(const std::string& inst, const std::string& c) const {
  auto it = instances_.find(inst);
  return it != instances_.end() && it->second.derived_types.count(c) > 0;
}

// --- assertional part -----------------------------------------------------------

const std::string& KnowledgeBase::create_instance(
    const std::string& id, const std::set<std::string>& types,
    const std::map<std::string, std::vector<Value>>& fillers) {
  Instance inst;
  inst.id = id;
  inst.asserted_types = types;
  inst.fillers = fillers;
  bulk_insert({std::move(inst)});
  return instances_.find(id)->first;
}

void KnowledgeBase::bulk_insert(std::vector<Instance> batch) {
  std::set<std::string> batch_ids;
  for (auto& inst : batch) {
    if (inst.id.empty()) throw Error(ErrorCode::kInvalidArgument, "instance without id");
    if (instances_.count(inst.id) || !batch_ids.insert(inst.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate instance '" + inst.id + "'", inst.id);
    }
    if (inst.asserted_types.empty()) inst.asserted_types.insert(kThing);
    for (const auto& t : inst.asserted_types) {
      if (!has_concept(t)) {
        throw Error(ErrorCode::kUnknownConcept,
                    "instance '" + inst.id + "' has unknown type '" + t + "'", t);
      }
    }
  }
  for (auto& inst : batch) {
    for (auto& [role_id, vals] : inst.fillers) {
      const Role& r = role(role_id);
      for (const auto& v : vals) {
        check_filler(role_id, v);
        if (v.is_instance() && !instances_.count(v.text) && !batch_ids.count(v.text)) {
          throw Error(ErrorCode::kUnknownId,
                      "instance '" + inst.id + "' refers to unknown instance '" + v.text + "'",
                      v.text);
        }
      }
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      if (r.functional && vals.size() > 1) {
        throw Error(ErrorCode::kRangeViolation,
                    "functional role '" + role_id + "' has several fillers on '" +
                        inst.id + "'",
                    inst.id);
      }
    }
  }
  auto before = instances_;
  for (auto& inst : batch) {
    std::string id = inst.id;
    instances_.emplace(std::move(id), std::move(inst));
  }
  reclassify_all();
  for (const auto& id : batch_ids) {
    const Instance& inst = instances_.at(id);
    for (const auto& [role_id, vals] : inst.fillers) {
      const Role& r = roles_.at(role_id);
      if (r.is_literal()) continue;
      for (const auto& v : vals) {
        if (!is_a(v.text, r.range_concept)) {
          Error err(ErrorCode::kRangeViolation,
                    "filler '" + v.text + "' of role '" + role_id + "' on '" + id +
                        "' is not a " + r.range_concept,
                    v.text);
          instances_ = std::move(before);
          throw err;
        }
      }
    }
  }
}

// Returns true if the KB changed.
bool KnowledgeBase::apply_assertion(const Assertion& a) {
  auto it = instances_.find(a.instance);
  if (it == instances_.end()) {
    throw Error(ErrorCode::kUnknownId, "unknown instance '" + a.instance + "'", a.instance);
  }
  Instance& inst = it->second;
  switch (a.kind) {
    case Assertion::Kind::kType:
      concept_def(a.concept_id);
      return inst.asserted_types.insert(a.concept_id).second;
    case Assertion::Kind::kFiller: {
      const Role& r = role(a.role);
      check_filler(a.role, a.value);
      if (a.value.is_instance() && !is_a(a.value.text, r.range_concept)) {
        if (!has_instance(a.value.text)) {
          throw Error(ErrorCode::kUnknownId, "unknown instance '" + a.value.text + "'",
                      a.value.text);
        }
        throw Error(ErrorCode::kRangeViolation,
                    "filler '" + a.value.text + "' of role '" + a.role + "' is not a " +
                        r.range_concept,
                    a.value.text);
      }
      auto& vals = inst.fillers[a.role];
      if (r.functional) {
        if (vals.size() == 1 && vals.front() == a.value) return false;
        vals.assign(1, a.value);
        return true;
      }
      auto pos = std::lower_bound(vals.begin(), vals.end(), a.value);
      if (pos != vals.end() && *pos == a.value) return false;
      vals.insert(pos, a.value);
      return true;
    }
    case Assertion::Kind::kRetract: {
      role(a.role);
      auto fit = inst.fillers.find(a.role);
      if (fit == inst.fillers.end()) return false;
      auto& vals = fit->second;
      auto pos = std::find(vals.begin(), vals.end(), a.value);
      if (pos == vals.end()) return false;
      vals.erase(pos);
      if (vals.empty()) inst.fillers.erase(fit);
      return true;
    }
  }
  return false;
}

StateDelta KnowledgeBase::tell(const Assertion& a) { return tell(std::vector<Assertion>{a}); }

StateDelta KnowledgeBase::tell(const std::vector<Assertion>& batch) {
  auto before = instances_;
  try {
    for (const auto& a : batch) {
      if (apply_assertion(a)) reclassify_all();
    }
    StateDelta rule_part;
    run_rules(rule_part);
    StateDelta delta = diff(before);
    delta.fired_rules = std::move(rule_part.fired_rules);
    delta.events = std::move(rule_part.events);
    return delta;
  } catch (...) {
    instances_ = std::move(before);
    throw;
  }
}

namespace {

std::string binding_key(const Binding& b) {
  std::string key;
  for (const auto& [var, val] : b) {
    key += var;
    key += '=';
    key += val.to_string();
    key += ';';
  }
  return key;
}

}  // namespace

void KnowledgeBase::run_rules(StateDelta& delta) {
  if (rules_.empty()) return;
  std::set<std::pair<std::string, std::string>> emitted;
  for (std::size_t round = 0;; ++round) {
    bool fired_any = false;
    for (const Rule& rule : rules_) {
      AskResult matches = ask(rule.condition);
      if (!matches.holds) continue;
      bool rule_fired = false;
      for (const Binding& b : matches.bindings) {
        bool changed = false;
        for (const RuleAction& act : rule.actions) {
          switch (act.kind) {
            case RuleAction::Kind::kAssertFiller:
              changed |= apply_assertion(Assertion::filler(resolve(act.subject, b).text,
                                                           act.role, resolve(act.object, b)));
              break;
            case RuleAction::Kind::kRetractFiller:
              changed |= apply_assertion(Assertion::retract(resolve(act.subject, b).text,
                                                            act.role, resolve(act.object, b)));
              break;
            case RuleAction::Kind::kAssertType:
              changed |= apply_assertion(
                  Assertion::type(resolve(act.subject, b).text, act.concept_id));
              break;
            case RuleAction::Kind::kEmit: {
              if (!emitted.emplace(rule.id, binding_key(b) + act.event).second) break;
              Event ev;
              ev.rule = rule.id;
              ev.name = act.event;
              for (const auto& t : act.args) ev.args.push_back(resolve(t, b));
              delta.events.push_back(std::move(ev));
              changed = true;
              break;
            }
          }
        }
        if (changed) {
          rule_fired = true;
          reclassify_all();
        }
      }
      if (rule_fired) {
        fired_any = true;
        if (std::find(delta.fired_rules.begin(), delta.fired_rules.end(), rule.id) ==
            delta.fired_rules.end()) {
          delta.fired_rules.push_back(rule.id);
        }
      }
    }
    if (!fired_any) return;
    if (round + 1 >= rule_round_cap_) {
      throw Error(ErrorCode::kRuleLoop,
                  "rules did not reach a fixpoint within " + std::to_string(rule_round_cap_) +
                      " rounds",
                  delta.fired_rules.empty() ? std::string() : delta.fired_rules.back());
    }
  }
}

StateDelta KnowledgeBase::diff(const std::map<std::string, Instance>& before) const {
  StateDelta d;
  for (const auto& [id, now] : instances_) {
    auto it = before.find(id);
    if (it == before.end()) continue;
    const Instance& old = it->second;
    for (const auto& t : now.derived_types) {
      if (!old.derived_types.count(t)) d.type_gains.push_back({id, t});
    }
    for (const auto& t : old.derived_types) {
      if (!now.derived_types.count(t)) d.type_losses.push_back({id, t});
    }
    for (const auto& t : now.asserted_types) {
      if (!old.asserted_types.count(t)) d.asserted_gains.push_back({id, t});
    }
    std::set<std::string> role_ids;
    for (const auto& [r, _] : now.fillers) role_ids.insert(r);
    for (const auto& [r, _] : old.fillers) role_ids.insert(r);
    for (const auto& r : role_ids) {
      const auto& a = old.fillers_of(r);
      const auto& b = now.fillers_of(r);
      if (a != b) d.filler_changes.push_back({id, r, a, b});
    }
  }
  return d;
}

void KnowledgeBase::apply(const StateDelta& delta) {
  for (const auto& fc : delta.filler_changes) {
    Instance& inst = instances_.at(fc.instance);
    if (fc.after.empty()) inst.fillers.erase(fc.role);
    else inst.fillers[fc.role] = fc.after;
  }
  for (const auto& g : delta.asserted_gains) {
    instances_.at(g.instance).asserted_types.insert(g.concept_id);
  }
  for (const auto& g : delta.type_gains) {
    instances_.at(g.instance).derived_types.insert(g.concept_id);
  }
  for (const auto& l : delta.type_losses) {
    instances_.at(l.instance).derived_types.erase(l.concept_id);
  }
}

void KnowledgeBase::apply_inverse(const StateDelta& delta) {
  for (const auto& fc : delta.filler_changes) {
    Instance& inst = instances_.at(fc.instance);
    if (fc.before.empty()) inst.fillers.erase(fc.role);
    else inst.fillers[fc.role] = fc.before;
  }
  for (const auto& g : delta.asserted_gains) {
    instances_.at(g.instance).asserted_types.erase(g.concept_id);
  }
  for (const auto& g : delta.type_gains) {
    instances_.at(g.instance).derived_types.erase(g.concept_id);
  }
  for (const auto& l : delta.type_losses) {
    instances_.at(l.instance).derived_types.insert(l.concept_id);
  }
}

void KnowledgeBase::add_rule(Rule rule) {
  if (rule.id.empty()) throw Error(ErrorCode::kInvalidArgument, "rule without id");
  for (const auto& r : rules_) {
    if (r.id == rule.id) {
      throw Error(ErrorCode::kDuplicateId, "duplicate rule '" + rule.id + "'", rule.id);
    }
  }
  validate_query(rule.condition);
  auto bound = rule.condition.variables();
  auto check_term = [&](const Term& t) {
    if (t.is_variable() && !bound.count(t.variable)) {
      throw Error(ErrorCode::kMalformedQuery,
                  "rule '" + rule.id + "' uses unbound variable " + t.variable, rule.id);
    }
  };
  for (const auto& a : rule.actions) {
    check_term(a.subject);
    if (a.kind == RuleAction::Kind::kAssertFiller || a.kind == RuleAction::Kind::kRetractFiller) {
      role(a.role);
      check_term(a.object);
      if (!a.object.is_variable()) check_filler(a.role, a.object.constant);
    }
    if (a.kind == RuleAction::Kind::kAssertType) concept_def(a.concept_id);
    for (const auto& t : a.args) check_term(t);
  }
  rules_.push_back(std::move(rule));
}

// --- ASK -----------------------------------------------------------------------

void KnowledgeBase::validate_query(const Query& q) const {
  if (q.atoms.empty()) throw Error(ErrorCode::kMalformedQuery, "empty query");
  for (const auto& a : q.atoms) {
    if (!a.subject.is_variable() && !a.subject.constant.is_instance()) {
      throw Error(ErrorCode::kMalformedQuery, "atom subject must be an instance or variable");
    }
    switch (a.kind) {
      case Atom::Kind::kType:
        concept_def(a.concept_id);
        break;
      case Atom::Kind::kFiller:
        role(a.role);
        if (!a.object.is_variable()) check_filler(a.role, a.object.constant);
        break;
      case Atom::Kind::kCompare: {
        const Role& r = role(a.role);
        if (!r.is_literal() || *r.literal != LiteralType::kNumber) {
          throw Error(ErrorCode::kMalformedQuery,
                      "comparison on non-numeric role '" + a.role + "'", a.role);
        }
        break;
      }
    }
  }
}

Value KnowledgeBase::resolve(const Term& t, const Binding& b) const {
  if (!t.is_variable()) return t.constant;
  auto it = b.find(t.variable);
  if (it == b.end()) {
    throw Error(ErrorCode::kMalformedQuery, "unbound variable " + t.variable);
  }
  return it->second;
}

namespace {

bool compare_number(double lhs, CompareOp op, double rhs) {
  switch (op) {
    case CompareOp::kEq: return lhs == rhs;
    case CompareOp::kNe: return lhs != rhs;
    case CompareOp::kLt: return lhs < rhs;
    case CompareOp::kLe: return lhs <= rhs;
    case CompareOp::kGt: return lhs > rhs;
    case CompareOp::kGe: return lhs >= rhs;
  }
  return false;
}

}  // namespace

bool KnowledgeBase::atom_holds(const Atom& atom, const Binding& b) const {
  Value subject = resolve(atom.subject, b);
  auto it = instances_.find(subject.text);
  if (!subject.is_instance() || it == instances_.end()) return false;
  const Instance& inst = it->second;
  switch (atom.kind) {
    case Atom::Kind::kType:
      return inst.derived_types.count(atom.concept_id) > 0;
    case Atom::Kind::kFiller: {
      const auto& vals = inst.fillers_of(atom.role);
      return std::find(vals.begin(), vals.end(), resolve(atom.object, b)) != vals.end();
    }
    case Atom::Kind::kCompare:
      for (const auto& v : inst.fillers_of(atom.role)) {
        if (v.kind == Value::Kind::kNumber && compare_number(v.number, atom.op, atom.number)) {
          return true;
        }
      }
      return false;
  }
  return false;
}

void KnowledgeBase::match(const Query& q, std::size_t index, Binding& b,
                          std::vector<Binding>& out) const {
  if (index == q.atoms.size()) {
    out.push_back(b);
    return;
  }
  const Atom& atom = q.atoms[index];
  bool subject_free = atom.subject.is_variable() && !b.count(atom.subject.variable);
  bool object_free = atom.kind == Atom::Kind::kFiller && atom.object.is_variable() &&
                     !b.count(atom.object.variable);
  if (!subject_free && !object_free) {
    if (atom_holds(atom, b)) match(q, index + 1, b, out);
    return;
  }
  auto try_subject = [&](const Instance& inst) {
    if (subject_free) b[atom.subject.variable] = Value::instance(inst.id);
    if (object_free) {
      for (const auto& v : inst.fillers_of(atom.role)) {
        b[atom.object.variable] = v;
        match(q, index + 1, b, out);
      }
      b.erase(atom.object.variable);
    } else if (atom_holds(atom, b)) {
      match(q, index + 1, b, out);
    }
    if (subject_free) b.erase(atom.subject.variable);
  };
  if (subject_free) {
    for (const auto& [id, inst] : instances_) try_subject(inst);
  } else {
    Value s = resolve(atom.subject, b);
    auto it = instances_.find(s.text);
    if (s.is_instance() && it != instances_.end()) try_subject(it->second);
  }
}

AskResult KnowledgeBase::ask(const Query& q) const {
  validate_query(q);
  AskResult result;
  Binding b;
  std::vector<Binding> out;
  match(q, 0, b, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  result.holds = !out.empty();
  result.bindings = std::move(out);
  return result;
}

Truth KnowledgeBase::evaluate_known(const Query& q) const {
  validate_query(q);
  if (!q.is_ground()) {
    return ask(q).holds ? Truth::kTrue : Truth::kUnknown;
  }
  bool unknown = false;
  for (const auto& atom : q.atoms) {
    Binding none;
    if (atom_holds(atom, none)) continue;
    auto it = instances_.find(atom.subject.constant.text);
    if (it == instances_.end()) return Truth::kFalse;
    const Instance& inst = it->second;
    switch (atom.kind) {
      case Atom::Kind::kFiller:
      case Atom::Kind::kCompare:
        if (inst.fillers_of(atom.role).empty()) {
          unknown = true;
          continue;
        }
        return Truth::kFalse;
      case Atom::Kind::kType: {
        // Missing asserted (primitive) membership is known; a defined concept_id
        // whose discriminating roles have no data at all is not.
        bool role_missing = false;
        for (const auto& anc : ancestors(atom.concept_id)) {
          const Concept& c = concepts_.at(anc);
          if (c.primitive) {
            if (!inst.derived_types.count(anc)) return Truth::kFalse;
            continue;
          }
          for (const auto& r : c.restrictions) {
            bool discriminating = r.kind == RestrictionKind::kFiller ||
                                  (r.kind == RestrictionKind::kCard && r.min > 0);
            if (discriminating && inst.fillers_of(r.role).empty()) role_missing = true;
          }
        }
        if (!role_missing) return Truth::kFalse;
        unknown = true;
        continue;
      }
    }
  }
  return unknown ? Truth::kUnknown : Truth::kTrue;
}

}  // namespace techdoc
