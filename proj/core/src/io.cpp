#include "techdoc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace techdoc {

namespace {

Error schema_error(const std::string& where, const std::string& what) {
  return Error(ErrorCode::kParseError, where + ": " + what, where);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw schema_error(where, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::string string_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_string()) throw schema_error(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string optional_string(const Json& j, const char* key) {
  if (j.is_object() && j.contains(key) && j.at(key).is_string()) return j.at(key).get<std::string>();
  return {};
}

std::vector<std::string> string_list(const Json& j, const char* key, const std::string& where) {
  std::vector<std::string> out;
  if (!j.is_object() || !j.contains(key)) return out;
  const Json& arr = j.at(key);
  if (!arr.is_array()) throw schema_error(where, std::string("field '") + key + "' must be an array");
  for (const auto& e : arr) {
    if (!e.is_string()) throw schema_error(where, std::string("'") + key + "' entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

const Json& array_field(const Json& doc, const char* key) {
  static const Json kEmpty = Json::array();
  if (!doc.is_object() || !doc.contains(key)) return kEmpty;
  const Json& arr = doc.at(key);
  if (!arr.is_array()) throw schema_error(key, "top-level field must be an array");
  return arr;
}

Term term_from_json(const Json& j, const Role* role, const std::string& where) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (!s.empty() && s.front() == '?') return Term::var(s);
    if (!role) return Term::of(Value::instance(s));
  } else if (!role) {
    throw schema_error(where, "atom subject must be an instance id or variable");
  }
  return Term::of(value_from_json(j, *role));
}

Json term_to_json(const Term& t) {
  if (t.is_variable()) return t.variable;
  return value_to_json(t.constant);
}

Atom atom_from_json(const Json& j, const KnowledgeBase& kb) {
  if (!j.is_object() || j.size() != 1) {
    throw Error(ErrorCode::kMalformedQuery, "atom must be an object with one key");
  }
  const auto& [key, args] = *j.items().begin();
  if (!args.is_array()) throw Error(ErrorCode::kMalformedQuery, "atom arguments must be an array");
  if (key == "type") {
    if (args.size() != 2 || !args[1].is_string()) {
      throw Error(ErrorCode::kMalformedQuery, "type atom takes [x, concept]");
    }
    return Atom::type(term_from_json(args[0], nullptr, "type atom"), args[1].get<std::string>());
  }
  if (key == "filler") {
    if (args.size() != 3 || !args[1].is_string()) {
      throw Error(ErrorCode::kMalformedQuery, "filler atom takes [x, role, y]");
    }
    std::string role_id = args[1].get<std::string>();
    const Role& r = kb.role(role_id);
    return Atom::filler(term_from_json(args[0], nullptr, "filler atom"), role_id,
                        term_from_json(args[2], &r, "filler atom"));
  }
  if (key == "compare") {
    if (args.size() != 4 || !args[1].is_string() || !args[2].is_string() || !args[3].is_number()) {
      throw Error(ErrorCode::kMalformedQuery, "compare atom takes [x, role, op, number]");
    }
    auto op = parse_compare_op(args[2].get<std::string>());
    if (!op) throw Error(ErrorCode::kMalformedQuery, "unknown comparison operator");
    return Atom::compare(term_from_json(args[0], nullptr, "compare atom"),
                         args[1].get<std::string>(), *op, args[3].get<double>());
  }
  throw Error(ErrorCode::kMalformedQuery, "unknown atom kind '" + key + "'");
}

Json number_json(double d) {
  if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) < 9e15) {
    return static_cast<long long>(d);
  }
  return d;
}

std::string literal_name(LiteralType t) {
  switch (t) {
    case LiteralType::kNumber: return "number";
    case LiteralType::kString: return "string";
    case LiteralType::kBoolean: return "boolean";
    case LiteralType::kEnum: return "enum";
  }
  return "?";
}

std::optional<LiteralType> literal_from_name(const std::string& s) {
  if (s == "number") return LiteralType::kNumber;
  if (s == "string") return LiteralType::kString;
  if (s == "boolean") return LiteralType::kBoolean;
  if (s == "enum") return LiteralType::kEnum;
  return std::nullopt;
}

Role role_from_json(const Json& j) {
  Role r;
  r.id = string_field(j, "id", "role");
  std::string where = "role '" + r.id + "'";
  r.domain = optional_string(j, "domain");
  std::string range = optional_string(j, "range");
  if (auto lit = literal_from_name(range)) {
    r.literal = lit;
    r.enum_values = string_list(j, "values", where);
  } else {
    r.range_concept = range;
  }
  if (j.contains("functional")) r.functional = j.at("functional").get<bool>();
  return r;
}

Json role_to_json(const Role& r) {
  Json j;
  j["id"] = r.id;
  j["domain"] = r.domain;
  j["range"] = r.is_literal() ? literal_name(*r.literal) : r.range_concept;
  if (r.is_literal() && *r.literal == LiteralType::kEnum) j["values"] = r.enum_values;
  if (r.functional) j["functional"] = true;
  return j;
}

Concept concept_from_json(const Json& j, const KnowledgeBase& kb) {
  Concept c;
  c.id = string_field(j, "id", "concept");
  std::string where = "concept '" + c.id + "'";
  for (auto& p : string_list(j, "parents", where)) c.parents.insert(p);
  if (j.contains("primitive")) c.primitive = j.at("primitive").get<bool>();
  if (j.contains("restrictions")) {
    for (const auto& rj : j.at("restrictions")) {
      RoleRestriction r;
      r.role = string_field(rj, "role", where);
      std::string kind = string_field(rj, "kind", where);
      if (kind == "all") {
        r.kind = RestrictionKind::kAll;
        r.concept_id = string_field(rj, "concept", where);
      } else if (kind == "filler") {
        r.kind = RestrictionKind::kFiller;
        r.filler = value_from_json(field(rj, "value", where), kb.role(r.role));
      } else if (kind == "card") {
        r.kind = RestrictionKind::kCard;
        r.min = rj.value("min", 0);
        if (rj.contains("max") && !rj.at("max").is_null()) r.max = rj.at("max").get<std::size_t>();
      } else {
        throw schema_error(where, "unknown restriction kind '" + kind + "'");
      }
      c.restrictions.push_back(std::move(r));
    }
  }
  return c;
}

Json concept_to_json(const Concept& c) {
  Json j;
  j["id"] = c.id;
  j["parents"] = std::vector<std::string>(c.parents.begin(), c.parents.end());
  j["primitive"] = c.primitive;
  Json rs = Json::array();
  for (const auto& r : c.restrictions) {
    Json rj;
    rj["role"] = r.role;
    switch (r.kind) {
      case RestrictionKind::kAll:
        rj["kind"] = "all";
        rj["concept"] = r.concept_id;
        break;
      case RestrictionKind::kFiller:
        rj["kind"] = "filler";
        rj["value"] = value_to_json(r.filler);
        break;
      case RestrictionKind::kCard:
        rj["kind"] = "card";
        rj["min"] = r.min;
        rj["max"] = r.max ? Json(*r.max) : Json(nullptr);
        break;
    }
    rs.push_back(std::move(rj));
  }
  j["restrictions"] = std::move(rs);
  return j;
}

Instance instance_from_json(const Json& j, const KnowledgeBase& kb) {
  Instance inst;
  inst.id = string_field(j, "id", "instance");
  std::string where = "instance '" + inst.id + "'";
  for (auto& t : string_list(j, "types", where)) inst.asserted_types.insert(t);
  if (j.contains("fillers")) {
    for (const auto& [role_id, vals] : j.at("fillers").items()) {
      const Role& r = kb.role(role_id);
      auto& out = inst.fillers[role_id];
      if (vals.is_array()) {
        for (const auto& v : vals) out.push_back(value_from_json(v, r));
      } else {
        out.push_back(value_from_json(vals, r));
      }
    }
  }
  return inst;
}

Json instance_to_json(const Instance& inst) {
  Json j;
  j["id"] = inst.id;
  j["types"] = std::vector<std::string>(inst.asserted_types.begin(), inst.asserted_types.end());
  Json fillers = Json::object();
  for (const auto& [role, vals] : inst.fillers) {
    Json arr = Json::array();
    for (const auto& v : vals) arr.push_back(value_to_json(v));
    fillers[role] = std::move(arr);
  }
  j["fillers"] = std::move(fillers);
  return j;
}

Rule rule_from_json(const Json& j, const KnowledgeBase& kb) {
  Rule r;
  r.id = string_field(j, "id", "rule");
  std::string where = "rule '" + r.id + "'";
  r.condition = query_from_json(field(j, "if", where), kb);
  for (const auto& aj : field(j, "then", where)) {
    if (!aj.is_object() || aj.size() != 1) throw schema_error(where, "rule action must have one key");
    const auto& [key, args] = *aj.items().begin();
    RuleAction a;
    if (key == "assert-filler" || key == "retract-filler") {
      a.kind = key == "assert-filler" ? RuleAction::Kind::kAssertFiller
                                      : RuleAction::Kind::kRetractFiller;
      if (args.size() != 3) throw schema_error(where, key + " takes [x, role, y]");
      a.subject = term_from_json(args[0], nullptr, where);
      a.role = args[1].get<std::string>();
      a.object = term_from_json(args[2], &kb.role(a.role), where);
    } else if (key == "assert-type") {
      a.kind = RuleAction::Kind::kAssertType;
      if (args.size() != 2) throw schema_error(where, "assert-type takes [x, concept]");
      a.subject = term_from_json(args[0], nullptr, where);
      a.concept_id = args[1].get<std::string>();
    } else if (key == "emit") {
      a.kind = RuleAction::Kind::kEmit;
      if (args.empty()) throw schema_error(where, "emit takes [event, args...]");
      a.event = args[0].get<std::string>();
      for (std::size_t i = 1; i < args.size(); ++i) {
        a.args.push_back(term_from_json(args[i], nullptr, where));
      }
    } else {
      throw schema_error(where, "unknown rule action '" + key + "'");
    }
    r.actions.push_back(std::move(a));
  }
  return r;
}

Json rule_to_json(const Rule& r) {
  Json j;
  j["id"] = r.id;
  j["if"] = query_to_json(r.condition);
  Json then = Json::array();
  for (const auto& a : r.actions) {
    switch (a.kind) {
      case RuleAction::Kind::kAssertFiller:
        then.push_back({{"assert-filler", {term_to_json(a.subject), a.role, term_to_json(a.object)}}});
        break;
      case RuleAction::Kind::kRetractFiller:
        then.push_back({{"retract-filler", {term_to_json(a.subject), a.role, term_to_json(a.object)}}});
        break;
      case RuleAction::Kind::kAssertType:
        then.push_back({{"assert-type", {term_to_json(a.subject), a.concept_id}}});
        break;
      case RuleAction::Kind::kEmit: {
        Json args = Json::array({a.event});
        for (const auto& t : a.args) args.push_back(term_to_json(t));
        then.push_back({{"emit", args}});
        break;
      }
    }
  }
  j["then"] = std::move(then);
  return j;
}

// Defines roles and concepts in whatever order their dependencies allow.
void define_terminology(KnowledgeBase& kb, std::vector<Json> roles, std::vector<Json> concepts) {
  while (!roles.empty() || !concepts.empty()) {
    bool progress = false;
    for (auto it = roles.begin(); it != roles.end();) {
      Role r = role_from_json(*it);
      bool ready = (r.domain.empty() || kb.has_concept(r.domain)) &&
                   (r.is_literal() || r.range_concept.empty() || kb.has_concept(r.range_concept));
      if (ready) {
        kb.define_role(std::move(r));
        it = roles.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
    for (auto it = concepts.begin(); it != concepts.end();) {
      const Json& cj = *it;
      bool ready = true;
      for (const auto& p : string_list(cj, "parents", "concept")) ready &= kb.has_concept(p);
      if (cj.contains("restrictions")) {
        for (const auto& rj : cj.at("restrictions")) {
          ready &= kb.has_role(rj.value("role", ""));
          if (rj.value("kind", "") == "all") ready &= kb.has_concept(rj.value("concept", ""));
        }
      }
      if (ready) {
        kb.define_concept(concept_from_json(cj, kb));
        it = concepts.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
    if (progress) continue;
    // Nothing can be defined: report the first dangling reference.
    if (!concepts.empty()) {
      const Json& cj = concepts.front();
      std::string id = cj.value("id", "?");
      for (const auto& p : string_list(cj, "parents", "concept")) {
        if (!kb.has_concept(p)) {
          bool pending = std::any_of(concepts.begin(), concepts.end(),
                                     [&](const Json& o) { return o.value("id", "") == p; });
          throw Error(pending ? ErrorCode::kCycle : ErrorCode::kUnknownParent,
                      "concept '" + id + "' has " +
                          (pending ? "a cyclic parent '" : "unknown parent '") + p + "'",
                      p);
        }
      }
      kb.define_concept(concept_from_json(cj, kb));  // throws the precise error
    }
    Role r = role_from_json(roles.front());
    kb.define_role(std::move(r));  // throws the precise error
  }
}

}  // namespace

Json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::kParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what(),
                source);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnknownId, "cannot read " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Value value_from_json(const Json& j, const Role& r) {
  auto bad = [&](const char* expected) {
    return Error(ErrorCode::kRangeViolation,
                 "value " + j.dump() + " for role '" + r.id + "' must be " + expected, r.id);
  };
  if (!r.is_literal()) {
    if (!j.is_string()) throw bad("an instance id");
    return Value::instance(j.get<std::string>());
  }
  switch (*r.literal) {
    case LiteralType::kNumber:
      if (!j.is_number()) throw bad("a number");
      return Value::num(j.get<double>());
    case LiteralType::kBoolean:
      if (!j.is_boolean()) throw bad("a boolean");
      return Value::boolean(j.get<bool>());
    case LiteralType::kString:
      if (!j.is_string()) throw bad("a string");
      return Value::str(j.get<std::string>());
    case LiteralType::kEnum:
      if (!j.is_string()) throw bad("an enum symbol");
      return Value::symbol(j.get<std::string>());
  }
  throw bad("valid");
}

Json value_to_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::kNumber: return number_json(v.number);
    case Value::Kind::kBoolean: return v.flag;
    default: return v.text;
  }
}

Query query_from_json(const Json& j, const KnowledgeBase& kb) {
  if (!j.is_array()) throw Error(ErrorCode::kMalformedQuery, "query must be an array of atoms");
  Query q;
  for (const auto& a : j) q.atoms.push_back(atom_from_json(a, kb));
  return q;
}

Json query_to_json(const Query& q) {
  Json arr = Json::array();
  for (const auto& a : q.atoms) {
    switch (a.kind) {
      case Atom::Kind::kType:
        arr.push_back({{"type", {term_to_json(a.subject), a.concept_id}}});
        break;
      case Atom::Kind::kFiller:
        arr.push_back({{"filler", {term_to_json(a.subject), a.role, term_to_json(a.object)}}});
        break;
      case Atom::Kind::kCompare:
        arr.push_back({{"compare",
                        {term_to_json(a.subject), a.role, std::string(compare_op_symbol(a.op)),
                         number_json(a.number)}}});
        break;
    }
  }
  return arr;
}

Assertion assertion_from_json(const Json& j, const KnowledgeBase& kb) {
  if (!j.is_object() || j.size() != 1) throw schema_error("assertion", "must have one key");
  const auto& [key, args] = *j.items().begin();
  if (key == "type") {
    if (args.size() != 2) throw schema_error("assertion", "type takes [instance, concept]");
    return Assertion::type(args[0].get<std::string>(), args[1].get<std::string>());
  }
  if (key == "filler" || key == "retract") {
    if (args.size() != 3) throw schema_error("assertion", key + " takes [instance, role, value]");
    std::string role_id = args[1].get<std::string>();
    Value v = value_from_json(args[2], kb.role(role_id));
    return key == "filler" ? Assertion::filler(args[0].get<std::string>(), role_id, v)
                           : Assertion::retract(args[0].get<std::string>(), role_id, v);
  }
  throw schema_error("assertion", "unknown assertion kind '" + key + "'");
}

Json assertion_to_json(const Assertion& a) {
  switch (a.kind) {
    case Assertion::Kind::kType:
      return {{"type", {a.instance, a.concept_id}}};
    case Assertion::Kind::kFiller:
      return {{"filler", {a.instance, a.role, value_to_json(a.value)}}};
    case Assertion::Kind::kRetract:
      return {{"retract", {a.instance, a.role, value_to_json(a.value)}}};
  }
  return nullptr;
}

namespace {

PlanAction action_from_json(const Json& j, const KnowledgeBase& kb, const std::string& plan) {
  PlanAction a;
  a.id = string_field(j, "id", "action in plan '" + plan + "'");
  std::string where = "action '" + a.id + "'";
  std::string cat = string_field(j, "category", where);
  auto c = parse_category(cat);
  if (!c) throw schema_error(where, "unknown category '" + cat + "'");
  a.category = *c;
  a.process = string_field(j, "process", where);
  if (j.contains("actor")) a.actor = j.at("actor").get<std::string>();
  if (j.contains("participants")) {
    for (const auto& [role, inst] : j.at("participants").items()) {
      a.participants[role] = inst.get<std::string>();
    }
  }
  a.attribute = optional_string(j, "attribute");
  if (j.contains("preconditions")) {
    for (const auto& q : j.at("preconditions")) a.preconditions.push_back(query_from_json(q, kb));
  }
  if (j.contains("postconditions")) {
    for (const auto& p : j.at("postconditions")) {
      a.postconditions.push_back(assertion_from_json(p, kb));
    }
  }
  if (j.contains("refinement") && j.at("refinement").is_string()) {
    a.refinement = j.at("refinement").get<std::string>();
  }
  return a;
}

Json action_to_json(const PlanAction& a) {
  Json j;
  j["id"] = a.id;
  j["category"] = std::string(category_name(a.category));
  j["process"] = a.process;
  if (a.actor != "reader") j["actor"] = a.actor;
  Json parts = Json::object();
  for (const auto& [r, i] : a.participants) parts[r] = i;
  j["participants"] = std::move(parts);
  if (!a.attribute.empty()) j["attribute"] = a.attribute;
  if (!a.preconditions.empty()) {
    Json pre = Json::array();
    for (const auto& q : a.preconditions) pre.push_back(query_to_json(q));
    j["preconditions"] = std::move(pre);
  }
  if (!a.postconditions.empty()) {
    Json post = Json::array();
    for (const auto& p : a.postconditions) post.push_back(assertion_to_json(p));
    j["postconditions"] = std::move(post);
  }
  if (a.refinement) j["refinement"] = *a.refinement;
  return j;
}

std::vector<Step> steps_from_json(const Json& j, const KnowledgeBase& kb, const std::string& plan) {
  std::vector<Step> out;
  if (!j.is_array()) throw schema_error("plan '" + plan + "'", "steps must be an array");
  for (const auto& sj : j) {
    if (sj.contains("action")) {
      out.push_back(Step::of(action_from_json(sj.at("action"), kb, plan)));
    } else if (sj.contains("if")) {
      out.push_back(Step::when(query_from_json(sj.at("if"), kb),
                               steps_from_json(sj.value("then", Json::array()), kb, plan),
                               steps_from_json(sj.value("else", Json::array()), kb, plan)));
    } else {
      throw schema_error("plan '" + plan + "'", "step must have 'action' or 'if'");
    }
  }
  return out;
}

Json steps_to_json(const std::vector<Step>& steps) {
  Json arr = Json::array();
  for (const auto& s : steps) {
    if (s.kind == Step::Kind::kAction) {
      arr.push_back({{"action", action_to_json(s.action)}});
    } else {
      Json c;
      c["if"] = query_to_json(s.condition);
      c["then"] = steps_to_json(s.then_steps);
      if (!s.else_steps.empty()) c["else"] = steps_to_json(s.else_steps);
      arr.push_back(std::move(c));
    }
  }
  return arr;
}

}  // namespace

Plan plan_from_json(const Json& j, const KnowledgeBase& kb) {
  Plan p;
  p.id = string_field(j, "id", "plan");
  std::string where = "plan '" + p.id + "'";
  if (j.contains("goal")) p.goal = query_from_json(j.at("goal"), kb);
  p.target_device = optional_string(j, "target-device");
  p.device_concepts = string_list(j, "device-concepts", where);
  if (j.contains("preconditions")) {
    for (const auto& q : j.at("preconditions")) p.preconditions.push_back(query_from_json(q, kb));
  }
  p.steps = steps_from_json(field(j, "steps", where), kb, p.id);
  p.replacement_items = string_list(j, "replacement-items", where);
  p.location_info = optional_string(j, "location-info");
  p.location_subject = optional_string(j, "location-subject");
  return p;
}

Json plan_to_json(const Plan& p) {
  Json j;
  j["id"] = p.id;
  if (!p.goal.atoms.empty()) j["goal"] = query_to_json(p.goal);
  if (!p.target_device.empty()) j["target-device"] = p.target_device;
  if (!p.device_concepts.empty()) j["device-concepts"] = p.device_concepts;
  if (!p.preconditions.empty()) {
    Json pre = Json::array();
    for (const auto& q : p.preconditions) pre.push_back(query_to_json(q));
    j["preconditions"] = std::move(pre);
  }
  j["steps"] = steps_to_json(p.steps);
  if (!p.replacement_items.empty()) j["replacement-items"] = p.replacement_items;
  if (!p.location_info.empty()) j["location-info"] = p.location_info;
  if (!p.location_subject.empty()) j["location-subject"] = p.location_subject;
  return j;
}

Model load_model(const std::vector<Json>& docs) {
  Model m;
  std::vector<Json> roles, concepts, instances, rules, plans;
  for (const auto& d : docs) {
    if (!d.is_object() && !d.is_null()) throw schema_error("document", "must be a JSON object");
    for (const auto& e : array_field(d, "roles")) roles.push_back(e);
    for (const auto& e : array_field(d, "concepts")) concepts.push_back(e);
    for (const auto& e : array_field(d, "instances")) instances.push_back(e);
    for (const auto& e : array_field(d, "rules")) rules.push_back(e);
    for (const auto& e : array_field(d, "plans")) plans.push_back(e);
  }
  define_terminology(m.kb, std::move(roles), std::move(concepts));
  std::vector<Instance> batch;
  for (const auto& ij : instances) batch.push_back(instance_from_json(ij, m.kb));
  if (!batch.empty()) m.kb.bulk_insert(std::move(batch));
  for (const auto& rj : rules) m.kb.add_rule(rule_from_json(rj, m.kb));
  for (const auto& pj : plans) {
    Plan p = plan_from_json(pj, m.kb);
    if (m.plans.count(p.id)) {
      throw Error(ErrorCode::kDuplicateId, "duplicate plan '" + p.id + "'", p.id);
    }
    std::string id = p.id;
    m.plans.emplace(std::move(id), std::move(p));
  }
  return m;
}

Model load_model(const Json& doc) { return load_model(std::vector<Json>{doc}); }

KnowledgeBase load_kb(const Json& doc) { return load_model(doc).kb; }

std::vector<Json> read_documents(const std::filesystem::path& path) {
  std::vector<Json> out;
  std::set<std::filesystem::path> seen;
  std::vector<std::filesystem::path> stack;
  auto visit = [&](auto&& self, const std::filesystem::path& p) -> void {
    auto canonical = std::filesystem::weakly_canonical(p);
    if (std::find(stack.begin(), stack.end(), canonical) != stack.end()) {
      throw Error(ErrorCode::kCycle, "include cycle at " + p.string(), p.string());
    }
    if (!seen.insert(canonical).second) return;
    stack.push_back(canonical);
    Json doc = parse_json_text(read_file(p), p.string());
    if (doc.is_object() && doc.contains("include")) {
      for (const auto& inc : doc.at("include")) {
        self(self, p.parent_path() / inc.get<std::string>());
      }
    }
    stack.pop_back();
    out.push_back(std::move(doc));
  };
  visit(visit, path);
  return out;
}

Model load_model_file(const std::filesystem::path& path) {
  return load_model(read_documents(path));
}

Json snapshot(const KnowledgeBase& kb) {
  Json doc;
  doc["format_version"] = 1;
  Json roles = Json::array();
  for (const auto& [id, r] : kb.roles()) roles.push_back(role_to_json(r));
  doc["roles"] = std::move(roles);
  Json concepts = Json::array();
  for (const auto& [id, c] : kb.concepts()) {
    if (id == kThing) continue;
    concepts.push_back(concept_to_json(c));
  }
  doc["concepts"] = std::move(concepts);
  Json instances = Json::array();
  for (const auto& [id, inst] : kb.instances()) instances.push_back(instance_to_json(inst));
  doc["instances"] = std::move(instances);
  Json rules = Json::array();
  for (const auto& r : kb.rules()) rules.push_back(rule_to_json(r));
  doc["rules"] = std::move(rules);
  doc["plans"] = Json::array();
  return doc;
}

Json snapshot(const Model& model) {
  Json doc = snapshot(model.kb);
  Json plans = Json::array();
  for (const auto& [id, p] : model.plans) plans.push_back(plan_to_json(p));
  doc["plans"] = std::move(plans);
  return doc;
}

Json delta_to_json(const StateDelta& d) {
  auto changes = [](const std::vector<TypeChange>& v) {
    Json arr = Json::array();
    for (const auto& c : v) arr.push_back({{"instance", c.instance}, {"concept", c.concept_id}});
    return arr;
  };
  Json j;
  j["type_gains"] = changes(d.type_gains);
  j["type_losses"] = changes(d.type_losses);
  j["asserted_gains"] = changes(d.asserted_gains);
  Json fc = Json::array();
  for (const auto& c : d.filler_changes) {
    Json before = Json::array(), after = Json::array();
    for (const auto& v : c.before) before.push_back(value_to_json(v));
    for (const auto& v : c.after) after.push_back(value_to_json(v));
    fc.push_back({{"instance", c.instance}, {"role", c.role}, {"old", before}, {"new", after}});
  }
  j["filler_changes"] = std::move(fc);
  j["fired_rules"] = d.fired_rules;
  Json events = Json::array();
  for (const auto& e : d.events) {
    Json args = Json::array();
    for (const auto& a : e.args) args.push_back(value_to_json(a));
    events.push_back({{"rule", e.rule}, {"name", e.name}, {"args", args}});
  }
  j["events"] = std::move(events);
  return j;
}

Json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  Json arr = Json::array();
  for (const auto& d : diags) {
    arr.push_back({{"severity", d.severity == Diagnostic::Severity::kError ? "error" : "warning"},
                   {"code", d.code},
                   {"message", d.message},
                   {"subject", d.subject}});
  }
  return arr;
}

}  // namespace techdoc
