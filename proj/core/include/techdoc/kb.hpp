#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "techdoc/error.hpp"

// A KL-ONE style knowledge base: a concept taxonomy with role restrictions
// (terminological part), instances with role fillers (assertional part),
// automatic classification, closed-world ASK, TELL with reclassification, and
// forward-chaining production rules.
namespace techdoc {

inline constexpr const char* kThing = "THING";

enum class LiteralType { kNumber, kString, kBoolean, kEnum };

// A role filler: either a reference to an instance or a literal.
struct Value {
  enum class Kind { kInstance, kNumber, kString, kBoolean, kEnum };

  Kind kind = Kind::kInstance;
  std::string text;  // instance id, string, or enum symbol
  double number = 0.0;
  bool flag = false;

  static Value instance(std::string id);
  static Value num(double v);
  static Value str(std::string s);
  static Value boolean(bool b);
  static Value symbol(std::string s);

  bool is_instance() const { return kind == Kind::kInstance; }
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator<(const Value& a, const Value& b);
};

struct Role {
  std::string id;
  std::string domain;                // concept id
  std::string range_concept;         // set iff the range is a concept
  std::optional<LiteralType> literal;
  std::vector<std::string> enum_values;
  bool functional = false;           // at most one filler; TELL replaces

  bool is_literal() const { return literal.has_value(); }
};

enum class RestrictionKind { kAll, kFiller, kCard };

struct RoleRestriction {
  RestrictionKind kind = RestrictionKind::kAll;
  std::string role;
  std::string concept_id;               // kAll
  Value filler;                      // kFiller
  std::size_t min = 0;               // kCard
  std::optional<std::size_t> max;    // kCard, nullopt = unbounded
};

struct Concept {
  std::string id;
  std::set<std::string> parents;
  std::vector<RoleRestriction> restrictions;
  // Primitive concepts are necessary conditions only; membership in them
  // must be asserted. Defined concepts are recognized by classification.
  bool primitive = true;
};

struct Instance {
  std::string id;
  std::set<std::string> asserted_types;
  std::map<std::string, std::vector<Value>> fillers;  // sorted, unique
  std::set<std::string> derived_types;

  const std::vector<Value>& fillers_of(const std::string& role) const;
  friend bool operator==(const Instance&, const Instance&) = default;
};

// --- queries --------------------------------------------------------------

// A query term: a variable (`?x`) or a constant.
struct Term {
  std::string variable;
  Value constant;

  static Term var(std::string name);
  static Term of(Value v);
  bool is_variable() const { return !variable.empty(); }
};

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };

std::string_view compare_op_symbol(CompareOp op);
std::optional<CompareOp> parse_compare_op(std::string_view s);

struct Atom {
  enum class Kind { kType, kFiller, kCompare };
  Kind kind = Kind::kType;
  Term subject;
  std::string concept_id;  // kType
  std::string role;     // kFiller, kCompare
  Term object;          // kFiller
  CompareOp op = CompareOp::kEq;
  double number = 0.0;  // kCompare

  static Atom type(Term x, std::string concept_id);
  static Atom filler(Term x, std::string role, Term y);
  static Atom compare(Term x, std::string role, CompareOp op, double value);
};

struct Query {
  std::vector<Atom> atoms;

  bool is_ground() const;
  std::set<std::string> variables() const;
};

using Binding = std::map<std::string, Value>;

struct AskResult {
  bool holds = false;
  std::vector<Binding> bindings;  // sorted by bound instance ids
};

// Three-valued evaluation used for state-dependent pruning: kUnknown means
// the relevant role has no filler at all.
enum class Truth { kFalse, kTrue, kUnknown };

// --- assertions, rules, deltas ---------------------------------------------

struct Assertion {
  enum class Kind { kType, kFiller, kRetract };
  Kind kind = Kind::kFiller;
  std::string instance;
  std::string concept_id;  // kType
  std::string role;     // kFiller, kRetract
  Value value;          // kFiller, kRetract

  static Assertion type(std::string instance, std::string concept_id);
  static Assertion filler(std::string instance, std::string role, Value v);
  static Assertion retract(std::string instance, std::string role, Value v);
};

struct RuleAction {
  enum class Kind { kAssertFiller, kAssertType, kRetractFiller, kEmit };
  Kind kind = Kind::kAssertFiller;
  Term subject;
  std::string role;
  Term object;
  std::string concept_id;
  std::string event;          // kEmit
  std::vector<Term> args;     // kEmit
};

struct Rule {
  std::string id;
  Query condition;
  std::vector<RuleAction> actions;
};

struct Event {
  std::string rule;
  std::string name;
  std::vector<Value> args;

  friend bool operator==(const Event&, const Event&) = default;
};

struct TypeChange {
  std::string instance;
  std::string concept_id;

  friend bool operator==(const TypeChange&, const TypeChange&) = default;
  friend auto operator<=>(const TypeChange&, const TypeChange&) = default;
};

struct FillerChange {
  std::string instance;
  std::string role;
  std::vector<Value> before;
  std::vector<Value> after;

  friend bool operator==(const FillerChange&, const FillerChange&) = default;
};

// Everything a TELL changed, direct and rule-derived.
struct StateDelta {
  std::vector<TypeChange> type_gains;
  std::vector<TypeChange> type_losses;
  std::vector<TypeChange> asserted_gains;
  std::vector<FillerChange> filler_changes;
  std::vector<std::string> fired_rules;
  std::vector<Event> events;

  bool empty() const;
  friend bool operator==(const StateDelta&, const StateDelta&) = default;
};

// --- the knowledge base ------------------------------------------------------

class KnowledgeBase {
 public:
  static constexpr std::size_t kDefaultRuleRoundCap = 1000;

  KnowledgeBase();

  // Terminological part.
  void define_role(Role role);
  const std::string& define_concept(Concept c);
  bool subsumes(const std::string& general, const std::string& specific) const;
  // Parent-closure of a concept_id, including itself.
  const std::set<std::string>& ancestors(const std::string& concept_id) const;
  // Concepts ordered so that parents precede children.
  const std::vector<std::string>& topological_order() const { return topo_; }

  // Assertional part.
  const std::string& create_instance(
      const std::string& id, const std::set<std::string>& types,
      const std::map<std::string, std::vector<Value>>& fillers = {});
  // Inserts several instances (which may refer to each other) and classifies
  // once. All-or-nothing.
  void bulk_insert(std::vector<Instance> batch);
  StateDelta tell(const Assertion& a);
  StateDelta tell(const std::vector<Assertion>& batch);
  AskResult ask(const Query& q) const;
  Truth evaluate_known(const Query& q) const;
  // Recomputes derived types and returns the most specific ones.
  std::set<std::string> classify(const std::string& instance);
  std::set<std::string> most_specific_types(const std::string& instance) const;
  void reclassify_all();

  // Applies a delta (or its inverse) without running rules.
  void apply(const StateDelta& delta);
  void apply_inverse(const StateDelta& delta);

  // Rules fire in definition order.
  void add_rule(Rule rule);
  void set_rule_round_cap(std::size_t cap) { rule_round_cap_ = cap; }
  std::size_t rule_round_cap() const { return rule_round_cap_; }

  // Validation helpers shared with the loader and plan checker.
  void validate_query(const Query& q) const;
  void check_filler(const std::string& role, const Value& v) const;

  const std::map<std::string, Role>& roles() const { return roles_; }
  const std::map<std::string, Concept>& concepts() const { return concepts_; }
  const std::map<std::string, Instance>& instances() const { return instances_; }
  const std::vector<Rule>& rules() const { return rules_; }

  bool has_concept(const std::string& id) const { return concepts_.count(id) > 0; }
  bool has_role(const std::string& id) const { return roles_.count(id) > 0; }
  bool has_instance(const std::string& id) const { return instances_.count(id) > 0; }
  const Concept& concept_def(const std::string& id) const;
  const Role& role(const std::string& id) const;
  const Instance& instance(const std::string& id) const;
  bool is_a(const std::string& instance, const std::string& concept_id) const;

  // Every restriction that applies to members of a concept_id: its own plus
  // those inherited from all ancestors.
  std::vector<RoleRestriction> effective_restrictions(const std::string& concept_id) const;

 private:
  bool apply_assertion(const Assertion& a);
  bool satisfies(const Instance& inst, const RoleRestriction& r,
                 const std::map<std::string, std::set<std::string>>& types) const;
  std::set<std::string> upward_closure(const std::set<std::string>& types) const;
  void run_rules(StateDelta& delta);
  bool entails(const std::string& specific, const RoleRestriction& r,
               std::set<std::pair<std::string, std::string>>& visiting) const;
  bool subsumes_impl(const std::string& general, const std::string& specific,
                     std::set<std::pair<std::string, std::string>>& visiting) const;
  void match(const Query& q, std::size_t index, Binding& binding,
             std::vector<Binding>& out) const;
  bool atom_holds(const Atom& atom, const Binding& binding) const;
  Value resolve(const Term& t, const Binding& b) const;
  StateDelta diff(const std::map<std::string, Instance>& before) const;

  std::map<std::string, Role> roles_;
  std::map<std::string, Concept> concepts_;
  std::map<std::string, std::set<std::string>> ancestors_;
  std::vector<std::string> topo_;
  std::map<std::string, Instance> instances_;
  std::vector<Rule> rules_;
  std::size_t rule_round_cap_ = kDefaultRuleRoundCap;
};

}  // namespace techdoc
