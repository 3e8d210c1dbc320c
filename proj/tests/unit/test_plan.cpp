#include <doctest.h>

#include "fixtures.hpp"
#include "techdoc/plan.hpp"

using namespace techdoc;

namespace {

PlanAction motor(std::string id, std::string process, std::map<std::string, std::string> parts) {
  PlanAction a;
  a.id = std::move(id);
  a.process = std::move(process);
  a.participants = std::move(parts);
  return a;
}

std::vector<std::string> leaf_ids(const ExpandedPlan& p) {
  std::vector<std::string> out;
  for (const auto* a : p.leaves()) out.push_back(a->id);
  return out;
}

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

}  // namespace

TEST_CASE("expand check-oil-level") {
  const Model& m = fixtures::car_model();
  ExpandedPlan e = expand_plan("check-oil-level", m.plans, m.kb);
  CHECK(e.leaf_count() == 7);
  CHECK(leaf_ids(e) == std::vector<std::string>{
                           "open-bonnet", "read-level/pull-out-1", "read-level/wipe",
                           "read-level/reinsert", "read-level/pull-out-2", "read-level/read",
                           "add-oil"});
  auto leaves = e.leaves();
  CHECK(leaves[1]->participants.at("patient") == "dipstick-1");
  CHECK(leaves[5]->participants.at("patient") == "oil-level-1");
  CHECK(leaves[5]->participants.at("instrument") == "dipstick-1");
  CHECK(e.leaf_count() >= m.plans.at("check-oil-level").steps.size());

  SUBCASE("idempotent") {
    ExpandedPlan again = expand_plan(e, m.plans, m.kb);
    CHECK(leaf_ids(again) == leaf_ids(e));
    CHECK(again.steps.size() == e.steps.size());
  }
}

TEST_CASE("expansion without refinements is the identity") {
  const Model& m = fixtures::car_model();
  ExpandedPlan e = expand_plan("replace-spark-plugs", m.plans, m.kb);
  const Plan& p = m.plans.at("replace-spark-plugs");
  REQUIRE(e.steps.size() == p.steps.size());
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    CHECK(e.steps[i].action.id == p.steps[i].action.id);
    CHECK(e.steps[i].is_leaf_action());
  }
}

TEST_CASE("refinement cycle reports the path") {
  Model m = fixtures::car();
  Plan a{"A", {}, "car-1", {}, {}, {}, {}, "", ""};
  PlanAction sa = motor("a1", "open", {{"patient", "hood-1"}});
  sa.refinement = "B";
  a.steps.push_back(Step::of(sa));
  Plan b{"B", {}, "", {}, {}, {}, {}, "", ""};
  PlanAction sb = motor("b1", "open", {{"patient", "$patient"}});
  sb.refinement = "A";
  b.steps.push_back(Step::of(sb));
  m.plans["A"] = a;
  m.plans["B"] = b;
  try {
    expand_plan("A", m.plans, m.kb);
    FAIL("expected cycle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRefinementCycle);
    CHECK(e.subject() == "A,B,A");
  }
}

TEST_CASE("unresolved placeholder") {
  Model m = fixtures::car();
  Plan top{"top", {}, "car-1", {}, {}, {}, {}, "", ""};
  PlanAction s = motor("s", "open", {{"patient", "hood-1"}});
  s.refinement = "sub";
  top.steps.push_back(Step::of(s));
  Plan sub{"sub", {}, "", {}, {}, {}, {}, "", ""};
  sub.steps.push_back(Step::of(motor("t", "wipe", {{"patient", "$instrument"}})));
  m.plans["top"] = top;
  m.plans["sub"] = sub;
  try {
    expand_plan("top", m.plans, m.kb);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnresolvedPlaceholder);
  }
}

TEST_CASE("applicable_plans") {
  Model m = fixtures::car();
  CHECK(applicable_plans("car-1", m.plans, m.kb) ==
        std::vector<std::string>{"check-oil-level", "refill-washer-fluid", "replace-spark-plugs"});
  m.kb.create_instance("thing-1", {}, {});
  CHECK(applicable_plans("thing-1", m.plans, m.kb).empty());
  CHECK_THROWS_AS(applicable_plans("ghost", m.plans, m.kb), Error);

  auto before = applicable_plans("car-1", m.plans, m.kb);
  m.kb.tell(Assertion::filler("hood-1", "open-state", Value::symbol("closed")));
  CHECK(applicable_plans("car-1", m.plans, m.kb) == before);

  m.kb.tell(Assertion::filler("washer-level-1", "level-state", Value::symbol("ok")));
  CHECK(applicable_plans("car-1", m.plans, m.kb) ==
        std::vector<std::string>{"check-oil-level", "replace-spark-plugs"});
}

TEST_CASE("validate_plan") {
  Model m = fixtures::car();
  for (const auto& [id, plan] : m.plans) {
    auto ds = validate_plan(id, m.plans, m.kb);
    CHECK_MESSAGE(ds.empty(), id, ": ", (ds.empty() ? "" : ds[0].message));
  }

  SUBCASE("postcondition on an unknown role") {
    Plan p = m.plans.at("replace-spark-plugs");
    p.id = "broken";
    p.steps[1].action.postconditions[0].role = "no-such-role";
    auto ds = validate_plan(p, m.plans, m.kb);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "unknown-role");
  }
  SUBCASE("condition on a disjoint concept warns") {
    Plan p = m.plans.at("replace-spark-plugs");
    p.id = "odd";
    Query q{{Atom::type(Term::of(Value::instance("spark-plug-1")), "low-level")}};
    p.steps.push_back(Step::when(q, {Step::of(motor("x", "open", {{"patient", "hood-1"}}))}));
    auto ds = validate_plan(p, m.plans, m.kb);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "unsatisfiable-condition");
    CHECK(ds[0].severity == Diagnostic::Severity::kWarning);
  }
  SUBCASE("participant outside the process range") {
    Plan p = m.plans.at("replace-spark-plugs");
    p.id = "bad-participant";
    p.steps[0].action.participants["patient"] = "cloth-1";
    CHECK(has_code(validate_plan(p, m.plans, m.kb), "participant-type"));
  }
  SUBCASE("empty plan") {
    Plan p{"empty", {}, "car-1", {}, {}, {}, {}, "", ""};
    CHECK(has_code(validate_plan(p, m.plans, m.kb), "empty-plan"));
  }
  SUBCASE("check-attribute without attribute") {
    Plan p = m.plans.at("check-oil-level");
    p.id = "no-attr";
    p.steps[1].action.attribute.clear();
    CHECK(has_code(validate_plan(p, m.plans, m.kb), "missing-attribute"));
  }
}

TEST_CASE("participant ranges") {
  const KnowledgeBase& kb = fixtures::car_model().kb;
  CHECK(participant_ranges("open", "patient", kb) == std::vector<std::string>{"cover"});
  CHECK(participant_fits("open", "patient", "hood-1", kb));
  CHECK_FALSE(participant_fits("open", "patient", "cloth-1", kb));
  CHECK(participant_fits("tighten", "patient", "drain-bolt-1", kb));
}
