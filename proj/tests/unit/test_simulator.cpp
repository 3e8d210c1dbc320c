#include <doctest.h>

#include <functional>
#include <random>

#include "fixtures.hpp"
#include "techdoc/simulator.hpp"

using namespace techdoc;

namespace {

Atom type_atom(const std::string& i, const std::string& c) {
  return Atom::type(Term::of(Value::instance(i)), c);
}

PlanAction drain_oil() {
  PlanAction a;
  a.id = "drain";
  a.process = "drain-oil";
  a.participants = {{"source", "oil-tank-1"}};
  a.preconditions = {Query{{type_atom("drain-bolt-1", "loosely-connected")}}};
  return a;
}

std::vector<std::string> statuses(const Trace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.entries) {
    out.push_back(e.action_id + ":" + std::string(trace_status_name(e.status)));
  }
  return out;
}

}  // namespace

TEST_CASE("check_preconditions") {
  KnowledgeBase kb = fixtures::car().kb;
  auto r = check_preconditions(drain_oil(), kb);
  REQUIRE(r.size() == 1);
  CHECK_FALSE(r[0].holds);
  PlanAction bare;
  CHECK(check_preconditions(bare, kb).empty());
  kb.tell(Assertion::filler("drain-bolt-1", "connection-state", Value::symbol("loose")));
  CHECK(check_preconditions(drain_oil(), kb)[0].holds);
}

TEST_CASE("execute_action") {
  KnowledgeBase kb = fixtures::car().kb;
  kb.tell(Assertion::filler("drain-bolt-1", "connection-state", Value::symbol("loose")));

  PlanAction tighten;
  tighten.id = "tighten-bolt";
  tighten.process = "tighten";
  tighten.participants = {{"patient", "drain-bolt-1"}, {"instrument", "wrench-1"}};
  tighten.postconditions = {
      Assertion::filler("drain-bolt-1", "connection-state", Value::symbol("tight"))};
  TraceEntry e = execute_action(tighten, kb);
  CHECK(e.status == TraceStatus::kExecuted);
  CHECK(std::count(e.delta.type_gains.begin(), e.delta.type_gains.end(),
                   TypeChange{"drain-bolt-1", "tightly-connected"}) == 1);

  SUBCASE("blocked leaves the KB untouched") {
    std::mt19937 rng(7);
    std::vector<std::string> ids, concepts;
    for (const auto& [id, i] : kb.instances()) ids.push_back(id);
    for (const auto& [id, c] : kb.concepts()) concepts.push_back(id);
    std::vector<Query> probes;
    for (int i = 0; i < 10; ++i) {
      probes.push_back(Query{{type_atom(ids[rng() % ids.size()], concepts[rng() % concepts.size()])}});
    }
    std::vector<bool> before;
    for (const auto& q : probes) before.push_back(kb.ask(q).holds);
    auto snapshot_before = kb.instances();
    TraceEntry blocked = execute_action(drain_oil(), kb);
    CHECK(blocked.status == TraceStatus::kBlocked);
    CHECK(blocked.delta.empty());
    for (std::size_t i = 0; i < probes.size(); ++i) CHECK(kb.ask(probes[i]).holds == before[i]);
    CHECK(kb.instances() == snapshot_before);
  }
  SUBCASE("rule firing is recorded") {
    PlanAction fill;
    fill.id = "fill";
    fill.process = "fill";
    fill.postconditions = {
        Assertion::filler("washer-level-1", "level-state", Value::symbol("full"))};
    TraceEntry f = execute_action(fill, kb);
    CHECK(f.fired_rules == std::vector<std::string>{"r-ready"});
  }
  SUBCASE("postcondition error rolls back") {
    PlanAction bad;
    bad.id = "bad";
    bad.postconditions = {
        Assertion::filler("hood-1", "open-state", Value::symbol("open")),
        Assertion::filler("hood-1", "open-state", Value::symbol("ajar"))};
    auto snap = kb.instances();
    CHECK_THROWS_AS(execute_action(bad, kb), Error);
    CHECK(kb.instances() == snap);
  }
}

TEST_CASE("simulate check-oil-level") {
  Model m = fixtures::car();
  SUBCASE("level low runs the add-oil branch") {
    m.kb.tell(Assertion::filler("oil-level-1", "level-state", Value::symbol("low")));
    KnowledgeBase kb = m.kb;
    Trace t = simulate("check-oil-level", m.plans, kb);
    CHECK(statuses(t) == std::vector<std::string>{
                             "open-bonnet:executed", "read-level/pull-out-1:executed",
                             "read-level/wipe:executed", "read-level/reinsert:executed",
                             "read-level/pull-out-2:executed", "read-level/read:executed",
                             "add-oil:executed"});
    CHECK(kb.is_a("oil-level-1", "ok-level"));
    for (const auto& e : t.entries) {
      for (const auto& r : e.preconditions) CHECK(r.holds);
    }
  }
  SUBCASE("level ok skips it") {
    m.kb.tell(Assertion::filler("oil-level-1", "level-state", Value::symbol("ok")));
    KnowledgeBase kb = m.kb;
    Trace t = simulate("check-oil-level", m.plans, kb);
    REQUIRE(t.entries.size() == 7);
    CHECK(t.entries.back().action_id == "add-oil");
    CHECK(t.entries.back().status == TraceStatus::kSkippedByCondition);
    CHECK_FALSE(t.blocked());
  }
  SUBCASE("determinism") {
    KnowledgeBase a = m.kb, b = m.kb;
    CHECK(trace_to_json(simulate("check-oil-level", m.plans, a)) ==
          trace_to_json(simulate("check-oil-level", m.plans, b)));
  }
  SUBCASE("inverse replay restores the snapshot") {
    m.kb.tell(Assertion::filler("oil-level-1", "level-state", Value::symbol("low")));
    KnowledgeBase kb = m.kb;
    Trace t = simulate("check-oil-level", m.plans, kb);
    for (auto it = t.entries.rbegin(); it != t.entries.rend(); ++it) kb.apply_inverse(it->delta);
    CHECK(snapshot(kb).dump() == snapshot(m.kb).dump());
  }
}

TEST_CASE("simulate stops at the first blocked action") {
  Model m = fixtures::car();
  Plan& p = m.plans.at("replace-spark-plugs");
  p.steps[2].action.preconditions = {Query{{type_atom("drain-bolt-1", "loosely-connected")}}};
  KnowledgeBase kb = m.kb;
  Trace t = simulate("replace-spark-plugs", m.plans, kb);
  CHECK(t.entries.size() == 3);
  CHECK(t.blocked());
  CHECK(t.entries.back().action_id == "unscrew-plug");
}

TEST_CASE("executed postconditions hold afterwards") {
  Model m = fixtures::car();
  for (const auto& id : {"check-oil-level", "refill-washer-fluid", "replace-spark-plugs"}) {
    KnowledgeBase kb = m.kb;
    Trace t = simulate(id, m.plans, kb);
    ExpandedPlan e = expand_plan(id, m.plans, m.kb);
    std::map<std::string, const PlanAction*> actions;
    std::function<void(const std::vector<ExpandedStep>&)> collect =
        [&](const std::vector<ExpandedStep>& steps) {
          for (const auto& s : steps) {
            if (s.kind == Step::Kind::kAction) actions[s.action.id] = &s.action;
            collect(s.refinement_steps);
            collect(s.then_steps);
            collect(s.else_steps);
          }
        };
    collect(e.steps);
    KnowledgeBase replay = m.kb;
    for (const auto& entry : t.entries) {
      if (entry.status != TraceStatus::kExecuted) continue;
      replay.apply(entry.delta);
      for (const auto& post : actions.at(entry.action_id)->postconditions) {
        Query q;
        if (post.kind == Assertion::Kind::kFiller) {
          q.atoms.push_back(Atom::filler(Term::of(Value::instance(post.instance)), post.role,
                                         Term::of(post.value)));
        } else if (post.kind == Assertion::Kind::kType) {
          q.atoms.push_back(type_atom(post.instance, post.concept_id));
        } else {
          continue;
        }
        CHECK_MESSAGE(replay.ask(q).holds, entry.action_id);
      }
    }
    CHECK(replay.instances() == kb.instances());
  }
}

TEST_CASE("filter_relevant_steps") {
  Model m = fixtures::car();
  SUBCASE("no data keeps the conditional") {
    ExpandedPlan f = filter_relevant_steps("check-oil-level", m.plans, m.kb);
    REQUIRE(f.steps.size() == 3);
    CHECK(f.steps[2].kind == Step::Kind::kConditional);
    CHECK(f.steps[2].condition_retained);
  }
  SUBCASE("sensor says ok") {
    m.kb.tell(Assertion::filler("oil-level-1", "level-state", Value::symbol("ok")));
    ExpandedPlan f = filter_relevant_steps("check-oil-level", m.plans, m.kb);
    CHECK(f.leaf_count() == 6);
    CHECK(f.steps.size() == 2);
  }
  SUBCASE("sensor says low") {
    m.kb.tell(Assertion::filler("oil-level-1", "level-state", Value::symbol("low")));
    ExpandedPlan f = filter_relevant_steps("check-oil-level", m.plans, m.kb);
    REQUIRE(f.steps.size() == 3);
    CHECK(f.steps[2].kind == Step::Kind::kAction);
    CHECK(f.steps[2].action.id == "add-oil");
  }
  SUBCASE("no conditionals is the identity") {
    ExpandedPlan e = expand_plan("replace-spark-plugs", m.plans, m.kb);
    ExpandedPlan f = filter_relevant_steps(e, m.kb);
    CHECK(f.leaf_count() == e.leaf_count());
  }
}
