#include <doctest.h>

#include "fixtures.hpp"
#include "techdoc/sentence_planner.hpp"

using namespace techdoc;

namespace {

DocSequence planned(const std::string& plan, const Model& m = fixtures::car_model()) {
  SectionSchema s = build_document(expand_plan(plan, m.plans, m.kb), m.plans, m.kb);
  return plan_references(linearize(s), m.kb);
}

std::vector<FormatInstruction::Kind> kinds(const DocSequence& seq) {
  std::vector<FormatInstruction::Kind> out;
  for (const auto& item : seq) {
    if (const auto* fi = std::get_if<FormatInstruction>(&item)) out.push_back(fi->kind);
  }
  return out;
}

}  // namespace

TEST_CASE("check-oil-level sequence layout") {
  DocSequence seq = planned("check-oil-level");
  using K = FormatInstruction::Kind;
  std::vector<K> expected = {K::kHeading, K::kParagraphBreak, K::kParagraphBreak, K::kListBegin};
  for (int i = 0; i < 7; ++i) expected.push_back(K::kListItem);
  expected.push_back(K::kListEnd);
  CHECK(kinds(seq) == expected);

  auto plans = sentence_plans(seq);
  REQUIRE(plans.size() == 11);
  for (std::size_t i = 0; i < plans.size(); ++i) CHECK(plans[i]->id == static_cast<int>(i + 1));
  CHECK(plans[0]->block == "location");
  CHECK(plans[2]->block == "replacement");
  // The condition of the last step is planned before its main clause.
  CHECK(plans[9]->process == "low-level");
  CHECK(plans[10]->condition.get() == plans[9]);
  CHECK(plans[10]->list->position == 7);
}

TEST_CASE("pronouns and antecedents") {
  DocSequence seq = planned("check-oil-level");
  auto plans = sentence_plans(seq);
  const auto& pull = plans[4]->participants.at("actee");
  CHECK(pull.form == RefForm::kDefinite);
  const auto& wipe = plans[5]->participants.at("actee");
  CHECK(wipe.referent == "dipstick-1");
  CHECK(wipe.form == RefForm::kPronoun);
  CHECK(wipe.antecedent == Antecedent{5, "actee"});
  CHECK(plans[5]->participants.at("instrument").form == RefForm::kIndefinite);
  CHECK(plans[6]->participants.at("actee").antecedent == Antecedent{5, "actee"});
  CHECK(plans[7]->participants.at("actee").antecedent == Antecedent{5, "actee"});
  // Same referent in a different role is named again.
  CHECK(plans[8]->participants.at("instrument").form == RefForm::kDefinite);
  // The condition counts as a sentence: the level was the actee of "read".
  CHECK(plans[9]->participants.at("actee").form == RefForm::kPronoun);
  CHECK(plans[9]->participants.at("actee").antecedent == Antecedent{9, "actee"});
  CHECK(plans[10]->participants.at("actee").form == RefForm::kDefinite);
  // Imperatives carry no actor.
  CHECK_FALSE(plans[3]->participants.count("actor"));
}

TEST_CASE("every antecedent is an earlier full mention of the same referent") {
  for (auto model : {fixtures::car(), fixtures::aircraft()}) {
    for (const auto& [id, plan] : model.plans) {
      if (plan.target_device.empty()) continue;
      auto seq = planned(id, model);
      std::map<int, const SentencePlan*> by_id;
      for (const auto* sp : sentence_plans(seq)) {
        for (const auto& [role, re] : sp->participants) {
          if (re.form != RefForm::kPronoun) {
            CHECK_FALSE(re.antecedent);
            continue;
          }
          REQUIRE(re.antecedent);
          CHECK(re.antecedent->plan < sp->id);
          REQUIRE(by_id.count(re.antecedent->plan));
          const auto& ante = by_id.at(re.antecedent->plan)->participants.at(re.antecedent->role);
          CHECK(ante.referent == re.referent);
          CHECK(ante.form != RefForm::kPronoun);
        }
        by_id[sp->id] = sp;
      }
    }
  }
}

TEST_CASE("reference planning is idempotent") {
  const Model& m = fixtures::car_model();
  for (const auto& id : {"check-oil-level", "refill-washer-fluid", "replace-spark-plugs"}) {
    DocSequence once = planned(id);
    CHECK(sequence_to_json(plan_references(once, m.kb)) == sequence_to_json(once));
  }
}

TEST_CASE("list markers are balanced and MEANS nests a list") {
  DocSequence seq = planned("refill-washer-fluid");
  int open = 0, max_open = 0;
  for (const auto& item : seq) {
    const auto* fi = std::get_if<FormatInstruction>(&item);
    if (!fi) continue;
    if (fi->kind == FormatInstruction::Kind::kListBegin) max_open = std::max(max_open, ++open);
    if (fi->kind == FormatInstruction::Kind::kListEnd) --open;
    CHECK(open >= 0);
  }
  CHECK(open == 0);
  CHECK(max_open == 2);
  auto plans = sentence_plans(seq);
  REQUIRE(plans.size() == 9);
  CHECK(plans[6]->list->depth == 2);
  CHECK(plans[6]->process == "pour");
  CHECK(plans[4]->list->depth == 1);
}

TEST_CASE("ambiguous referents get ordinals and no pronouns") {
  Model m = fixtures::car();
  m.kb.create_instance("washer-reservoir-2", {"washer-reservoir"});
  Plan p;
  p.id = "two-reservoirs";
  p.target_device = "car-1";
  for (const auto* r : {"washer-reservoir-1", "washer-reservoir-2", "washer-reservoir-2"}) {
    PlanAction a;
    a.id = std::string("check-") + std::to_string(p.steps.size());
    a.process = "check";
    a.participants = {{"patient", r}};
    p.steps.push_back(Step::of(a));
  }
  m.plans[p.id] = p;
  DocSequence seq = planned(p.id, m);
  auto plans = sentence_plans(seq);
  REQUIRE(plans.size() == 3);
  CHECK(plans[0]->participants.at("actee").ordinal == 1);
  CHECK(plans[1]->participants.at("actee").ordinal == 2);
  CHECK(plans[2]->participants.at("actee").ordinal == 2);
  CHECK(plans[2]->participants.at("actee").form == RefForm::kDefinite);
}

TEST_CASE("linearize reports missing process entries") {
  const Model& m = fixtures::car_model();
  Lexicon lex = fixtures::resources().lexicon;
  lex.remove("wipe", "de");
  SectionSchema s = build_document(expand_plan("check-oil-level", m.plans, m.kb), m.plans, m.kb);
  try {
    linearize(s, lex, kLanguages);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingLexiconEntry);
    CHECK(e.subject() == "wipe/de");
  }
  CHECK_NOTHROW(linearize(s, fixtures::resources().lexicon, kLanguages));
}
