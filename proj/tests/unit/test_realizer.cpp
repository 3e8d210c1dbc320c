#include <doctest.h>

#include "fixtures.hpp"
#include <set>
#include <tuple>

#include "techdoc/realizer.hpp"
#include "techdoc/text.hpp"

using namespace techdoc;

namespace {

std::vector<std::string> texts(const std::string& plan, const std::string& lang,
                               const Model& m = fixtures::car_model()) {
  SectionSchema s = build_document(expand_plan(plan, m.plans, m.kb), m.plans, m.kb);
  DocSequence seq = plan_references(linearize(s), m.kb);
  RealizedDocument doc = realize_document(seq, lang, fixtures::resources(), m.kb);
  std::vector<std::string> out;
  for (const auto* sent : doc.sentences()) out.push_back(sent->text);
  return out;
}

}  // namespace

TEST_CASE("check-oil-level in three languages") {
  CHECK(texts("check-oil-level", "en") ==
        std::vector<std::string>{"Checking the engine oil level",
                                 "The dipstick is in the engine compartment.",
                                 "The engine compartment is under the bonnet.",
                                 "Engine oil is required.",
                                 "Open the bonnet.",
                                 "Pull out the dipstick.",
                                 "Wipe it with a clean cloth.",
                                 "Reinsert it.",
                                 "Pull it out.",
                                 "Read the engine oil level on the dipstick.",
                                 "If it is low, add the engine oil."});
  CHECK(texts("check-oil-level", "de") ==
        std::vector<std::string>{"Motorölstand prüfen",
                                 "Der Ölmessstab befindet sich im Motorraum.",
                                 "Der Motorraum befindet sich unter der Motorhaube.",
                                 "Motoröl wird benötigt.",
                                 "Öffnen Sie die Motorhaube.",
                                 "Ziehen Sie den Ölmessstab heraus.",
                                 "Wischen Sie ihn mit einem sauberen Tuch ab.",
                                 "Führen Sie ihn ein.",
                                 "Ziehen Sie ihn heraus.",
                                 "Lesen Sie den Motorölstand am Ölmessstab ab.",
                                 "Wenn er niedrig ist, füllen Sie das Motoröl nach."});
  CHECK(texts("check-oil-level", "fr") ==
        std::vector<std::string>{"Contrôle du niveau d'huile moteur",
                                 "La jauge se trouve dans le compartiment moteur.",
                                 "Le compartiment moteur se trouve sous le capot.",
                                 "De l'huile moteur est nécessaire.",
                                 "Ouvrez le capot.",
                                 "Retirez la jauge.",
                                 "Essuyez-la avec un chiffon propre.",
                                 "Réinsérez-la.",
                                 "Retirez-la.",
                                 "Lisez le niveau d'huile moteur sur la jauge.",
                                 "S'il est bas, ajoutez l'huile moteur."});
}

namespace {

SentencePlan check_level() {
  SentencePlan sp;
  sp.id = 1;
  sp.process = "check";
  sp.mood = Mood::kImperative;
  sp.participants["actee"] = ReferringExpression{"oil-level-1", RefForm::kDefinite, {}, 0};
  return sp;
}

std::vector<AnnotatedSentence> all_sentences(const Model& m, const std::string& lang) {
  std::vector<AnnotatedSentence> out;
  for (const auto& [id, plan] : m.plans) {
    if (plan.target_device.empty()) continue;
    SectionSchema s = build_document(expand_plan(id, m.plans, m.kb), m.plans, m.kb);
    RealizedDocument doc =
        realize_document(plan_references(linearize(s), m.kb), lang, fixtures::resources(), m.kb);
    for (const auto* sent : doc.sentences()) out.push_back(*sent);
  }
  return out;
}

}  // namespace

TEST_CASE("single plan in three languages") {
  const auto& res = fixtures::resources();
  const KnowledgeBase& kb = fixtures::car_model().kb;
  CHECK(realize(check_level(), "en", res, kb).text == "Check the engine oil level.");
  CHECK(realize(check_level(), "de", res, kb).text == "Prüfen Sie den Motorölstand.");
  CHECK(realize(check_level(), "fr", res, kb).text == "Vérifiez le niveau d'huile moteur.");
  auto de = realize(check_level(), "de", res, kb);
  REQUIRE(de.tokens.size() == 5);
  CHECK(de.tokens[2].surface == "den");
  CHECK(de.tokens[2].features == "determiners.def/acc.sg.m");
}

TEST_CASE("pronoun token links to its referent") {
  const Model& m = fixtures::car_model();
  SectionSchema s = build_document(expand_plan("check-oil-level", m.plans, m.kb), m.plans, m.kb);
  DocSequence seq = plan_references(linearize(s), m.kb);
  const SentencePlan* wipe = sentence_plans(seq)[5];
  AnnotatedSentence en = realize(*wipe, "en", fixtures::resources(), m.kb);
  CHECK(en.text == "Wipe it with a clean cloth.");
  REQUIRE(en.tokens.size() == 7);
  CHECK(en.tokens[1].surface == "it");
  CHECK(en.tokens[1].kb_id == "dipstick-1");
  CHECK(en.tokens[1].form == "pronoun");
  CHECK(en.tokens[1].begin == 5);
  CHECK(en.tokens[1].end == 7);
  CHECK(en.tokens[0].kb_id == "wipe");
  CHECK(en.tokens[2].kb_id.empty());
}

TEST_CASE("headings") {
  CHECK(realize_heading("refill-washer-fluid", "de", fixtures::resources()).text ==
        "Waschwasser nachfüllen");
  CHECK_THROWS_AS(realize_heading("read-dipstick", "en", fixtures::resources()), Error);
}

TEST_CASE("token spans reconstruct the text") {
  for (const auto& model : {fixtures::car(), fixtures::aircraft()}) {
    for (const auto& lang : kLanguages) {
      for (const auto& s : all_sentences(model, lang)) {
        std::string rebuilt;
        std::size_t last_end = 0;
        for (const auto& t : s.tokens) {
          rebuilt += t.separator + t.surface;
          CHECK(t.begin >= last_end);
          CHECK(t.end > t.begin);
          CHECK(text::substr_cp(s.text, t.begin, t.end) == t.surface);
          last_end = t.end;
        }
        CHECK(rebuilt == s.text);
        CHECK((s.text.back() == '.' || s.plan_id == 0));
        CHECK(text::capitalize_first(s.text) == s.text);
      }
    }
  }
}

TEST_CASE("realization is deterministic") {
  for (const auto& lang : kLanguages) {
    auto a = all_sentences(fixtures::car_model(), lang);
    auto b = all_sentences(fixtures::car_model(), lang);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(sentence_to_json(a[i]).dump() == sentence_to_json(b[i]).dump());
      CHECK(sentence_to_json(sentence_from_json(sentence_to_json(a[i]))) ==
            sentence_to_json(a[i]));
    }
  }
}

TEST_CASE("the three languages share plan ids and referents") {
  for (const auto& model : {fixtures::car(), fixtures::aircraft()}) {
    auto en = all_sentences(model, "en");
    for (const auto& lang : {"de", "fr"}) {
      auto other = all_sentences(model, lang);
      REQUIRE(other.size() == en.size());
      for (std::size_t i = 0; i < en.size(); ++i) {
        CHECK(other[i].plan_id == en[i].plan_id);
        auto refs = [](const AnnotatedSentence& s) {
          std::multiset<std::tuple<std::string, std::string, int>> out;
          for (const auto& m : referent_mentions(s)) out.insert({m.referent, m.role, m.plan_id});
          return out;
        };
        CHECK_MESSAGE(refs(other[i]) == refs(en[i]), en[i].text);
      }
    }
  }
}

TEST_CASE("German determiners follow the case of their slot") {
  const auto& res = fixtures::resources();
  for (const auto& model : {fixtures::car(), fixtures::aircraft()}) {
    for (const auto& [id, plan] : model.plans) {
      if (plan.target_device.empty()) continue;
      SectionSchema s = build_document(expand_plan(id, model.plans, model.kb), model.plans, model.kb);
      DocSequence seq = plan_references(linearize(s), model.kb);
      for (const auto* sp : sentence_plans(seq)) {
        SentencePlan alone = *sp;
        alone.condition.reset();
        AnnotatedSentence out = realize(alone, "de", res, model.kb);
        const LexForm* verb = res.lexicon.find(sp->process, "de");
        for (const auto& t : out.tokens) {
          if (t.features.rfind("determiners.", 0) != 0 && t.features.rfind("pronouns.", 0) != 0) {
            continue;
          }
          std::string expected;
          if (t.role == "actee") {
            expected = sp->mood == Mood::kImperative ? "acc" : "nom";
          } else if (t.role == "location" && verb->pos == "relation") {
            expected = verb->case_;
          } else {
            expected = verb->roles.at(t.role).case_;
          }
          std::string key = t.features.substr(t.features.find('/') + 1);
          CHECK_MESSAGE(key.rfind(expected + ".sg.", 0) == 0, out.text, " ", t.surface);
          const LexForm* n = res.lexicon.find_for_instance(t.kb_id, "de", model.kb).second;
          CHECK(key == expected + ".sg." + n->gender);
        }
      }
    }
  }
}

TEST_CASE("ordinals disambiguate same-named referents") {
  Model m = fixtures::car();
  m.kb.create_instance("washer-reservoir-2", {"washer-reservoir"});
  Plan p;
  p.id = "two-reservoirs";
  p.target_device = "car-1";
  for (const auto* r : {"washer-reservoir-1", "washer-reservoir-2", "washer-reservoir-2"}) {
    PlanAction a;
    a.id = "check-" + std::to_string(p.steps.size());
    a.process = "check";
    a.participants = {{"patient", r}};
    p.steps.push_back(Step::of(a));
  }
  m.plans[p.id] = p;
  SectionSchema s = build_document(expand_plan(p.id, m.plans, m.kb), m.plans, m.kb);
  DocSequence seq = plan_references(linearize(s), m.kb);
  std::vector<std::string> en, de, fr;
  for (const auto* sp : sentence_plans(seq)) {
    auto e = realize(*sp, "en", fixtures::resources(), m.kb);
    for (const auto& t : e.tokens) CHECK(t.form != "pronoun");
    en.push_back(e.text);
    de.push_back(realize(*sp, "de", fixtures::resources(), m.kb).text);
    fr.push_back(realize(*sp, "fr", fixtures::resources(), m.kb).text);
  }
  CHECK(en == std::vector<std::string>{"Check the first washer fluid reservoir.",
                                       "Check the second washer fluid reservoir.",
                                       "Check the second washer fluid reservoir."});
  CHECK(de[2] == "Prüfen Sie den zweiten Waschwasserbehälter.");
  CHECK(fr[2] == "Vérifiez le deuxième réservoir de lave-glace.");
}

TEST_CASE("realization errors") {
  const Model& m = fixtures::car_model();
  LanguageResources res = fixtures::resources();
  res.lexicon.remove("engine-oil-level", "de");
  try {
    realize(check_level(), "de", res, m.kb);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingLexiconEntry);
    CHECK(e.subject() == "engine-oil-level/de");
  }
  res = fixtures::resources();
  Json fr = parse_json_text(read_file(fixtures::dir() / "morphology" / "fr.json"), "fr.json");
  fr["classes"]["v-er"]["rules"].erase("imp.2pl");
  res.morphology["fr"] = Morphology::from_json(fr);
  try {
    realize(check_level(), "fr", res, m.kb);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMorphologyGap);
    CHECK(e.subject() == "v-er/imp.2pl");
  }
  CHECK_THROWS_AS(realize(check_level(), "it", fixtures::resources(), m.kb), Error);
}
