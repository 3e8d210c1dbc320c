// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "classify_oracle.hpp"
#include "format_check.hpp"
#include "techdoc/error.hpp"
#include "techdoc/io.hpp"
#include "techdoc/pipeline.hpp"
#include "techdoc/service.hpp"
#include "techdoc/synth.hpp"

using namespace techdoc;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kTrilingualBudgetSeconds = 5.0;
constexpr double kScaleBudgetSeconds = 10.0;
constexpr std::size_t kScaleMinElements = 1000;
constexpr std::size_t kScaleAskCount = 100;
constexpr std::size_t kRandomKbCount = 25;
constexpr std::size_t kRandomKbMaxConcepts = 50;

const std::filesystem::path kFixtures = TECHDOC_FIXTURE_DIR;
const std::filesystem::path kGold = TECHDOC_GOLD_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail.str("");
    if (!pass) detail << "; ";
    pass = false;
    detail << why;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const Model& car() {
  static const Model m = load_model_file(kFixtures / "car.json");
  return m;
}
const Model& aircraft() {
  static const Model m = load_model_file(kFixtures / "aircraft.json");
  return m;
}
const LanguageResources& resources() {
  static const LanguageResources r = LanguageResources::load(kFixtures);
  return r;
}

std::vector<std::pair<const Model*, std::string>> fixture_plans() {
  std::vector<std::pair<const Model*, std::string>> out;
  for (const Model* m : {&car(), &aircraft()}) {
    for (const auto& [id, p] : m->plans) {
      if (!p.target_device.empty()) out.emplace_back(m, id);
    }
  }
  return out;
}

std::string domain_of(const Model* m) { return m == &car() ? "car" : "aircraft"; }

Generation run(const Model& m, const std::string& plan, std::vector<std::string> langs = kLanguages,
               Mode mode = Mode::kStatic) {
  GenerationRequest req;
  req.plan_id = plan;
  req.languages = std::move(langs);
  req.mode = mode;
  return generate(m, resources(), req);
}

std::set<std::string> action_ids(const Generation& g) {
  std::set<std::string> out;
  for (const SentencePlan* p : sentence_plans(g.sequence)) {
    if (!p->action_id.empty()) out.insert(p->action_id);
  }
  return out;
}

void trilingual(Outcome& o) {
  auto t0 = Clock::now();
  Generation all = run(car(), "check-oil-level");
  std::set<std::string> digests = {all.digest};
  for (const auto& lang : kLanguages) {
    Generation one = run(car(), "check-oil-level", {lang});
    digests.insert(one.digest);
    const RealizedDocument* d = all.document(lang);
    if (d->digest != all.digest) o.fail(lang + " document digest differs");
    if (emit(*d, Format::kPlain).body != read_file(kGold / ("check-oil-level." + lang + ".txt"))) {
      o.fail(lang + " plain differs from gold");
    }
    if (emit(*d, Format::kAnnotatedJson).body + "\n" !=
        read_file(kGold / ("check-oil-level." + lang + ".json"))) {
      o.fail(lang + " annotated-json differs from gold");
    }
  }
  if (digests.size() != 1) o.fail("schema digests differ across languages");
  double s = seconds_since(t0);
  if (s >= kTrilingualBudgetSeconds) o.fail("took " + std::to_string(s) + " s");
  if (o.pass) o.detail << "digest " << all.digest << ", 3 golds match, " << s << " s";
}

void simulation(Outcome& o) {
  Model low = car();
  low.kb.tell(Assertion::filler("oil-level-1", "level-state", Value::symbol("low")));
  KnowledgeBase scratch = low.kb;
  Trace t = simulate("check-oil-level", low.plans, scratch);
  if (t.blocked()) o.fail("simulation blocked");
  const TraceEntry* add = t.find("add-oil");
  if (!add || add->status != TraceStatus::kExecuted) {
    o.fail("add-oil not executed");
  } else {
    // Replay the trace up to and including add-oil.
    KnowledgeBase replay = low.kb;
    for (const auto& e : t.entries) {
      replay.apply(e.delta);
      if (&e == add) break;
    }
    Query ok{{Atom::type(Term::of(Value::instance("oil-level-1")), "ok-level")}};
    if (!replay.ask(ok).holds) o.fail("level not ok after add-oil");
  }

  Generation stat = run(low, "check-oil-level");
  Generation sim = run(low, "check-oil-level", kLanguages, Mode::kSimulate);
  auto s_ids = action_ids(stat), t_ids = action_ids(sim);
  for (const auto& id : s_ids) {
    if (!t_ids.count(id)) o.fail("simulated document omits " + id);
  }

  GenerationRequest req;
  req.plan_id = "check-oil-level";
  req.mode = Mode::kStateFiltered;
  req.facts = {Assertion::filler("oil-level-1", "level-state", Value::symbol("ok"))};
  Generation filtered = generate(car(), resources(), req);
  if (action_ids(filtered).count("add-oil")) o.fail("state-filtered document keeps add-oil");
  if (!action_ids(run(car(), "check-oil-level")).count("add-oil")) {
    o.fail("static document lacks add-oil");
  }
  std::string en = emit(*filtered.document("en"), Format::kPlain).body;
  if (en.find("Add ") != std::string::npos) o.fail("state-filtered text still says Add");
  if (o.pass) {
    o.detail << t.entries.size() << " trace entries, " << s_ids.size()
             << " static actions all present, add-oil filtered when level=ok";
  }
}

void reclassification(Outcome& o) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= kRandomKbCount; ++seed) {
    auto doc = synth::kb_document(seed, synth::small_shape(seed));
    if (doc["concepts"].size() > kRandomKbMaxConcepts) o.fail("KB too large");
    Model m = load_model(doc);
    std::string target = synth::screw_connections(doc).front();
    m.kb.tell(Assertion::filler(target, "connection-state", Value::symbol("tight")));
    if (!m.kb.instance(target).derived_types.count("tightly-connected")) {
      o.fail("seed " + std::to_string(seed) + ": no tightly-connected");
    }
    if (classify_oracle::derived(m.kb) != classify_oracle::classify(m.kb)) {
      o.fail("seed " + std::to_string(seed) + ": oracle disagrees");
    }
    ++checked;
  }
  // The fixture's own screw connection.
  Model m = car();
  m.kb.tell(Assertion::filler("drain-bolt-1", "connection-state", Value::symbol("tight")));
  if (!m.kb.instance("drain-bolt-1").derived_types.count("tightly-connected")) {
    o.fail("drain-bolt-1 not reclassified");
  }
  if (classify_oracle::derived(m.kb) != classify_oracle::classify(m.kb)) {
    o.fail("car fixture oracle disagrees");
  }
  if (o.pass) o.detail << checked << " random KBs and the car fixture agree with the oracle";
}

void scale(Outcome& o) {
  auto doc = synth::kb_document(2024, synth::scale_shape());
  auto queries = synth::ask_workload(doc, kScaleAskCount, 99);
  auto t0 = Clock::now();
  Model m = load_model(doc);
  m.kb.reclassify_all();
  std::size_t answers = 0;
  for (const auto& q : queries) answers += m.kb.ask(q).bindings.size();
  double s = seconds_since(t0);
  std::size_t elements = m.kb.concepts().size() + m.kb.instances().size();
  if (elements < kScaleMinElements) o.fail("only " + std::to_string(elements) + " elements");
  if (queries.size() != kScaleAskCount) o.fail("wrong query count");
  if (s >= kScaleBudgetSeconds) o.fail("took " + std::to_string(s) + " s");
  // Spot-check type answers against the oracle.
  auto oracle = classify_oracle::classify(m.kb);
  for (const auto& q : queries) {
    if (q.atoms.size() != 1 || !q.atoms[0].subject.is_variable()) continue;
    std::size_t expected = 0;
    for (const auto& [id, types] : oracle) expected += types.count(q.atoms[0].concept_id);
    if (m.kb.ask(q).bindings.size() != expected) o.fail("ask disagrees with oracle");
  }
  if (o.pass) {
    o.detail << elements << " concepts+instances, " << kScaleAskCount << " asks (" << answers
             << " bindings) in " << s << " s";
  }
}

void middle_model(Outcome& o) {
  auto shared_doc = [&](const char* file) {
    for (const auto& d : read_documents(kFixtures / file)) {
      if (d.contains("concepts") && d["concepts"].size() > 0 &&
          d["concepts"][0].value("id", "") != "" && !d.contains("include") &&
          !d.contains("plans")) {
        return d;
      }
    }
    return Json();
  };
  Json from_car = shared_doc("car.json");
  Json from_aircraft = shared_doc("aircraft.json");
  Json on_disk = parse_json_text(read_file(kFixtures / "middle_model.json"));
  if (from_car.is_null() || from_car != on_disk) o.fail("car does not include the middle model");
  if (from_aircraft.is_null() || from_aircraft != on_disk) {
    o.fail("aircraft does not include the middle model");
  }
  // Loaded definitions of every shared concept and role are identical.
  auto by_id = [](const Json& arr) {
    std::map<std::string, Json> out;
    for (const auto& e : arr) out[e.at("id").get<std::string>()] = e;
    return out;
  };
  Json snap_car = snapshot(car().kb), snap_air = snapshot(aircraft().kb);
  auto car_concepts = by_id(snap_car["concepts"]), air_concepts = by_id(snap_air["concepts"]);
  auto car_roles = by_id(snap_car["roles"]), air_roles = by_id(snap_air["roles"]);
  std::size_t shared = 0;
  for (const auto& c : on_disk["concepts"]) {
    std::string id = c["id"];
    if (car_concepts[id].is_null() || car_concepts[id] != air_concepts[id]) {
      o.fail("concept " + id + " differs");
    }
    ++shared;
  }
  for (const auto& r : on_disk["roles"]) {
    std::string id = r["id"];
    if (car_roles[id].is_null() || car_roles[id] != air_roles[id]) o.fail("role " + id + " differs");
  }
  bool uses_tank = false, uses_connection = false;
  for (const auto& [id, inst] : aircraft().kb.instances()) {
    uses_tank = uses_tank || inst.derived_types.count("tank");
    uses_connection = uses_connection || inst.derived_types.count("connection");
  }
  if (!uses_tank) o.fail("aircraft has no tank instance");
  if (!uses_connection) o.fail("aircraft has no connection instance");
  Generation g = run(aircraft(), "check-hydraulic-fluid");
  if (g.documents.size() != 3) o.fail("aircraft plan not realized in three languages");
  if (o.pass) o.detail << shared << " shared concepts identical in both domains";
}

void queries(Outcome& o) {
  Service service(kFixtures, Service::default_domains());
  std::size_t pronouns = 0, content = 0, docs = 0;
  for (const auto& [model, plan] : fixture_plans()) {
    Params session{{"domain", domain_of(model)}};
    nlohmann::json body = {{"plan", plan}};
    Response gen = service.handle("POST", "/generate", session, body.dump());
    if (gen.status != 200) {
      o.fail(plan + ": generate " + std::to_string(gen.status));
      continue;
    }
    Generation g = run(*model, plan);
    for (const auto& doc : g.documents) {
      ++docs;
      std::string id = plan + "/static/" + doc.language;
      auto sentences = doc.sentences();
      for (std::size_t s = 0; s < sentences.size(); ++s) {
        for (const auto& t : sentences[s]->tokens) {
          if (!t.content()) continue;
          std::string span = std::to_string(s) + ":" + std::to_string(t.begin) + "-" +
                             std::to_string(t.end);
          Params q = session;
          q["doc"] = id;
          q["span"] = span;
          if (t.form == "pronoun") {
            ++pronouns;
            Response r = service.handle("GET", "/query/antecedent", q, "");
            if (r.status != 200) {
              o.fail(id + " " + span + ": antecedent " + std::to_string(r.status));
            } else {
              const auto& a = r.body["antecedent"];
              std::string as = a["span"];
              int sent = std::stoi(as.substr(0, as.find(':')));
              bool earlier = static_cast<std::size_t>(sent) < s;
              if (!earlier || a["kb"] != t.kb_id) o.fail(id + " " + span + ": bad antecedent");
            }
          }
          ++content;
          Response r = service.handle("GET", "/query/align", q, "");
          if (r.status != 200) {
            o.fail(id + " " + span + ": align " + std::to_string(r.status));
            continue;
          }
          for (const auto& other : kLanguages) {
            if (other == doc.language) continue;
            if (r.body["counterparts"][other]["spans"].empty()) {
              o.fail(id + " " + span + " '" + t.surface + "': no " + other + " counterpart");
            }
          }
        }
      }
    }
  }
  if (pronouns == 0) o.fail("no pronouns found");
  if (o.pass) {
    o.detail << pronouns << " pronouns resolved, " << content << " content tokens aligned over "
             << docs << " documents";
  }
}

void formats(Outcome& o) {
  std::size_t docs = 0;
  for (const auto& [model, plan] : fixture_plans()) {
    Generation g = run(*model, plan);
    for (const auto& d : g.documents) {
      std::string where = plan + "." + d.language;
      ++docs;
      std::string err = format_check::xml_well_formed(emit(d, Format::kHtml).body);
      if (!err.empty()) o.fail(where + " html: " + err);
      err = format_check::latex_valid(emit(d, Format::kLatex).body);
      if (!err.empty()) o.fail(where + " latex: " + err);
      auto parsed = parse_json_text(emit(d, Format::kAnnotatedJson).body);
      if (render_plain(from_annotated_json(parsed)) != read_file(kGold / (where + ".txt"))) {
        o.fail(where + " annotated-json does not re-render to the plain snapshot");
      }
    }
  }
  if (o.pass) o.detail << docs << " documents valid in html, latex and annotated-json";
}

void menus(Outcome& o) {
  Service service(kFixtures, Service::default_domains());
  const KnowledgeBase& kb = car().kb;
  std::size_t contexts = 0, offered = 0;
  for (const auto& [process, c] : kb.concepts()) {
    if (process == "action" || !kb.subsumes("action", process)) continue;
    for (const auto& role : kParticipantRoles) {
      ++contexts;
      Response r = service.handle("GET", "/menu", {{"process", process}, {"role", role}}, "");
      if (r.status != 200) {
        o.fail(process + "/" + role + ": " + std::to_string(r.status));
        continue;
      }
      std::set<std::string> got, expected;
      for (const auto& opt : r.body["options"]) got.insert(opt["id"].get<std::string>());
      for (const auto& [id, inst] : kb.instances()) {
        if (participant_fits(process, role, id, kb)) expected.insert(id);
      }
      offered += got.size();
      if (got != expected) o.fail(process + "/" + role + " differs from oracle");
    }
  }
  if (contexts == 0) o.fail("no role contexts");
  if (o.pass) o.detail << contexts << " role contexts, " << offered << " options, all equal";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"trilingual-pipeline", trilingual},
      {"simulation-coherence", simulation},
      {"reclassification", reclassification},
      {"scale", scale},
      {"middle-model-reuse", middle_model},
      {"query-correctness", queries},
      {"format-validity", formats},
      {"menu-soundness", menus},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
