#include "techdoc/lexicon.hpp"

#include <algorithm>
#include <set>

#include "techdoc/doc_planner.hpp"
#include "techdoc/io.hpp"
#include "techdoc/sentence_planner.hpp"

namespace techdoc {

namespace {

std::string str(const Json& j, const char* key) {
  if (j.contains(key) && j.at(key).is_string()) return j.at(key).get<std::string>();
  return {};
}

bool flag(const Json& j, const char* key) {
  return j.contains(key) && j.at(key).is_boolean() && j.at(key).get<bool>();
}

LexForm form_from_json(const Json& j) {
  LexForm f;
  f.lemma = str(j, "lemma");
  f.pos = str(j, "pos");
  f.gender = str(j, "gender");
  f.klass = str(j, "class");
  f.particle = str(j, "particle");
  f.reflexive = flag(j, "reflexive");
  f.mass = flag(j, "mass");
  f.h_aspire = flag(j, "h-aspire");
  f.copula = str(j, "copula");
  f.copula_class = str(j, "copula-class");
  f.predicate = str(j, "predicate");
  f.prep = str(j, "prep");
  f.case_ = str(j, "case");
  f.title = str(j, "title");
  if (j.contains("roles")) {
    for (const auto& [role, r] : j.at("roles").items()) {
      f.roles[role] = RolePreposition{str(r, "prep"), str(r, "case")};
    }
  }
  if (j.contains("modifier")) {
    const Json& m = j.at("modifier");
    f.modifier = Modifier{str(m, "lemma"), str(m, "class"), str(m, "position") != "post"};
  }
  return f;
}

Affix parse_affix(const std::string& spec) {
  auto gt = spec.find('>');
  if (gt == std::string::npos) return Affix{"", spec};
  return Affix{spec.substr(0, gt), spec.substr(gt + 1)};
}

}  // namespace

Lexicon Lexicon::from_json(const Json& j) {
  Lexicon lex;
  const Json& arr = j.is_object() && j.contains("entries") ? j.at("entries") : j;
  if (!arr.is_array()) throw Error(ErrorCode::kParseError, "lexicon must be an array of entries");
  for (const auto& ej : arr) {
    LexEntry e;
    e.concept_id = str(ej, "concept");
    if (e.concept_id.empty()) throw Error(ErrorCode::kParseError, "lexicon entry without concept");
    for (const auto& [key, val] : ej.items()) {
      if (key == "concept") continue;
      e.forms[key] = form_from_json(val);
    }
    if (lex.entries_.count(e.concept_id)) {
      throw Error(ErrorCode::kDuplicateId, "duplicate lexicon entry '" + e.concept_id + "'",
                  e.concept_id);
    }
    lex.add(std::move(e));
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  return from_json(parse_json_text(read_file(path), path.string()));
}

const LexForm* Lexicon::find(const std::string& concept_id, const std::string& language) const {
  auto it = entries_.find(concept_id);
  if (it == entries_.end()) return nullptr;
  auto f = it->second.forms.find(language);
  return f == it->second.forms.end() ? nullptr : &f->second;
}

std::pair<std::string, const LexForm*> Lexicon::find_for_instance(
    const std::string& instance, const std::string& language, const KnowledgeBase& kb) const {
  const Instance& inst = kb.instance(instance);
  std::vector<std::string> candidates;
  for (const auto& t : inst.derived_types) {
    const LexForm* f = find(t, language);
    if (t != kThing && f && f->pos == "noun") candidates.push_back(t);
  }
  for (const auto& c : candidates) {
    bool most_specific = std::none_of(candidates.begin(), candidates.end(), [&](const auto& d) {
      return d != c && kb.ancestors(d).count(c);
    });
    if (most_specific) return {c, find(c, language)};
  }
  return {"", nullptr};
}

void Lexicon::add(LexEntry e) {
  auto& slot = entries_[e.concept_id];
  slot.concept_id = e.concept_id;
  for (auto& [lang, f] : e.forms) slot.forms[lang] = std::move(f);
}

void Lexicon::remove(const std::string& concept_id, const std::string& language) {
  auto it = entries_.find(concept_id);
  if (it == entries_.end()) return;
  it->second.forms.erase(language);
  if (it->second.forms.empty()) entries_.erase(it);
}

std::string Features::key() const {
  std::string k;
  for (const auto* part : {&mood, &person, &decl, &case_, &number, &gender}) {
    if (part->empty()) continue;
    if (!k.empty()) k += '.';
    k += *part;
  }
  return k;
}

Morphology Morphology::from_json(const Json& j) {
  Morphology m;
  m.language_ = str(j, "language");
  if (j.contains("classes")) {
    for (const auto& [name, cj] : j.at("classes").items()) {
      InflectionClass c;
      if (cj.contains("rules")) {
        for (const auto& [key, spec] : cj.at("rules").items()) {
          c.rules[key] = parse_affix(spec.get<std::string>());
        }
      }
      if (cj.contains("exceptions")) {
        for (const auto& [lemma, forms] : cj.at("exceptions").items()) {
          for (const auto& [key, form] : forms.items()) {
            c.exceptions[lemma][key] = form.get<std::string>();
          }
        }
      }
      m.classes_[name] = std::move(c);
    }
  }
  if (j.contains("words")) {
    for (const auto& [table, words] : j.at("words").items()) {
      for (const auto& [key, w] : words.items()) m.words_[table][key] = w.get<std::string>();
    }
  }
  if (j.contains("ordinals")) m.ordinals_ = j.at("ordinals").get<std::vector<std::string>>();
  m.ordinal_class_ = str(j, "ordinal-class");
  if (j.contains("contractions")) {
    for (const auto& c : j.at("contractions")) {
      m.contractions_.emplace_back(c.at(0).get<std::string>(), c.at(1).get<std::string>());
    }
  }
  if (j.contains("elision")) m.elidable_ = j.at("elision").get<std::vector<std::string>>();
  if (j.contains("elision-before")) {
    m.elision_before_ =
        j.at("elision-before").get<std::map<std::string, std::vector<std::string>>>();
  }
  if (j.contains("vowel-alternation")) {
    m.vowel_alternation_ = j.at("vowel-alternation").get<std::map<std::string, std::string>>();
  }
  return m;
}

Morphology Morphology::load(const std::filesystem::path& path) {
  return from_json(parse_json_text(read_file(path), path.string()));
}

std::string Morphology::inflect(const std::string& lemma, const std::string& klass,
                                const Features& f) const {
  return inflect(lemma, klass, f.key());
}

std::string Morphology::inflect(const std::string& lemma, const std::string& klass,
                                const std::string& key) const {
  auto gap = [&](const std::string& why) {
    return Error(ErrorCode::kMorphologyGap,
                 language_ + " class '" + klass + "' " + why + " for {" + key + "} ('" + lemma +
                     "')",
                 klass + "/" + key);
  };
  auto c = classes_.find(klass);
  if (c == classes_.end()) throw gap("does not exist");
  auto ex = c->second.exceptions.find(lemma);
  if (ex != c->second.exceptions.end()) {
    auto form = ex->second.find(key);
    if (form != ex->second.end()) return form->second;
  }
  auto r = c->second.rules.find(key);
  if (r == c->second.rules.end()) throw gap("has no rule");
  const Affix& a = r->second;
  if (lemma.size() < a.strip.size() ||
      lemma.compare(lemma.size() - a.strip.size(), a.strip.size(), a.strip) != 0) {
    throw gap("cannot strip '" + a.strip + "'");
  }
  return lemma.substr(0, lemma.size() - a.strip.size()) + a.append;
}

const std::string& Morphology::word(const std::string& table, const std::string& key) const {
  auto t = words_.find(table);
  if (t != words_.end()) {
    auto w = t->second.find(key);
    if (w != t->second.end()) return w->second;
  }
  throw Error(ErrorCode::kMorphologyGap,
              language_ + " table '" + table + "' has no entry for {" + key + "}",
              table + "/" + key);
}

bool Morphology::has_word(const std::string& table, const std::string& key) const {
  auto t = words_.find(table);
  return t != words_.end() && t->second.count(key);
}

std::string Morphology::ordinal_lemma(int n) const {
  if (n < 1 || static_cast<std::size_t>(n) > ordinals_.size()) {
    throw Error(ErrorCode::kMorphologyGap,
                language_ + " has no ordinal for " + std::to_string(n), "ordinal");
  }
  return ordinals_[n - 1];
}

std::string inflect(const Morphology& m, const std::string& lemma, const std::string& klass,
                    const Features& f) {
  return m.inflect(lemma, klass, f);
}

LanguageResources LanguageResources::load(const std::filesystem::path& fixture_dir) {
  LanguageResources r;
  r.lexicon = Lexicon::load(fixture_dir / "lexicon.json");
  for (const auto& lang : kLanguages) {
    r.morphology[lang] = Morphology::load(fixture_dir / "morphology" / (lang + ".json"));
  }
  return r;
}

const Morphology& LanguageResources::morph(const std::string& language) const {
  auto it = morphology.find(language);
  if (it == morphology.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported language '" + language + "'", language);
  }
  return it->second;
}

std::vector<CoverageGap> coverage_report(const Lexicon& lexicon, const KnowledgeBase& kb,
                                         const PlanLibrary& plans,
                                         const std::vector<std::string>& languages) {
  std::map<std::string, std::set<std::string>> missing;
  auto need = [&](const std::string& concept_id) {
    for (const auto& lang : languages) {
      if (!lexicon.find(concept_id, lang)) missing[concept_id].insert(lang);
    }
    missing.try_emplace(concept_id);
  };
  auto need_instance = [&](const std::string& inst) {
    if (!kb.has_instance(inst)) return;
    const auto& types = kb.most_specific_types(inst);
    std::string named = types.empty() ? std::string(kThing) : *types.begin();
    for (const auto& lang : languages) {
      if (!lexicon.find_for_instance(inst, lang, kb).second) missing[named].insert(lang);
    }
  };
  for (const auto& [id, plan] : plans) {
    if (plan.target_device.empty()) continue;
    need(id);
    SectionSchema schema = build_document(expand_plan(id, plans, kb), plans, kb);
    DocSequence seq = linearize(schema);
    for (const auto* sp : sentence_plans(seq)) {
      need(sp->process);
      for (const auto& [role, re] : sp->participants) need_instance(re.referent);
    }
  }
  std::vector<CoverageGap> out;
  for (const auto& [c, langs] : missing) {
    if (!langs.empty()) out.push_back({c, std::vector<std::string>(langs.begin(), langs.end())});
  }
  return out;
}

}  // namespace techdoc
