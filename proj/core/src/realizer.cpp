#include "techdoc/realizer.hpp"

#include <algorithm>

#include "techdoc/error.hpp"
#include "techdoc/text.hpp"

namespace techdoc {

namespace {

using Json = nlohmann::json;

struct Word {
  std::string text;
  std::string kb;
  std::string role;
  std::string form;
  int plan = 0;
  std::string sep = " ";
  bool det = false;
  bool no_elide = false;
  bool h_aspire = false;
  bool punct = false;
  std::string features;
};

enum class Slot { kSubject, kObject, kOblique };

Error missing_entry(const std::string& concept_id, const std::string& lang) {
  return Error(ErrorCode::kMissingLexiconEntry,
               "no " + lang + " lexicon entry for '" + concept_id + "'", concept_id + "/" + lang);
}

class SentenceRealizer {
 public:
  SentenceRealizer(const std::string& lang, const LanguageResources& res, const KnowledgeBase& kb)
      : lang_(lang), res_(res), m_(res.morph(lang)), kb_(kb) {}

  AnnotatedSentence run(const SentencePlan& sp) {
    if (sp.condition) {
      plan_ = sp.condition->id;
      function_word(m_.word("function", "if"));
      clause(*sp.condition, true);
      punct(",");
    }
    plan_ = sp.id;
    clause(sp, false);
    punct(".");
    AnnotatedSentence out = finish();
    out.plan_id = sp.id;
    out.action_id = sp.action_id;
    return out;
  }

 private:
  struct Noun {
    std::string concept_id;
    const LexForm* form;
  };

  void add(const std::string& text, const std::string& kb, const std::string& role,
           const std::string& form, bool det = false, bool h_aspire = false) {
    bool first = true;
    for (const auto& part : text::split(text, ' ')) {
      if (part.empty()) continue;
      Word w;
      w.text = part;
      w.kb = kb;
      w.role = role;
      w.form = form;
      w.plan = plan_;
      w.det = det;
      w.h_aspire = first && h_aspire;
      words_.push_back(std::move(w));
      first = false;
    }
  }

  void tag(std::size_t from, const std::string& features) {
    for (std::size_t i = from; i < words_.size(); ++i) words_[i].features = features;
  }

  void function_word(const std::string& text) { add(text, "", "", "function"); }

  void punct(const std::string& p) {
    Word w;
    w.text = p;
    w.form = "punct";
    w.plan = plan_;
    w.sep = "";
    w.punct = true;
    words_.push_back(std::move(w));
  }

  Noun noun(const std::string& instance) {
    if (!kb_.has_instance(instance)) {
      throw Error(ErrorCode::kUnresolvedParticipant, "unknown referent '" + instance + "'",
                  instance);
    }
    auto [c, f] = res_.lexicon.find_for_instance(instance, lang_, kb_);
    if (!f) {
      const auto& types = kb_.most_specific_types(instance);
      throw missing_entry(types.empty() ? std::string(kThing) : *types.begin(), lang_);
    }
    return {c, f};
  }

  std::string adjective_key(const std::string& decl, const std::string& case_,
                            const std::string& gender) const {
    if (lang_ == "de") return decl + "." + case_ + ".sg." + gender;
    if (lang_ == "fr") return "sg." + gender;
    return {};
  }

  std::string adjective(const std::string& lemma, const std::string& klass,
                        const std::string& decl, const std::string& case_,
                        const std::string& gender) {
    return m_.inflect(lemma, klass, adjective_key(decl, case_, gender));
  }

  void np(const ReferringExpression& re, const std::string& role, const std::string& case_,
          Slot slot) {
    Noun n = noun(re.referent);
    const LexForm& f = *n.form;
    const std::string form(ref_form_name(re.form));
    const std::string& g = f.gender;
    if (re.form == RefForm::kPronoun) {
      std::string table = "pronouns.personal";
      std::string key;
      if (lang_ == "de") {
        key = case_ + ".sg." + g;
      } else if (lang_ == "fr") {
        table = slot == Slot::kSubject  ? "pronouns.subject"
                : slot == Slot::kObject ? "pronouns.object"
                                        : "pronouns.stressed";
        key = "sg." + g;
      } else {
        key = std::string(slot == Slot::kSubject ? "nom" : "acc") + ".sg";
      }
      std::size_t at = words_.size();
      add(m_.word(table, key), re.referent, role, form);
      tag(at, table + "/" + key);
      return;
    }
    bool definite = re.form == RefForm::kDefinite;
    bool bare = re.form == RefForm::kBare || (!definite && f.mass);
    std::string decl = "strong";
    auto det = [&](const std::string& table, const std::string& key) {
      std::size_t at = words_.size();
      add(m_.word(table, key), re.referent, role, form, true);
      tag(at, table + "/" + key);
    };
    auto modifier = [&](const std::string& lemma, const std::string& klass) {
      std::size_t at = words_.size();
      add(adjective(lemma, klass, decl, case_, g), re.referent, role, form);
      tag(at, klass + "/" + adjective_key(decl, case_, g));
    };
    if (lang_ == "de") {
      if (definite) {
        det("determiners.def", case_ + ".sg." + g);
        decl = "weak";
      } else if (!bare) {
        det("determiners.indef", case_ + ".sg." + g);
        decl = "mixed";
      }
    } else if (lang_ == "fr") {
      if (definite) {
        det("determiners.def", "sg." + g);
      } else if (!f.mass) {
        det("determiners.indef", "sg." + g);
      } else {
        add(m_.word("function", "partitive"), re.referent, role, form);
        det("determiners.def", "sg." + g);
      }
    } else if (definite) {
      det("determiners.def", "sg");
    } else if (!bare) {
      det("determiners.indef", "sg");
    }
    if (re.ordinal > 0) modifier(m_.ordinal_lemma(re.ordinal), m_.ordinal_class());
    if (f.modifier && f.modifier->prenominal) modifier(f.modifier->lemma, f.modifier->klass);
    std::string key = lang_ == "de" ? case_ + ".sg" : "sg";
    std::size_t at = words_.size();
    add(m_.inflect(f.lemma, f.klass, key), re.referent, role, form, false, f.h_aspire);
    tag(at, f.klass + "/" + key);
    if (f.modifier && !f.modifier->prenominal) modifier(f.modifier->lemma, f.modifier->klass);
  }

  void clause(const SentencePlan& sp, bool subordinate) {
    const LexForm* f = res_.lexicon.find(sp.process, lang_);
    if (!f) throw missing_entry(sp.process, lang_);
    if (sp.mood == Mood::kImperative) {
      if (sp.negated) {
        throw Error(ErrorCode::kInvalidArgument, "negated instructions are not supported",
                    sp.process);
      }
      imperative(sp, *f);
    } else {
      declarative(sp, *f, subordinate);
    }
  }

  void obliques(const SentencePlan& sp, const LexForm& f) {
    for (const auto& role : kSemanticRoles) {
      if (role == "actor" || role == "actee") continue;
      auto it = sp.participants.find(role);
      if (it == sp.participants.end()) continue;
      auto rp = f.roles.find(role);
      if (rp == f.roles.end()) {
        throw Error(ErrorCode::kMissingLexiconEntry,
                    "no " + lang_ + " preposition for role '" + role + "' of '" + sp.process + "'",
                    sp.process + "/" + lang_);
      }
      function_word(rp->second.prep);
      np(it->second, role, rp->second.case_.empty() ? "dat" : rp->second.case_, Slot::kOblique);
    }
  }

  void imperative(const SentencePlan& sp, const LexForm& f) {
    const char* key = lang_ == "de" ? "imp.3pl" : lang_ == "fr" ? "imp.2pl" : "imp";
    add(m_.inflect(f.lemma, f.klass, key), sp.process, "process", "verb");
    tag(words_.size() - 1, f.klass + "/" + key);
    auto actee = sp.participants.find("actee");
    bool has_actee = actee != sp.participants.end();
    bool pronoun = has_actee && actee->second.form == RefForm::kPronoun;
    auto particle = [&] { add(f.particle, sp.process, "process", "verb"); };
    if (lang_ == "de") {
      add(m_.word("function", "polite"), "", "actor", "function");
      if (has_actee) np(actee->second, "actee", "acc", Slot::kObject);
      obliques(sp, f);
      if (!f.particle.empty()) particle();
    } else if (lang_ == "fr") {
      if (has_actee) {
        std::size_t at = words_.size();
        np(actee->second, "actee", "acc", Slot::kObject);
        if (pronoun) {
          words_[at].sep = "-";
          words_[at].no_elide = true;
        }
      }
      obliques(sp, f);
    } else {
      if (!f.particle.empty() && !pronoun) particle();
      if (has_actee) np(actee->second, "actee", "acc", Slot::kObject);
      if (!f.particle.empty() && pronoun) particle();
      obliques(sp, f);
    }
  }

  void declarative(const SentencePlan& sp, const LexForm& f, bool subordinate) {
    auto subject = sp.participants.find("actee");
    if (subject == sp.participants.end()) {
      throw Error(ErrorCode::kInvalidArgument, "'" + sp.process + "' needs an actee",
                  sp.process);
    }
    const std::string gender = noun(subject->second.referent).form->gender;
    auto finite = [&] {
      add(m_.inflect(f.copula, f.copula_class, "pres.3sg"), sp.process, "process", "verb");
      tag(words_.size() - 1, f.copula_class + "/pres.3sg");
    };
    auto reflexive = [&] {
      if (f.reflexive) add(m_.word("function", "refl"), sp.process, "process", "verb");
    };
    auto complement = [&] {
      if (f.pos == "adj") {
        std::string key = lang_ == "de" ? "pred" : lang_ == "fr" ? "sg." + gender : "";
        add(m_.inflect(f.lemma, f.klass, key), sp.process, "process", "adj");
      } else if (f.pos == "relation") {
        auto loc = sp.participants.find("location");
        if (loc == sp.participants.end()) {
          throw Error(ErrorCode::kInvalidArgument, "'" + sp.process + "' needs a location",
                      sp.process);
        }
        function_word(f.prep);
        np(loc->second, "location", f.case_.empty() ? "dat" : f.case_, Slot::kOblique);
      } else if (f.pos == "predicative") {
        add(f.predicate, sp.process, "process", "adj");
      } else {
        throw Error(ErrorCode::kInvalidArgument,
                    "'" + sp.process + "' (" + f.pos + ") cannot head a statement", sp.process);
      }
    };
    np(subject->second, "actee", "nom", Slot::kSubject);
    if (lang_ == "de") {
      if (!subordinate) finite();
      reflexive();
      if (sp.negated) function_word(m_.word("function", "not"));
      complement();
      if (subordinate) finite();
    } else if (lang_ == "fr") {
      if (sp.negated) function_word(m_.word("function", "not"));
      reflexive();
      finite();
      if (sp.negated) function_word(m_.word("function", "not2"));
      complement();
    } else {
      finite();
      if (sp.negated) function_word(m_.word("function", "not"));
      complement();
    }
  }

  void elide() {
    const auto& elidable = m_.elidable();
    for (std::size_t i = 0; i + 1 < words_.size(); ++i) {
      Word& w = words_[i];
      Word& next = words_[i + 1];
      if (next.punct || w.no_elide || next.sep != " ") continue;
      bool vowel = text::starts_with_vowel_sound(next.text, !next.h_aspire);
      bool elide = vowel && std::find(elidable.begin(), elidable.end(), w.text) != elidable.end();
      auto before = m_.elision_before().find(w.text);
      if (before != m_.elision_before().end() &&
          std::find(before->second.begin(), before->second.end(), next.text) !=
              before->second.end()) {
        elide = true;
      }
      if (elide) {
        w.text = w.text.substr(0, w.text.size() - 1) + "'";
        next.sep = "";
      }
    }
  }

  void contract() {
    for (std::size_t i = 0; i + 1 < words_.size(); ++i) {
      Word& next = words_[i + 1];
      if (!next.det || next.sep != " ") continue;
      std::string pair = words_[i].text + " " + next.text;
      for (const auto& [from, to] : m_.contractions()) {
        if (pair != from) continue;
        Word merged = next;
        merged.text = to;
        merged.sep = words_[i].sep;
        words_[i] = std::move(merged);
        words_.erase(words_.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        break;
      }
    }
  }

  void alternate() {
    for (std::size_t i = 0; i + 1 < words_.size(); ++i) {
      auto it = m_.vowel_alternation().find(words_[i].text);
      if (it != m_.vowel_alternation().end() &&
          text::starts_with_vowel_sound(words_[i + 1].text, false)) {
        words_[i].text = it->second;
      }
    }
  }

  AnnotatedSentence finish() {
    elide();
    contract();
    alternate();
    AnnotatedSentence out;
    out.language = lang_;
    if (!words_.empty()) words_[0].text = text::capitalize_first(words_[0].text);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const Word& w = words_[i];
      Token t;
      t.separator = i == 0 ? "" : w.sep;
      out.text += t.separator;
      pos += text::code_point_count(t.separator);
      t.surface = w.text;
      t.begin = pos;
      pos += text::code_point_count(w.text);
      t.end = pos;
      out.text += w.text;
      t.kb_id = w.kb;
      t.plan_id = w.plan;
      t.role = w.role;
      t.form = w.form;
      t.features = w.features;
      out.tokens.push_back(std::move(t));
    }
    return out;
  }

  const std::string& lang_;
  const LanguageResources& res_;
  const Morphology& m_;
  const KnowledgeBase& kb_;
  std::vector<Word> words_;
  int plan_ = 0;
};

}  // namespace

AnnotatedSentence realize(const SentencePlan& plan, const std::string& language,
                          const LanguageResources& resources, const KnowledgeBase& kb) {
  return SentenceRealizer(language, resources, kb).run(plan);
}

AnnotatedSentence realize_heading(const std::string& plan_id, const std::string& language,
                                  const LanguageResources& resources) {
  const LexForm* f = resources.lexicon.find(plan_id, language);
  if (!f || f->title.empty()) throw missing_entry(plan_id, language);
  AnnotatedSentence out;
  out.language = language;
  out.text = f->title;
  std::size_t pos = 0;
  bool first = true;
  for (const auto& part : text::split(f->title, ' ')) {
    Token t;
    t.separator = first ? "" : " ";
    pos += t.separator.size();
    t.surface = part;
    t.begin = pos;
    pos += text::code_point_count(part);
    t.end = pos;
    t.form = "function";
    out.tokens.push_back(std::move(t));
    first = false;
  }
  return out;
}

std::vector<const AnnotatedSentence*> RealizedDocument::sentences() const {
  std::vector<const AnnotatedSentence*> out;
  for (const auto& item : items) {
    if (const auto* s = std::get_if<AnnotatedSentence>(&item)) out.push_back(s);
  }
  return out;
}

RealizedDocument realize_document(const DocSequence& seq, const std::string& language,
                                  const LanguageResources& resources, const KnowledgeBase& kb) {
  RealizedDocument doc;
  doc.language = language;
  for (const auto& item : seq) {
    if (const auto* fi = std::get_if<FormatInstruction>(&item)) {
      doc.items.push_back(*fi);
      if (fi->kind == FormatInstruction::Kind::kHeading) {
        doc.plan_id = fi->payload;
        doc.items.push_back(realize_heading(fi->payload, language, resources));
      }
    } else {
      doc.items.push_back(realize(std::get<SentencePlan>(item), language, resources, kb));
    }
  }
  return doc;
}

std::vector<Mention> referent_mentions(const AnnotatedSentence& s) {
  std::vector<Mention> out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const Token& t = s.tokens[i];
    if (t.kb_id.empty() || t.role.empty() || t.role == "process") continue;
    if (!out.empty() && out.back().last_token + 1 == i && out.back().referent == t.kb_id &&
        out.back().role == t.role && out.back().plan_id == t.plan_id) {
      out.back().last_token = i;
      continue;
    }
    out.push_back(Mention{t.kb_id, t.role, t.plan_id, i, i});
  }
  return out;
}

Json sentence_to_json(const AnnotatedSentence& s) {
  Json toks = Json::array();
  for (const auto& t : s.tokens) {
    Json j = {{"surface", t.surface}, {"begin", t.begin}, {"end", t.end},
              {"sep", t.separator}, {"plan", t.plan_id}, {"form", t.form}};
    if (!t.kb_id.empty()) j["kb"] = t.kb_id;
    if (!t.role.empty()) j["role"] = t.role;
    if (!t.features.empty()) j["features"] = t.features;
    toks.push_back(std::move(j));
  }
  Json j = {{"language", s.language}, {"text", s.text}, {"plan", s.plan_id}, {"tokens", toks}};
  if (!s.action_id.empty()) j["action"] = s.action_id;
  return j;
}

AnnotatedSentence sentence_from_json(const Json& j) {
  AnnotatedSentence s;
  s.language = j.at("language").get<std::string>();
  s.text = j.at("text").get<std::string>();
  s.plan_id = j.at("plan").get<int>();
  s.action_id = j.value("action", std::string());
  for (const auto& tj : j.at("tokens")) {
    Token t;
    t.surface = tj.at("surface").get<std::string>();
    t.begin = tj.at("begin").get<std::size_t>();
    t.end = tj.at("end").get<std::size_t>();
    t.separator = tj.at("sep").get<std::string>();
    t.plan_id = tj.at("plan").get<int>();
    t.form = tj.at("form").get<std::string>();
    t.kb_id = tj.value("kb", std::string());
    t.role = tj.value("role", std::string());
    t.features = tj.value("features", std::string());
    s.tokens.push_back(std::move(t));
  }
  return s;
}

}  // namespace techdoc
