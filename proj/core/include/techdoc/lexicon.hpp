#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/kb.hpp"
#include "techdoc/plan.hpp"

namespace techdoc {

inline const std::vector<std::string> kLanguages = {"en", "de", "fr"};

struct RolePreposition {
  std::string prep;
  std::string case_;  // governed case (de)
};

struct Modifier {
  std::string lemma;
  std::string klass;
  bool prenominal = true;
};

// One language's entry for a concept.
struct LexForm {
  std::string lemma;
  std::string pos;       // noun, verb, adj, relation, title
  std::string gender;    // m, f, n
  std::string klass;     // inflection class
  std::string particle;  // en verb particle, de separable prefix
  bool reflexive = false;
  bool mass = false;
  bool h_aspire = false;
  // Relations and predicative states.
  std::string copula;         // verb lemma used as copula
  std::string copula_class;
  std::string predicate;      // fixed predicative word
  std::string prep;           // locative preposition
  std::string case_;          // case governed by `prep`
  std::map<std::string, RolePreposition> roles;
  std::optional<Modifier> modifier;
  std::string title;
};

struct LexEntry {
  std::string concept_id;
  std::map<std::string, LexForm> forms;  // language -> form
};

class Lexicon {
 public:
  static Lexicon from_json(const nlohmann::json& j);
  static Lexicon load(const std::filesystem::path& path);

  const LexForm* find(const std::string& concept_id, const std::string& language) const;
  // Entry for naming an instance: its most specific derived type with a noun entry.
  std::pair<std::string, const LexForm*> find_for_instance(const std::string& instance,
                                                           const std::string& language,
                                                           const KnowledgeBase& kb) const;
  void add(LexEntry e);
  void remove(const std::string& concept_id, const std::string& language);
  const std::map<std::string, LexEntry>& entries() const { return entries_; }

 private:
  std::map<std::string, LexEntry> entries_;
};

// Grammatical features requested by a template. Empty fields are omitted
// from the lookup key, which joins them as mood.person.decl.case.number.gender.
struct Features {
  std::string mood;
  std::string person;
  std::string decl;
  std::string case_;
  std::string number;
  std::string gender;

  std::string key() const;
};

struct Affix {
  std::string strip;
  std::string append;
};

struct InflectionClass {
  std::map<std::string, Affix> rules;
  std::map<std::string, std::map<std::string, std::string>> exceptions;  // lemma -> key -> form
};

class Morphology {
 public:
  static Morphology from_json(const nlohmann::json& j);
  static Morphology load(const std::filesystem::path& path);

  const std::string& language() const { return language_; }
  std::string inflect(const std::string& lemma, const std::string& klass,
                      const Features& f) const;
  std::string inflect(const std::string& lemma, const std::string& klass,
                      const std::string& key) const;
  // Closed-class words: table "determiners.def", "pronouns.personal", ...
  const std::string& word(const std::string& table, const std::string& key) const;
  bool has_word(const std::string& table, const std::string& key) const;
  std::string ordinal_lemma(int n) const;
  const std::string& ordinal_class() const { return ordinal_class_; }
  const std::vector<std::pair<std::string, std::string>>& contractions() const {
    return contractions_;
  }
  const std::vector<std::string>& elidable() const { return elidable_; }
  // Words elided only before the listed words ("si" before "il").
  const std::map<std::string, std::vector<std::string>>& elision_before() const {
    return elision_before_;
  }
  // Replacement before a vowel sound ("a" -> "an").
  const std::map<std::string, std::string>& vowel_alternation() const {
    return vowel_alternation_;
  }
  const std::map<std::string, InflectionClass>& classes() const { return classes_; }

 private:
  std::string language_;
  std::map<std::string, InflectionClass> classes_;
  std::map<std::string, std::map<std::string, std::string>> words_;
  std::vector<std::string> ordinals_;
  std::string ordinal_class_;
  std::vector<std::pair<std::string, std::string>> contractions_;  // "in dem" -> "im"
  std::vector<std::string> elidable_;
  std::map<std::string, std::vector<std::string>> elision_before_;
  std::map<std::string, std::string> vowel_alternation_;
};

std::string inflect(const Morphology& m, const std::string& lemma, const std::string& klass,
                    const Features& f);

struct LanguageResources {
  Lexicon lexicon;
  std::map<std::string, Morphology> morphology;

  static LanguageResources load(const std::filesystem::path& fixture_dir);
  const Morphology& morph(const std::string& language) const;
};

struct CoverageGap {
  std::string concept_id;
  std::vector<std::string> missing;
};

// Concepts used by the device plans in `plans` that lack an entry in some
// language. Empty iff every plan is realizable in every language.
std::vector<CoverageGap> coverage_report(const Lexicon& lexicon, const KnowledgeBase& kb,
                                         const PlanLibrary& plans,
                                         const std::vector<std::string>& languages = kLanguages);

}  // namespace techdoc
