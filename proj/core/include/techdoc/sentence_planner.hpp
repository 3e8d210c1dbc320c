#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/doc_planner.hpp"
#include "techdoc/kb.hpp"

namespace techdoc {

class Lexicon;

enum class Mood { kImperative, kDeclarative };

enum class RefForm { kIndefinite, kDefinite, kPronoun, kBare };

std::string_view ref_form_name(RefForm f);

struct Antecedent {
  int plan = 0;
  std::string role;
  friend bool operator==(const Antecedent&, const Antecedent&) = default;
};

struct ReferringExpression {
  std::string referent;
  RefForm form = RefForm::kDefinite;
  std::optional<Antecedent> antecedent;
  int ordinal = 0;  // disambiguating ordinal, 0 for none
  friend bool operator==(const ReferringExpression&, const ReferringExpression&) = default;
};

struct ListContext {
  int list = 0;
  int position = 0;  // 1-based
  int depth = 1;
  friend bool operator==(const ListContext&, const ListContext&) = default;
};

struct SentencePlan {
  int id = 0;
  std::string process;
  std::map<std::string, ReferringExpression> participants;  // semantic role
  Mood mood = Mood::kDeclarative;
  bool negated = false;
  std::shared_ptr<SentencePlan> condition;
  std::optional<ListContext> list;
  std::string action_id;
  std::string block;  // location, replacement or activity
};

struct FormatInstruction {
  enum class Kind { kHeading, kParagraphBreak, kListBegin, kListItem, kListEnd, kEmphasis };
  Kind kind = Kind::kParagraphBreak;
  std::string payload;
  int list = 0;
};

std::string_view format_kind_name(FormatInstruction::Kind k);

using DocItem = std::variant<SentencePlan, FormatInstruction>;
using DocSequence = std::vector<DocItem>;

// Semantic roles in realization order.
inline const std::vector<std::string> kSemanticRoles = {
    "actor", "actee", "instrument", "location", "source", "destination"};

DocSequence linearize(const SectionSchema& schema);
// Also checks that every process is lexicalized in each language.
DocSequence linearize(const SectionSchema& schema, const Lexicon& lexicon,
                      const std::vector<std::string>& languages);

// Assigns referring-expression forms and antecedent links. Idempotent.
DocSequence plan_references(DocSequence seq, const KnowledgeBase& kb);

// Sentence plans in document order, conditions before their main clause.
std::vector<const SentencePlan*> sentence_plans(const DocSequence& seq);

nlohmann::json sequence_to_json(const DocSequence& seq);

}  // namespace techdoc
