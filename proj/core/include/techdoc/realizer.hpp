#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/kb.hpp"
#include "techdoc/lexicon.hpp"
#include "techdoc/sentence_planner.hpp"

namespace techdoc {

struct Token {
  std::string surface;
  std::size_t begin = 0;  // code points into the sentence text
  std::size_t end = 0;
  std::string separator;  // text between the previous token and this one
  std::string kb_id;      // referent or process concept; empty for function words
  int plan_id = 0;
  std::string role;  // semantic role, "process", or empty
  std::string form;  // referring form for NP tokens, otherwise verb/function/punct
  std::string features;  // morphology row used, "table/key" or "class/key"

  bool content() const { return !kb_id.empty(); }
  friend bool operator==(const Token&, const Token&) = default;
};

struct AnnotatedSentence {
  std::string language;
  std::string text;
  std::vector<Token> tokens;
  int plan_id = 0;  // 0 for headings
  std::string action_id;
};

AnnotatedSentence realize(const SentencePlan& plan, const std::string& language,
                          const LanguageResources& resources, const KnowledgeBase& kb);

AnnotatedSentence realize_heading(const std::string& plan_id, const std::string& language,
                                  const LanguageResources& resources);

using RealizedItem = std::variant<AnnotatedSentence, FormatInstruction>;

struct RealizedDocument {
  std::string language;
  std::string plan_id;
  std::string digest;  // schema digest, set by the caller
  std::vector<RealizedItem> items;

  std::vector<const AnnotatedSentence*> sentences() const;
};

// Realizes a linearized, reference-planned sequence. The heading instruction
// is kept and followed by the realized title.
RealizedDocument realize_document(const DocSequence& seq, const std::string& language,
                                  const LanguageResources& resources, const KnowledgeBase& kb);

// One entry per noun phrase: maximal runs of tokens sharing referent, role
// and plan id.
struct Mention {
  std::string referent;
  std::string role;
  int plan_id = 0;
  std::size_t first_token = 0;
  std::size_t last_token = 0;
};
std::vector<Mention> referent_mentions(const AnnotatedSentence& s);

nlohmann::json sentence_to_json(const AnnotatedSentence& s);
AnnotatedSentence sentence_from_json(const nlohmann::json& j);

}  // namespace techdoc
