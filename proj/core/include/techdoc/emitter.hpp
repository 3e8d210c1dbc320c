#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "techdoc/realizer.hpp"

namespace techdoc {

enum class Format { kPlain, kHtml, kLatex, kAnnotatedJson };

std::string_view format_name(Format f);
// Throws kUnknownFormat.
Format parse_format(std::string_view name);

inline constexpr int kAnnotatedFormatVersion = 1;
inline constexpr std::size_t kPlainWidth = 72;
inline constexpr std::size_t kNestedIndent = 3;

// Sentence index `sentence` counts every AnnotatedSentence of the document,
// the heading included, in order.
struct SpanRef {
  int sentence = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string kb_id;
  int plan_id = 0;
  std::string role;
  friend bool operator==(const SpanRef&, const SpanRef&) = default;
};

struct Document {
  std::string language;
  Format format = Format::kPlain;
  std::string body;
  std::vector<SpanRef> span_index;  // content tokens; empty for plain and latex
};

Document emit(const RealizedDocument& doc, Format format);
Document emit(const RealizedDocument& doc, std::string_view format);

std::string render_plain(const RealizedDocument& doc);
nlohmann::json to_annotated_json(const RealizedDocument& doc);
RealizedDocument from_annotated_json(const nlohmann::json& j);

// Content-token spans of every sentence, in document order.
std::vector<SpanRef> content_spans(const RealizedDocument& doc);

struct AlignmentMap {
  std::string digest;
  std::vector<std::string> languages;
  std::map<int, std::map<std::string, std::vector<SpanRef>>> plans;
  std::map<std::string, std::map<std::string, std::vector<SpanRef>>> referents;

  // Spans in `language` corresponding to `token`: same plan and same KB id.
  std::vector<SpanRef> counterparts(const SpanRef& token, const std::string& language) const;
};

// Throws kDigestMismatch when the documents come from different schemas.
AlignmentMap align(const std::vector<const RealizedDocument*>& docs);

nlohmann::json alignment_to_json(const AlignmentMap& m);

}  // namespace techdoc
