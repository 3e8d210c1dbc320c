#include "techdoc/emitter.hpp"

#include <set>

#include "techdoc/error.hpp"
#include "techdoc/text.hpp"

namespace techdoc {

using Json = nlohmann::json;

std::string_view format_name(Format f) {
  switch (f) {
    case Format::kPlain: return "plain";
    case Format::kHtml: return "html";
    case Format::kLatex: return "latex";
    case Format::kAnnotatedJson: return "annotated-json";
  }
  return "?";
}

Format parse_format(std::string_view name) {
  for (auto f : {Format::kPlain, Format::kHtml, Format::kLatex, Format::kAnnotatedJson}) {
    if (format_name(f) == name) return f;
  }
  throw Error(ErrorCode::kUnknownFormat, "unknown format '" + std::string(name) + "'",
              std::string(name));
}

namespace {

// Document layout shared by the plain, html and latex projections. Sentences
// are referred to by their index in RealizedDocument::sentences().
struct ListNode;

struct Item {
  std::vector<int> sentences;
  std::vector<ListNode> lists;
};

struct ListNode {
  int depth = 1;
  std::vector<Item> items;
};

struct Block {
  enum class Kind { kHeading, kParagraph, kList } kind = Kind::kParagraph;
  std::vector<int> sentences;
  ListNode list;
};

class LayoutParser {
 public:
  explicit LayoutParser(const RealizedDocument& doc) : items_(doc.items) {}

  std::vector<Block> run() {
    std::vector<Block> blocks;
    bool heading = false;
    bool open = false;
    while (i_ < items_.size()) {
      const auto& item = items_[i_];
      if (std::holds_alternative<AnnotatedSentence>(item)) {
        int s = next_sentence_++;
        ++i_;
        if (heading) {
          blocks.push_back(Block{Block::Kind::kHeading, {s}, {}});
          heading = false;
        } else {
          if (!open) blocks.push_back(Block{Block::Kind::kParagraph, {}, {}});
          blocks.back().sentences.push_back(s);
          open = true;
        }
        continue;
      }
      const auto& fi = std::get<FormatInstruction>(item);
      switch (fi.kind) {
        case FormatInstruction::Kind::kHeading:
          heading = true;
          open = false;
          ++i_;
          break;
        case FormatInstruction::Kind::kListBegin: {
          Block b;
          b.kind = Block::Kind::kList;
          b.list = list(1);
          blocks.push_back(std::move(b));
          open = false;
          break;
        }
        case FormatInstruction::Kind::kParagraphBreak:
          open = false;
          ++i_;
          break;
        default:
          throw Error(ErrorCode::kInvalidArgument,
                      "unexpected '" + std::string(format_kind_name(fi.kind)) + "' outside a list");
      }
    }
    return blocks;
  }

 private:
  ListNode list(int depth) {
    ListNode node;
    node.depth = depth;
    ++i_;  // list-begin
    while (i_ < items_.size()) {
      const auto& item = items_[i_];
      if (std::holds_alternative<AnnotatedSentence>(item)) {
        if (node.items.empty()) node.items.emplace_back();
        node.items.back().sentences.push_back(next_sentence_++);
        ++i_;
        continue;
      }
      const auto& fi = std::get<FormatInstruction>(item);
      if (fi.kind == FormatInstruction::Kind::kListItem) {
        node.items.emplace_back();
        ++i_;
      } else if (fi.kind == FormatInstruction::Kind::kListBegin) {
        if (node.items.empty()) node.items.emplace_back();
        node.items.back().lists.push_back(list(depth + 1));
      } else if (fi.kind == FormatInstruction::Kind::kListEnd) {
        ++i_;
        return node;
      } else {
        ++i_;
      }
    }
    throw Error(ErrorCode::kInvalidArgument, "unterminated list");
  }

  const std::vector<RealizedItem>& items_;
  std::size_t i_ = 0;
  int next_sentence_ = 0;
};

std::string join_sentences(const std::vector<const AnnotatedSentence*>& all,
                           const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ' ';
    out += all[id]->text;
  }
  return out;
}

void wrap(const std::string& body, const std::string& first, const std::string& hanging,
          std::vector<std::string>& lines) {
  std::string line = first;
  bool empty = true;
  for (const auto& word : text::split(body, ' ')) {
    if (word.empty()) continue;
    if (!empty && text::code_point_count(line) + 1 + text::code_point_count(word) > kPlainWidth) {
      lines.push_back(line);
      line = hanging;
      empty = true;
    }
    if (!empty) line += ' ';
    line += word;
    empty = false;
  }
  lines.push_back(line);
}

std::string item_marker(int depth, std::size_t n) {
  if (depth == 1) return std::to_string(n) + ".";
  std::string letters;
  for (std::size_t k = n; k > 0; k = (k - 1) / 26) {
    letters.insert(letters.begin(), static_cast<char>('a' + (k - 1) % 26));
  }
  return letters + ".";
}

void plain_list(const std::vector<const AnnotatedSentence*>& all, const ListNode& node,
                std::vector<std::string>& lines) {
  std::string indent((node.depth - 1) * kNestedIndent, ' ');
  for (std::size_t n = 0; n < node.items.size(); ++n) {
    const Item& item = node.items[n];
    std::string prefix = indent + item_marker(node.depth, n + 1) + " ";
    if (!item.sentences.empty()) {
      wrap(join_sentences(all, item.sentences), prefix, std::string(prefix.size(), ' '), lines);
    }
    for (const auto& nested : item.lists) plain_list(all, nested, lines);
  }
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string latex_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\textbackslash{}"; break;
      case '&': out += "\\&"; break;
      case '%': out += "\\%"; break;
      case '$': out += "\\$"; break;
      case '#': out += "\\#"; break;
      case '_': out += "\\_"; break;
      case '{': out += "\\{"; break;
      case '}': out += "\\}"; break;
      case '~': out += "\\textasciitilde{}"; break;
      case '^': out += "\\textasciicircum{}"; break;
      default: out += c;
    }
  }
  return out;
}

std::string html_sentence(const AnnotatedSentence& s, int index) {
  std::string out = "<span class=\"sentence\" data-sentence=\"" + std::to_string(index) +
                    "\" data-plan=\"" + std::to_string(s.plan_id) + "\">";
  for (const auto& t : s.tokens) {
    out += xml_escape(t.separator);
    if (!t.content()) {
      out += xml_escape(t.surface);
      continue;
    }
    out += "<span data-kb=\"" + xml_escape(t.kb_id) + "\" data-plan=\"" +
           std::to_string(t.plan_id) + "\"";
    if (!t.role.empty()) out += " data-role=\"" + xml_escape(t.role) + "\"";
    out += " data-span=\"" + std::to_string(index) + ":" + std::to_string(t.begin) + "-" +
           std::to_string(t.end) + "\">" + xml_escape(t.surface) + "</span>";
  }
  return out + "</span>";
}

std::string html_sentences(const std::vector<const AnnotatedSentence*>& all,
                           const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ' ';
    out += html_sentence(*all[id], id);
  }
  return out;
}

void html_list(const std::vector<const AnnotatedSentence*>& all, const ListNode& node,
               std::string& out) {
  out += "<ol>\n";
  for (const auto& item : node.items) {
    out += "<li>" + html_sentences(all, item.sentences);
    for (const auto& nested : item.lists) {
      out += "\n";
      html_list(all, nested, out);
    }
    out += "</li>\n";
  }
  out += "</ol>\n";
}

std::string latex_sentences(const std::vector<const AnnotatedSentence*>& all,
                            const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out += ' ';
    out += latex_escape(all[id]->text);
  }
  return out;
}

void latex_list(const std::vector<const AnnotatedSentence*>& all, const ListNode& node,
                std::string& out) {
  out += "\\begin{enumerate}\n";
  for (const auto& item : node.items) {
    out += "\\item " + latex_sentences(all, item.sentences) + "\n";
    for (const auto& nested : item.lists) latex_list(all, nested, out);
  }
  out += "\\end{enumerate}\n";
}

std::string render_html(const RealizedDocument& doc) {
  auto all = doc.sentences();
  auto blocks = LayoutParser(doc).run();
  std::string title;
  for (const auto& b : blocks) {
    if (b.kind == Block::Kind::kHeading) title = all[b.sentences.front()]->text;
  }
  std::string out = "<!DOCTYPE html>\n<html lang=\"" + xml_escape(doc.language) +
                    "\">\n<head>\n<meta charset=\"utf-8\"/>\n<title>" + xml_escape(title) +
                    "</title>\n</head>\n<body>\n<article data-plan-id=\"" +
                    xml_escape(doc.plan_id) + "\" data-digest=\"" + xml_escape(doc.digest) +
                    "\">\n";
  for (const auto& b : blocks) {
    switch (b.kind) {
      case Block::Kind::kHeading:
        out += "<h1>" + html_sentences(all, b.sentences) + "</h1>\n";
        break;
      case Block::Kind::kParagraph:
        out += "<p>" + html_sentences(all, b.sentences) + "</p>\n";
        break;
      case Block::Kind::kList:
        html_list(all, b.list, out);
        break;
    }
  }
  return out + "</article>\n</body>\n</html>\n";
}

std::string render_latex(const RealizedDocument& doc) {
  auto all = doc.sentences();
  std::string out =
      "\\documentclass{article}\n\\usepackage[utf8]{inputenc}\n\\usepackage[T1]{fontenc}\n"
      "\\begin{document}\n";
  for (const auto& b : LayoutParser(doc).run()) {
    switch (b.kind) {
      case Block::Kind::kHeading:
        out += "\\section*{" + latex_sentences(all, b.sentences) + "}\n\n";
        break;
      case Block::Kind::kParagraph:
        out += latex_sentences(all, b.sentences) + "\n\n";
        break;
      case Block::Kind::kList:
        latex_list(all, b.list, out);
        out += "\n";
        break;
    }
  }
  return out + "\\end{document}\n";
}

FormatInstruction::Kind format_kind(const std::string& name) {
  using K = FormatInstruction::Kind;
  for (auto k : {K::kHeading, K::kParagraphBreak, K::kListBegin, K::kListItem, K::kListEnd,
                 K::kEmphasis}) {
    if (format_kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::kParseError, "unknown format instruction '" + name + "'", name);
}

}  // namespace

std::string render_plain(const RealizedDocument& doc) {
  auto all = doc.sentences();
  std::vector<std::string> lines;
  bool first = true;
  for (const auto& b : LayoutParser(doc).run()) {
    if (!first) lines.emplace_back();
    first = false;
    switch (b.kind) {
      case Block::Kind::kHeading:
        lines.push_back(join_sentences(all, b.sentences));
        break;
      case Block::Kind::kParagraph:
        wrap(join_sentences(all, b.sentences), "", "", lines);
        break;
      case Block::Kind::kList:
        plain_list(all, b.list, lines);
        break;
    }
  }
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

Json to_annotated_json(const RealizedDocument& doc) {
  Json items = Json::array();
  for (const auto& item : doc.items) {
    if (const auto* s = std::get_if<AnnotatedSentence>(&item)) {
      items.push_back({{"sentence", sentence_to_json(*s)}});
    } else {
      const auto& fi = std::get<FormatInstruction>(item);
      Json f = {{"format", std::string(format_kind_name(fi.kind))}};
      if (!fi.payload.empty()) f["payload"] = fi.payload;
      if (fi.list) f["list"] = fi.list;
      items.push_back(std::move(f));
    }
  }
  return {{"format_version", kAnnotatedFormatVersion},
          {"language", doc.language},
          {"plan", doc.plan_id},
          {"digest", doc.digest},
          {"items", items}};
}

RealizedDocument from_annotated_json(const Json& j) {
  if (!j.is_object() || j.value("format_version", 0) != kAnnotatedFormatVersion) {
    throw Error(ErrorCode::kParseError, "unsupported annotated-json format_version");
  }
  RealizedDocument doc;
  doc.language = j.at("language").get<std::string>();
  doc.plan_id = j.at("plan").get<std::string>();
  doc.digest = j.at("digest").get<std::string>();
  for (const auto& item : j.at("items")) {
    if (item.contains("sentence")) {
      doc.items.push_back(sentence_from_json(item.at("sentence")));
    } else {
      FormatInstruction fi;
      fi.kind = format_kind(item.at("format").get<std::string>());
      fi.payload = item.value("payload", std::string());
      fi.list = item.value("list", 0);
      doc.items.push_back(fi);
    }
  }
  return doc;
}

std::vector<SpanRef> content_spans(const RealizedDocument& doc) {
  std::vector<SpanRef> out;
  int index = 0;
  for (const auto* s : doc.sentences()) {
    for (const auto& t : s->tokens) {
      if (t.content()) out.push_back(SpanRef{index, t.begin, t.end, t.kb_id, t.plan_id, t.role});
    }
    ++index;
  }
  return out;
}

Document emit(const RealizedDocument& doc, Format format) {
  Document d;
  d.language = doc.language;
  d.format = format;
  switch (format) {
    case Format::kPlain:
      d.body = render_plain(doc);
      break;
    case Format::kHtml:
      d.body = render_html(doc);
      d.span_index = content_spans(doc);
      break;
    case Format::kLatex:
      d.body = render_latex(doc);
      break;
    case Format::kAnnotatedJson:
      d.body = to_annotated_json(doc).dump(1);
      d.span_index = content_spans(doc);
      break;
  }
  return d;
}

Document emit(const RealizedDocument& doc, std::string_view format) {
  return emit(doc, parse_format(format));
}

std::vector<SpanRef> AlignmentMap::counterparts(const SpanRef& token,
                                                const std::string& language) const {
  std::vector<SpanRef> out;
  auto p = plans.find(token.plan_id);
  if (p == plans.end()) return out;
  auto l = p->second.find(language);
  if (l == p->second.end()) return out;
  for (const auto& s : l->second) {
    if (s.kb_id == token.kb_id) out.push_back(s);
  }
  return out;
}

AlignmentMap align(const std::vector<const RealizedDocument*>& docs) {
  AlignmentMap m;
  if (docs.empty()) return m;
  m.digest = docs.front()->digest;
  std::set<std::string> seen;
  for (const auto* d : docs) {
    if (d->digest != m.digest) {
      throw Error(ErrorCode::kDigestMismatch,
                  "documents come from different schemas (" + m.digest + " vs " + d->digest + ")",
                  d->language);
    }
    if (!seen.insert(d->language).second) {
      throw Error(ErrorCode::kInvalidArgument, "language '" + d->language + "' given twice",
                  d->language);
    }
    m.languages.push_back(d->language);
    for (const auto& span : content_spans(*d)) {
      m.plans[span.plan_id][d->language].push_back(span);
      if (!span.role.empty() && span.role != "process") {
        m.referents[span.kb_id][d->language].push_back(span);
      }
    }
  }
  for (auto& [id, by_lang] : m.plans) {
    for (const auto& lang : m.languages) by_lang[lang];
  }
  return m;
}

namespace {

Json span_to_json(const SpanRef& s) {
  Json j = {{"span", std::to_string(s.sentence) + ":" + std::to_string(s.begin) + "-" +
                         std::to_string(s.end)},
            {"kb", s.kb_id},
            {"plan", s.plan_id}};
  if (!s.role.empty()) j["role"] = s.role;
  return j;
}

Json spans_by_language(const std::map<std::string, std::vector<SpanRef>>& by_lang) {
  Json j = Json::object();
  for (const auto& [lang, spans] : by_lang) {
    Json arr = Json::array();
    for (const auto& s : spans) arr.push_back(span_to_json(s));
    j[lang] = std::move(arr);
  }
  return j;
}

}  // namespace

Json alignment_to_json(const AlignmentMap& m) {
  Json plans = Json::object();
  for (const auto& [id, by_lang] : m.plans) plans[std::to_string(id)] = spans_by_language(by_lang);
  Json refs = Json::object();
  for (const auto& [id, by_lang] : m.referents) refs[id] = spans_by_language(by_lang);
  return {{"digest", m.digest}, {"languages", m.languages}, {"plans", plans}, {"referents", refs}};
}

}  // namespace techdoc
