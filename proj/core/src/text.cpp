#include "techdoc/text.hpp"

#include <cstdio>

#include "techdoc/error.hpp"

namespace techdoc {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kUnknownId: return "unknown-id";
    case ErrorCode::kUnknownParent: return "unknown-parent";
    case ErrorCode::kUnknownRole: return "unknown-role";
    case ErrorCode::kUnknownConcept: return "unknown-concept";
    case ErrorCode::kCycle: return "cycle";
    case ErrorCode::kRangeViolation: return "range-violation";
    case ErrorCode::kRuleLoop: return "rule-loop";
    case ErrorCode::kMalformedQuery: return "malformed-query";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kRefinementCycle: return "refinement-cycle";
    case ErrorCode::kUnresolvedPlaceholder: return "unresolved-placeholder";
    case ErrorCode::kUnresolvedParticipant: return "unresolved-participant";
    case ErrorCode::kEmptyPlan: return "empty-plan";
    case ErrorCode::kMissingLexiconEntry: return "missing-lexicon-entry";
    case ErrorCode::kMorphologyGap: return "morphology-gap";
    case ErrorCode::kUnknownFormat: return "unknown-format";
    case ErrorCode::kDigestMismatch: return "digest-mismatch";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

namespace text {

std::vector<char32_t> decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c >> 4) == 0xE) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c >> 3) == 0x1E) {
      cp = c & 0x07;
      extra = 3;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= s.size()) {
        ok = false;
        break;
      }
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

namespace {

char32_t to_upper(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return cp - 32;
  // Latin-1 lowercase block, except the division sign and ÿ.
  if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 32;
  return cp;
}

}  // namespace

std::string capitalize_first(std::string_view s) {
  if (s.empty()) return {};
  auto cps = decode(s);
  std::string out = encode(to_upper(cps.front()));
  std::size_t first_len = 1;
  auto c = static_cast<unsigned char>(s[0]);
  if ((c >> 5) == 0x6) first_len = 2;
  else if ((c >> 4) == 0xE) first_len = 3;
  else if ((c >> 3) == 0x1E) first_len = 4;
  out.append(s.substr(std::min(first_len, s.size())));
  return out;
}

bool starts_with_vowel_sound(std::string_view word, bool treat_h_as_vowel) {
  if (word.empty()) return false;
  char32_t cp = decode(word).front();
  if (cp >= U'A' && cp <= U'Z') cp += 32;
  switch (cp) {
    case U'a': case U'e': case U'i': case U'o': case U'u': case U'y':
    case U'à': case U'â': case U'é': case U'è': case U'ê': case U'ë':
    case U'î': case U'ï': case U'ô': case U'û': case U'ù':
    case U'ä': case U'ö': case U'ü':
      return true;
    case U'h':
      return treat_h_as_vowel;
    default:
      return false;
  }
}

std::string substr_cp(std::string_view s, std::size_t begin, std::size_t end) {
  std::size_t cp = 0;
  std::size_t byte_begin = s.size();
  std::size_t byte_end = s.size();
  for (std::size_t i = 0; i <= s.size(); ++i) {
    bool boundary = i == s.size() ||
                    (static_cast<unsigned char>(s[i]) & 0xC0) != 0x80;
    if (!boundary) continue;
    if (cp == begin && byte_begin == s.size()) byte_begin = i;
    if (cp == end) {
      byte_end = i;
      break;
    }
    ++cp;
  }
  if (byte_begin > byte_end) return {};
  return std::string(s.substr(byte_begin, byte_end - byte_begin));
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace text
}  // namespace techdoc
