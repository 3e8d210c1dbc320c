#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

// Independent validators for emitted markup. Each returns an empty string on
// success, otherwise a description of the first problem found.
namespace format_check {

inline std::string xml_well_formed(std::string_view s) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '&') {
      auto semi = s.find(';', i);
      if (semi == std::string_view::npos) return "unterminated entity";
      std::string_view ent = s.substr(i, semi - i + 1);
      if (ent != "&amp;" && ent != "&lt;" && ent != "&gt;" && ent != "&quot;" && ent != "&apos;") {
        return "unknown entity " + std::string(ent);
      }
      i = semi + 1;
      continue;
    }
    if (c == '>') return "stray '>'";
    if (c != '<') {
      ++i;
      continue;
    }
    auto close = s.find('>', i);
    if (close == std::string_view::npos) return "unterminated tag";
    std::string_view tag = s.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.substr(0, 8) == "!DOCTYPE") continue;
    if (tag.empty()) return "empty tag";
    if (tag.front() == '/') {
      std::string name(tag.substr(1));
      if (stack.empty() || stack.back() != name) return "mismatched </" + name + ">";
      stack.pop_back();
      continue;
    }
    bool self_closing = tag.back() == '/';
    std::string_view body = self_closing ? tag.substr(0, tag.size() - 1) : tag;
    auto sp = body.find_first_of(" \n\t");
    std::string name(body.substr(0, sp));
    if (name.empty() || name.find('<') != std::string::npos) return "bad tag name";
    // Attribute values must be quoted and free of '<'.
    if (sp != std::string_view::npos) {
      std::string_view attrs = body.substr(sp);
      std::size_t quotes = 0;
      for (char a : attrs) {
        if (a == '"') ++quotes;
        if (a == '<') return "'<' in attributes of <" + name + ">";
      }
      if (quotes % 2) return "unbalanced quotes in <" + name + ">";
    }
    if (!self_closing) stack.push_back(name);
  }
  if (!stack.empty()) return "unclosed <" + stack.back() + ">";
  return {};
}

inline std::string latex_valid(std::string_view s) {
  std::vector<std::string> envs;
  int braces = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      std::size_t j = i + 1;
      if (j < s.size() && std::string_view("&%$#_{}\\").find(s[j]) != std::string_view::npos &&
          s[j] != '\\') {
        i = j;  // escaped reserved character
        continue;
      }
      while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      std::string_view cmd = s.substr(i + 1, j - i - 1);
      if (cmd.empty()) return "bare backslash";
      if ((cmd == "begin" || cmd == "end") && j < s.size() && s[j] == '{') {
        auto close = s.find('}', j);
        std::string env(s.substr(j + 1, close - j - 1));
        if (cmd == "begin") {
          envs.push_back(env);
        } else {
          if (envs.empty() || envs.back() != env) return "mismatched \\end{" + env + "}";
          envs.pop_back();
        }
        i = close;
        continue;
      }
      i = j - 1;
      continue;
    }
    if (c == '{') ++braces;
    if (c == '}' && --braces < 0) return "unbalanced '}'";
    if (std::string_view("&%$#_~^").find(c) != std::string_view::npos) {
      return std::string("unescaped '") + c + "'";
    }
  }
  if (braces) return "unbalanced '{'";
  if (!envs.empty()) return "unclosed environment " + envs.back();
  return {};
}

}  // namespace format_check
