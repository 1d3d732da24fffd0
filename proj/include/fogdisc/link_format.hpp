#pragma once

#include <map>
#include <string>
#include <vector>

#include "fogdisc/common.hpp"

namespace fogdisc {

/// One CoRE Link Format entry: `</target>;param=value;...`
struct LinkEntry {
  std::string target;
  std::map<std::string, std::string> params;

  auto operator<=>(const LinkEntry&) const = default;
};

namespace detail {

inline bool link_token_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' ||
         c == '/' || c == '~';
}

inline bool needs_quoting(const std::string& v) {
  if (v.empty()) return true;
  for (char c : v)
    if (!link_token_char(c)) return true;
  return false;
}

}  // namespace detail

inline std::string serialize_links(const std::vector<LinkEntry>& entries) {
  std::string out;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ",";
    out += "<" + entries[i].target + ">";
    for (const auto& [k, v] : entries[i].params) {
      out += ";" + k + "=";
      if (detail::needs_quoting(v)) {
        out += '"';
        for (char c : v) {
          if (c == '"' || c == '\\') out += '\\';
          out += c;
        }
        out += '"';
      } else {
        out += v;
      }
    }
  }
  return out;
}

inline std::vector<LinkEntry> parse_links(const std::string& text) {
  std::vector<LinkEntry> entries;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };
  skip_ws();
  while (pos < text.size()) {
    if (text[pos] != '<') raise(Errc::empty_target, "expected '<' at " + std::to_string(pos));
    size_t close = text.find('>', pos);
    if (close == std::string::npos) raise(Errc::empty_target, "unterminated target");
    LinkEntry entry;
    entry.target = text.substr(pos + 1, close - pos - 1);
    if (entry.target.empty()) raise(Errc::empty_target, "");
    pos = close + 1;

    while (pos < text.size() && text[pos] == ';') {
      ++pos;
      size_t key_start = pos;
      while (pos < text.size() && text[pos] != '=' && text[pos] != ';' && text[pos] != ',')
        ++pos;
      std::string key = text.substr(key_start, pos - key_start);
      std::string value;
      if (pos < text.size() && text[pos] == '=') {
        ++pos;
        if (pos < text.size() && text[pos] == '"') {
          ++pos;
          bool closed = false;
          while (pos < text.size()) {
            char c = text[pos++];
            if (c == '\\' && pos < text.size()) {
              value += text[pos++];
            } else if (c == '"') {
              closed = true;
              break;
            } else {
              value += c;
            }
          }
          if (!closed) raise(Errc::unterminated_quote, key);
        } else {
          size_t val_start = pos;
          while (pos < text.size() && text[pos] != ';' && text[pos] != ',') ++pos;
          value = text.substr(val_start, pos - val_start);
        }
      }
      entry.params[key] = value;
    }
    entries.push_back(std::move(entry));
    if (pos < text.size()) {
      if (text[pos] != ',') raise(Errc::empty_target, "expected ',' at " + std::to_string(pos));
      ++pos;
      skip_ws();
    }
  }
  return entries;
}

}  // namespace fogdisc
