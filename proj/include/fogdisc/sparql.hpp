#pragma once

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fogdisc/triples.hpp"

namespace fogdisc {

enum class Cmp { lt, le, gt, ge, eq, ne };

inline const char* cmp_text(Cmp c) {
  switch (c) {
    case Cmp::lt: return "<";
    case Cmp::le: return "<=";
    case Cmp::gt: return ">";
    case Cmp::ge: return ">=";
    case Cmp::eq: return "=";
    case Cmp::ne: return "!=";
  }
  return "?";
}

inline bool cmp_apply(Cmp c, double lhs, double rhs) {
  switch (c) {
    case Cmp::lt: return lhs < rhs;
    case Cmp::le: return lhs <= rhs;
    case Cmp::gt: return lhs > rhs;
    case Cmp::ge: return lhs >= rhs;
    case Cmp::eq: return lhs == rhs;
    case Cmp::ne: return lhs != rhs;
  }
  return false;
}

enum class TermKind { variable, iri, text, number };

struct Term {
  TermKind kind = TermKind::variable;
  std::string text;     // variable name (no '?'), iri, or literal text
  double number = 0.0;  // when kind == number

  bool operator==(const Term&) const = default;

  static Term var(std::string name) { return {TermKind::variable, std::move(name), 0.0}; }
  static Term iri(std::string v) { return {TermKind::iri, std::move(v), 0.0}; }
  static Term lit(std::string v) { return {TermKind::text, std::move(v), 0.0}; }
  static Term num(double v) { return {TermKind::number, "", v}; }
};

struct TriplePattern {
  Term subject, predicate, object;
  bool operator==(const TriplePattern&) const = default;
};

struct QueryFilter {
  std::string variable;
  Cmp cmp = Cmp::lt;
  double bound = 0.0;
  bool operator==(const QueryFilter&) const = default;
};

struct SelectQuery {
  std::vector<std::string> projected;
  std::vector<TriplePattern> patterns;
  std::vector<QueryFilter> filters;
  bool operator==(const SelectQuery&) const = default;
};

using Binding = std::map<std::string, TripleValue>;

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct QueryLexer {
  const std::string& text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  [[noreturn]] void fail(size_t at) { raise(Errc::syntax_error, std::to_string(at)); }

  bool try_keyword(const std::string& kw) {
    skip_ws();
    if (text.compare(pos, kw.size(), kw) != 0) return false;
    pos += kw.size();
    return true;
  }

  void expect_keyword(const std::string& kw) {
    skip_ws();
    if (!try_keyword(kw)) fail(pos);
  }

  bool try_char(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect_char(char c) {
    skip_ws();
    if (!try_char(c)) fail(pos);
  }

  std::string variable() {
    skip_ws();
    if (pos >= text.size() || text[pos] != '?') fail(pos);
    size_t start = ++pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) fail(start);
    return text.substr(start, pos - start);
  }

  bool peek_variable() {
    skip_ws();
    return pos < text.size() && text[pos] == '?';
  }

  Term term() {
    skip_ws();
    if (pos >= text.size()) fail(pos);
    char c = text[pos];
    if (c == '?') return Term::var(variable());
    if (c == '<') {
      size_t close = text.find('>', pos);
      if (close == std::string::npos) fail(pos);
      std::string iri = text.substr(pos + 1, close - pos - 1);
      pos = close + 1;
      return Term::iri(iri);
    }
    if (c == '"') {
      size_t start = ++pos;
      while (pos < text.size() && text[pos] != '"') ++pos;
      if (pos >= text.size()) fail(start - 1);
      std::string lit = text.substr(start, pos - start);
      ++pos;
      return Term::lit(lit);
    }
    return Term::num(number());
  }

  double number() {
    skip_ws();
    size_t start = pos;
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail(start);
    pos += static_cast<size_t>(end - begin);
    return v;
  }

  Cmp comparator() {
    skip_ws();
    auto two = text.substr(pos, 2);
    if (two == "<=") { pos += 2; return Cmp::le; }
    if (two == ">=") { pos += 2; return Cmp::ge; }
    if (two == "!=") { pos += 2; return Cmp::ne; }
    if (pos < text.size()) {
      char c = text[pos];
      if (c == '<') { ++pos; return Cmp::lt; }
      if (c == '>') { ++pos; return Cmp::gt; }
      if (c == '=') { ++pos; return Cmp::eq; }
    }
    fail(pos);
  }
};

inline void validate_query(const SelectQuery& q) {
  std::set<std::string> bound;
  for (const auto& p : q.patterns)
    for (const Term* t : {&p.subject, &p.predicate, &p.object})
      if (t->kind == TermKind::variable) bound.insert(t->text);
  for (const auto& f : q.filters)
    if (!bound.count(f.variable)) raise(Errc::unbound_filter_variable, f.variable);
  for (const auto& v : q.projected)
    if (!bound.count(v)) raise(Errc::unbound_projection, v);
}

}  // namespace detail

inline SelectQuery parse_query(const std::string& text) {
  detail::QueryLexer lex{text};
  SelectQuery q;
  lex.expect_keyword("SELECT");
  while (lex.peek_variable()) q.projected.push_back(lex.variable());
  if (q.projected.empty()) lex.fail(lex.pos);
  lex.expect_keyword("WHERE");
  lex.expect_char('{');
  while (!lex.try_char('}')) {
    if (lex.at_end()) lex.fail(lex.pos);
    if (lex.try_keyword("FILTER")) {
      lex.expect_char('(');
      QueryFilter f;
      f.variable = lex.variable();
      f.cmp = lex.comparator();
      f.bound = lex.number();
      lex.expect_char(')');
      q.filters.push_back(f);
    } else {
      TriplePattern p;
      p.subject = lex.term();
      p.predicate = lex.term();
      p.object = lex.term();
      lex.expect_char('.');
      q.patterns.push_back(p);
    }
  }
  if (!lex.at_end()) lex.fail(lex.pos);
  detail::validate_query(q);
  return q;
}

inline std::string render_term(const Term& t) {
  switch (t.kind) {
    case TermKind::variable: return "?" + t.text;
    case TermKind::iri: return "<" + t.text + ">";
    case TermKind::text: return "\"" + t.text + "\"";
    case TermKind::number: return detail::format_double(t.number);
  }
  return "";
}

inline std::string render_query(const SelectQuery& q) {
  std::string out = "SELECT";
  for (const auto& v : q.projected) out += " ?" + v;
  out += " WHERE {";
  for (const auto& p : q.patterns)
    out += " " + render_term(p.subject) + " " + render_term(p.predicate) + " " +
           render_term(p.object) + " .";
  for (const auto& f : q.filters)
    out += " FILTER(?" + f.variable + " " + cmp_text(f.cmp) + " " +
           detail::format_double(f.bound) + ")";
  out += " }";
  return out;
}

namespace detail {

inline bool term_matches(const Term& t, const TripleValue& v, Binding& b) {
  switch (t.kind) {
    case TermKind::variable: {
      auto it = b.find(t.text);
      if (it == b.end()) {
        b.emplace(t.text, v);
        return true;
      }
      return it->second == v;
    }
    case TermKind::iri:
    case TermKind::text:
      return std::holds_alternative<std::string>(v) && std::get<std::string>(v) == t.text;
    case TermKind::number:
      return std::holds_alternative<double>(v) && std::get<double>(v) == t.number;
  }
  return false;
}

}  // namespace detail

// Conjunctive pattern join, then numeric filters, then projection. Results
// are deduplicated and ordered lexicographically by projected values
// (numbers before text).
inline std::vector<Binding> evaluate(const SelectQuery& q, const std::vector<Triple>& store) {
  std::vector<Binding> bindings{{}};
  for (const auto& p : q.patterns) {
    std::vector<Binding> next;
    for (const auto& b : bindings) {
      for (const auto& t : store) {
        Binding candidate = b;
        if (detail::term_matches(p.subject, TripleValue(t.subject), candidate) &&
            detail::term_matches(p.predicate, TripleValue(t.predicate), candidate) &&
            detail::term_matches(p.object, t.object, candidate))
          next.push_back(std::move(candidate));
      }
    }
    bindings = std::move(next);
  }

  std::vector<Binding> filtered;
  for (const auto& b : bindings) {
    bool keep = true;
    for (const auto& f : q.filters) {
      const auto& v = b.at(f.variable);
      if (!std::holds_alternative<double>(v) ||
          !cmp_apply(f.cmp, std::get<double>(v), f.bound)) {
        keep = false;
        break;
      }
    }
    if (keep) filtered.push_back(b);
  }

  std::vector<Binding> projected;
  for (const auto& b : filtered) {
    Binding p;
    for (const auto& v : q.projected) p.emplace(v, b.at(v));
    projected.push_back(std::move(p));
  }

  auto tuple_of = [&](const Binding& b) {
    std::vector<TripleValue> t;
    for (const auto& v : q.projected) t.push_back(b.at(v));
    return t;
  };
  std::sort(projected.begin(), projected.end(), [&](const Binding& x, const Binding& y) {
    auto tx = tuple_of(x), ty = tuple_of(y);
    return std::lexicographical_compare(tx.begin(), tx.end(), ty.begin(), ty.end(),
                                        value_less);
  });
  projected.erase(std::unique(projected.begin(), projected.end()), projected.end());
  return projected;
}

}  // namespace fogdisc
