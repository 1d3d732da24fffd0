#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fogdisc/common.hpp"

namespace fogdisc {

/// Concept taxonomy: a single-rooted DAG loaded from `child < parent` lines.
/// A bare line declares a concept with no parents (the root). `#` starts a
/// comment line.
class Taxonomy {
 public:
  static Taxonomy load(const std::string& text) {
    Taxonomy t;
    std::set<std::string> declared;
    std::set<std::string> referenced;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      auto trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#') continue;
      auto lt = trimmed.find('<');
      if (lt == std::string::npos) {
        declared.insert(trimmed);
        t.parents_[trimmed];
      } else {
        std::string child = trim(trimmed.substr(0, lt));
        std::string parent = trim(trimmed.substr(lt + 1));
        if (child.empty() || parent.empty())
          raise(Errc::dangling_parent, "bad edge line: " + trimmed);
        declared.insert(child);
        referenced.insert(parent);
        t.parents_[child].insert(parent);
      }
    }
    for (const auto& p : referenced)
      if (!declared.count(p)) raise(Errc::dangling_parent, p);

    std::vector<std::string> roots;
    for (const auto& c : declared)
      if (t.parents_[c].empty()) roots.push_back(c);
    if (roots.size() != 1)
      raise(Errc::multiple_roots, roots.empty() ? "no root" : std::to_string(roots.size()));
    t.root_ = roots.front();

    t.check_acyclic();
    t.compute_closure();
    return t;
  }

  bool contains(const std::string& c) const { return parents_.count(c) != 0; }

  const std::string& root() const { return root_; }

  const std::set<std::string>& concepts() const { return concepts_; }

  // 1 + length of the shortest ancestor path to the root; depth(root) == 1.
  int depth(const std::string& c) const {
    auto it = depth_.find(c);
    if (it == depth_.end()) raise(Errc::unknown_concept, c);
    return it->second;
  }

  // Reflexive: a concept subsumes itself.
  bool subsumes(const std::string& ancestor, const std::string& descendant) const {
    if (!contains(ancestor)) raise(Errc::unknown_concept, ancestor);
    return ancestors_of(descendant).count(ancestor) != 0;
  }

  // Wu-Palmer: 2*depth(lca) / (depth(a) + depth(b)). The lca is the deepest
  // common ancestor; ties break to the lexicographically smallest IRI.
  double similarity(const std::string& a, const std::string& b) const {
    const auto& anc_a = ancestors_of(a);
    const auto& anc_b = ancestors_of(b);
    std::string lca;
    int best = 0;
    for (const auto& c : anc_a) {
      if (!anc_b.count(c)) continue;
      int d = depth_.at(c);
      if (d > best || (d == best && (lca.empty() || c < lca))) {
        best = d;
        lca = c;
      }
    }
    return 2.0 * best / (depth(a) + depth(b));
  }

  // All ancestors including the concept itself.
  const std::set<std::string>& ancestors_of(const std::string& c) const {
    auto it = closure_.find(c);
    if (it == closure_.end()) raise(Errc::unknown_concept, c);
    return it->second;
  }

  // Top-level branches: direct children of the root, lexicographic.
  const std::vector<std::string>& top_level() const { return top_level_; }

  // Depth-2 ancestor of c, lexicographically smallest when the DAG offers
  // several. The root has none.
  std::optional<std::string> top_level_ancestor(const std::string& c) const {
    std::optional<std::string> best;
    for (const auto& a : ancestors_of(c)) {
      if (depth_.at(a) != 2) continue;
      if (!best || a < *best) best = a;
    }
    return best;
  }

  // Sector 0 is reserved for the root; branches take 1 + their lexicographic
  // index among top-level concepts.
  unsigned sector_of(const std::string& c) const {
    if (!contains(c)) raise(Errc::unknown_concept, c);
    if (c == root_) return 0;
    auto branch = top_level_ancestor(c);
    auto it = std::find(top_level_.begin(), top_level_.end(), *branch);
    return 1u + static_cast<unsigned>(it - top_level_.begin());
  }

 private:
  static std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  void check_acyclic() const {
    std::map<std::string, int> state;  // 0 new, 1 active, 2 done
    for (const auto& [c, _] : parents_) {
      std::vector<std::pair<std::string, bool>> stack{{c, false}};
      while (!stack.empty()) {
        auto [node, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
          state[node] = 2;
          continue;
        }
        if (state[node] == 2) continue;
        if (state[node] == 1) raise(Errc::cycle_detected, node);
        state[node] = 1;
        stack.push_back({node, true});
        for (const auto& p : parents_.at(node)) {
          if (state[p] == 1) raise(Errc::cycle_detected, p);
          if (state[p] == 0) stack.push_back({p, false});
        }
      }
    }
  }

  void compute_closure() {
    for (const auto& [c, _] : parents_) concepts_.insert(c);
    // depths via repeated relaxation (graphs here are tiny)
    depth_[root_] = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [c, ps] : parents_) {
        int best = -1;
        for (const auto& p : ps) {
          auto it = depth_.find(p);
          if (it != depth_.end() && (best < 0 || it->second + 1 < best))
            best = it->second + 1;
        }
        if (best > 0) {
          auto it = depth_.find(c);
          if (it == depth_.end() || it->second != best) {
            depth_[c] = best;
            changed = true;
          }
        }
      }
    }
    for (const auto& c : concepts_) {
      std::set<std::string> anc{c};
      std::vector<std::string> frontier{c};
      while (!frontier.empty()) {
        auto cur = frontier.back();
        frontier.pop_back();
        for (const auto& p : parents_.at(cur))
          if (anc.insert(p).second) frontier.push_back(p);
      }
      closure_[c] = std::move(anc);
    }
    for (const auto& c : concepts_)
      if (c != root_ && depth_.at(c) == 2) top_level_.push_back(c);
    std::sort(top_level_.begin(), top_level_.end());
  }

  std::map<std::string, std::set<std::string>> parents_;
  std::set<std::string> concepts_;
  std::map<std::string, int> depth_;
  std::map<std::string, std::set<std::string>> closure_;
  std::vector<std::string> top_level_;
  std::string root_;
};

inline Taxonomy load_taxonomy(const std::string& text) { return Taxonomy::load(text); }

inline Taxonomy load_taxonomy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::scenario_parse_error, "cannot open taxonomy: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return Taxonomy::load(buf.str());
}

}  // namespace fogdisc
