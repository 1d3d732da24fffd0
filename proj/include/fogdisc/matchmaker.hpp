#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "fogdisc/directory.hpp"
#include "fogdisc/sparql.hpp"

namespace fogdisc {

struct QosConstraint {
  QosField field{};
  Cmp cmp{};
  double bound = 0;

  friend bool operator==(const QosConstraint&, const QosConstraint&) = default;
};

struct DiscoveryRequest {
  std::string concept_iri;
  std::set<std::string> keywords;
  std::vector<QosConstraint> qos_constraints;
  double min_similarity = 0.5;
  unsigned max_results = 10;

  void validate(const Taxonomy& t) const {
    if (!t.contains(concept_iri)) raise(Errc::unknown_concept, concept_iri);
    if (min_similarity < 0 || min_similarity > 1)
      raise(Errc::range_violation, "min_similarity");
    for (const auto& c : qos_constraints)
      if (!QoSProfile::legal(c.field, c.bound))
        raise(Errc::range_violation, qos_field_name(c.field));
  }

  friend bool operator==(const DiscoveryRequest&, const DiscoveryRequest&) = default;
};

enum class MatchDegree { exact, plugin, subsume, similar, fail };

inline unsigned degree_rank(MatchDegree d) { return static_cast<unsigned>(d); }

inline const char* degree_name(MatchDegree d) {
  switch (d) {
    case MatchDegree::exact: return "exact";
    case MatchDegree::plugin: return "plugin";
    case MatchDegree::subsume: return "subsume";
    case MatchDegree::similar: return "similar";
    case MatchDegree::fail: return "fail";
  }
  return "?";
}

inline MatchDegree degree_from_name(const std::string& n) {
  for (auto d : {MatchDegree::exact, MatchDegree::plugin, MatchDegree::subsume,
                 MatchDegree::similar, MatchDegree::fail})
    if (n == degree_name(d)) return d;
  raise(Errc::malformed_json, "degree " + n);
}

struct MatchResult {
  Identifier service_id;
  std::string gateway;  // address of the hosting gateway
  MatchDegree degree = MatchDegree::fail;
  double score = 0;

  // Exact > Plugin > Subsume > Similar, then score desc, then id asc.
  friend bool operator<(const MatchResult& a, const MatchResult& b) {
    if (degree_rank(a.degree) != degree_rank(b.degree))
      return degree_rank(a.degree) < degree_rank(b.degree);
    if (a.score != b.score) return a.score > b.score;
    if (a.service_id != b.service_id) return a.service_id < b.service_id;
    return a.gateway < b.gateway;
  }
  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

// Compile the hard-constraint part of a request into a query over the
// registry's triple view. Keywords stay out of the query; they only
// contribute to scoring.
inline SelectQuery formulate_query(const DiscoveryRequest& r) {
  SelectQuery q;
  q.projected = {"service"};
  q.patterns.push_back({Term::var("service"), Term::iri(std::string(pred::functional_concept)),
                        Term::var("c")});
  for (const auto& c : r.qos_constraints) {
    std::string field = qos_field_name(c.field);
    q.patterns.push_back({Term::var("service"),
                          Term::iri(std::string(pred::qos_prefix) + field),
                          Term::var(field)});
    q.filters.push_back({field, c.cmp, c.bound});
  }
  return q;
}

inline MatchDegree match_degree(const std::string& req_concept, const std::string& svc_concept,
                                const Taxonomy& t, double min_similarity) {
  if (!t.contains(req_concept)) raise(Errc::unknown_concept, req_concept);
  if (!t.contains(svc_concept)) raise(Errc::unknown_concept, svc_concept);
  if (req_concept == svc_concept) return MatchDegree::exact;
  if (t.subsumes(req_concept, svc_concept)) return MatchDegree::plugin;
  if (t.subsumes(svc_concept, req_concept)) return MatchDegree::subsume;
  if (t.similarity(req_concept, svc_concept) >= min_similarity) return MatchDegree::similar;
  return MatchDegree::fail;
}

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0;
  std::vector<std::string> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  double inter = static_cast<double>(common.size());
  double uni = static_cast<double>(a.size() + b.size()) - inter;
  return inter / uni;
}

inline double score(const DiscoveryRequest& r, const ServiceDescription& s, const Taxonomy& t,
                    double sim_weight = 0.7, double kw_weight = 0.3) {
  if (r.concept_iri == s.functional_concept) return 1.0;
  double sim = t.similarity(r.concept_iri, s.functional_concept);
  if (r.keywords.empty()) return sim;
  return sim_weight * sim + kw_weight * jaccard(r.keywords, s.keywords);
}

inline bool qos_satisfies(const QoSProfile& q, const std::vector<QosConstraint>& cs) {
  for (const auto& c : cs)
    if (!cmp_apply(c.cmp, q.get(c.field), c.bound)) return false;
  return true;
}

namespace detail {

// Concepts whose services could still reach min_similarity after the keyword
// term is granted its maximum; keeps the index path a superset of the scan.
inline double candidate_threshold(const DiscoveryRequest& r, double sim_weight, double kw_weight) {
  if (r.keywords.empty() || sim_weight <= 0) return r.min_similarity;
  return std::max(0.0, (r.min_similarity - kw_weight) / sim_weight);
}

}  // namespace detail

// Degree/score for one candidate pair, with the final-degree rule applied:
// a result fails exactly when its score stays below the threshold.
inline MatchResult evaluate_candidate(const DiscoveryRequest& r, const ServiceDescription& s,
                                      const Taxonomy& t, const std::string& gateway,
                                      double sim_weight = 0.7, double kw_weight = 0.3) {
  MatchDegree deg = match_degree(r.concept_iri, s.functional_concept, t, r.min_similarity);
  double sc = score(r, s, t, sim_weight, kw_weight);
  if (sc < r.min_similarity) {
    deg = MatchDegree::fail;
  } else if (deg == MatchDegree::fail) {
    deg = MatchDegree::similar;  // keyword overlap lifted the score over the bar
  }
  return {*s.id, gateway, deg, sc};
}

inline std::vector<MatchResult> matchmake(const DiscoveryRequest& r, const Directory& dir,
                                          const std::string& gateway,
                                          double sim_weight = 0.7, double kw_weight = 0.3) {
  const Taxonomy& t = dir.taxonomy();
  r.validate(t);
  double threshold = detail::candidate_threshold(r, sim_weight, kw_weight);
  std::set<Identifier> candidates;
  for (const auto& c : t.concepts()) {
    if (c != r.concept_iri && t.similarity(r.concept_iri, c) < threshold) continue;
    auto hits = dir.index_lookup(c);
    candidates.insert(hits.begin(), hits.end());
  }
  std::vector<MatchResult> out;
  for (const auto& id : candidates) {
    const ServiceDescription& s = dir.get_service(id);
    if (!qos_satisfies(s.qos, r.qos_constraints)) continue;
    MatchResult m = evaluate_candidate(r, s, t, gateway, sim_weight, kw_weight);
    if (m.degree == MatchDegree::fail) continue;
    out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  if (out.size() > r.max_results) out.resize(r.max_results);
  return out;
}

}  // namespace fogdisc
