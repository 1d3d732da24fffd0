#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fogdisc/jsonld.hpp"
#include "fogdisc/ranking.hpp"
#include "fogdisc/taxonomy.hpp"

namespace fogdisc {

// Aggregate of a zero-stage plan: sums empty, products empty, security clamped
// to the top of its scale.
inline constexpr QoSProfile kEmptyAggregate{0.0, 0.0, 1.0, 1.0, 5};

struct CompositionRequest {
  std::set<std::string> available_inputs;
  std::set<std::string> goal_outputs;
  WeightVector qos_weights = WeightVector::equal();
  unsigned max_stages = 5;

  void validate() const {
    if (goal_outputs.empty()) raise(Errc::range_violation, "goal_outputs");
  }

  friend bool operator==(const CompositionRequest&, const CompositionRequest&) = default;
};

inline Json weights_to_json(const WeightVector& w) {
  Json j = Json::object();
  for (QosField f : kQosFields) j[qos_field_name(f)] = w.weight(f);
  return j;
}

inline WeightVector weights_from_json(const Json& j) {
  if (!j.is_object()) raise(Errc::malformed_json, "weights");
  std::map<QosField, double> raw;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number()) raise(Errc::malformed_json, it.key());
    raw[qos_field_from_name(it.key())] = it.value().get<double>();
  }
  return WeightVector::make(raw);
}

inline Json composition_request_to_json(const CompositionRequest& r,
                                        const std::map<QosField, double>& raw_weights) {
  Json weights = Json::object();
  for (const auto& [f, v] : raw_weights) weights[qos_field_name(f)] = v;
  return Json{{"available_inputs", detail::sorted_array(r.available_inputs)},
              {"goal_outputs", detail::sorted_array(r.goal_outputs)},
              {"max_stages", r.max_stages},
              {"qos_weights", weights}};
}

// Normalized form: the weights serialized post-normalization, so two requests
// differing only in weight scale share one canonical rendering (and one cache
// slot).
inline Json composition_request_to_json(const CompositionRequest& r) {
  std::map<QosField, double> w;
  for (QosField f : kQosFields) w[f] = r.qos_weights.weight(f);
  return composition_request_to_json(r, w);
}

inline CompositionRequest composition_request_from_json(const Json& j) {
  detail::expect_members(j, {"available_inputs", "goal_outputs"},
                         {"max_stages", "qos_weights"});
  CompositionRequest r;
  r.available_inputs = detail::string_set_field(j, "available_inputs");
  r.goal_outputs = detail::string_set_field(j, "goal_outputs");
  if (j.contains("max_stages")) {
    if (!j.at("max_stages").is_number_unsigned()) raise(Errc::malformed_json, "max_stages");
    r.max_stages = j.at("max_stages").get<unsigned>();
  }
  if (j.contains("qos_weights")) r.qos_weights = weights_from_json(j.at("qos_weights"));
  r.validate();
  return r;
}

struct StageRef {
  std::string gateway;
  ServiceDescription svc;

  std::string render() const { return gateway + "|" + svc.id->render(); }

  friend bool operator==(const StageRef&, const StageRef&) = default;
};

struct CompositionPlan {
  std::vector<StageRef> stages;
  QoSProfile aggregate = kEmptyAggregate;
  bool satisfied = false;

  std::vector<std::string> stage_ids() const {
    std::vector<std::string> out;
    for (const auto& s : stages) out.push_back(s.render());
    return out;
  }

  friend bool operator==(const CompositionPlan&, const CompositionPlan&) = default;
};

struct ServiceCluster {
  std::string functional_concept;
  std::vector<std::string> outputs_signature;  // sorted
  std::vector<StageRef> members;

  friend bool operator==(const ServiceCluster&, const ServiceCluster&) = default;
};

// -- classification -----------------------------------------------------------

inline std::vector<ServiceCluster> classify(const std::vector<StageRef>& candidates) {
  std::map<std::pair<std::string, std::vector<std::string>>, std::vector<StageRef>> groups;
  for (const auto& c : candidates) {
    std::vector<std::string> sig(c.svc.outputs.begin(), c.svc.outputs.end());
    groups[{c.svc.functional_concept, sig}].push_back(c);
  }
  std::vector<ServiceCluster> out;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const StageRef& a, const StageRef& b) {
      return a.render() < b.render();
    });
    out.push_back({key.first, key.second, std::move(members)});
  }
  return out;
}

// Order each cluster's members by SAW utility over the cluster (desc), ties by
// rendered reference. Composition picks representatives from the front.
inline void rank_clusters(std::vector<ServiceCluster>& clusters, const WeightVector& w) {
  for (auto& cl : clusters) {
    if (cl.members.size() < 2) continue;
    std::vector<QoSProfile> profiles;
    for (const auto& m : cl.members) profiles.push_back(m.svc.qos);
    auto rows = normalize(profiles);
    std::vector<std::pair<double, StageRef>> scored;
    for (size_t i = 0; i < cl.members.size(); ++i)
      scored.push_back({saw_utility(rows[i], w), cl.members[i]});
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) {
                       if (a.first != b.first) return a.first > b.first;
                       return a.second.render() < b.second.render();
                     });
    cl.members.clear();
    for (auto& [_, m] : scored) cl.members.push_back(std::move(m));
  }
}

// -- QoS aggregation -----------------------------------------------------------

inline QoSProfile aggregate_qos(const std::vector<QoSProfile>& stages) {
  if (stages.empty()) raise(Errc::empty_plan, "aggregate_qos");
  QoSProfile out = kEmptyAggregate;
  for (const auto& q : stages) {
    out.delay_ms += q.delay_ms;
    out.price += q.price;
    out.reliability *= q.reliability;
    out.availability *= q.availability;
    out.security_level = std::min(out.security_level, q.security_level);
  }
  return out;
}

inline QoSProfile aggregate_of(const std::vector<StageRef>& stages) {
  if (stages.empty()) return kEmptyAggregate;
  std::vector<QoSProfile> qs;
  for (const auto& s : stages) qs.push_back(s.svc.qos);
  return aggregate_qos(qs);
}

// -- dataflow -------------------------------------------------------------------

inline bool concept_satisfied(const Taxonomy& t, const std::string& required,
                              const std::set<std::string>& have) {
  for (const auto& c : have) {
    if (c == required) return true;
    if (t.contains(required) && t.contains(c) && t.subsumes(required, c)) return true;
  }
  return false;
}

inline bool applicable(const Taxonomy& t, const ServiceDescription& s,
                       const std::set<std::string>& have) {
  for (const auto& in : s.inputs)
    if (!concept_satisfied(t, in, have)) return false;
  return true;
}

inline bool goal_covered(const Taxonomy& t, const std::set<std::string>& goal,
                         const std::set<std::string>& have) {
  for (const auto& g : goal)
    if (!concept_satisfied(t, g, have)) return false;
  return true;
}

// Chain check + goal coverage + aggregate consistency, used for cache
// soundness and plan repair.
inline bool validate_plan(const Taxonomy& t, const CompositionRequest& r,
                          const CompositionPlan& plan) {
  std::set<std::string> have = r.available_inputs;
  for (const auto& st : plan.stages) {
    if (!applicable(t, st.svc, have)) return false;
    have.insert(st.svc.outputs.begin(), st.svc.outputs.end());
  }
  if (plan.satisfied && !goal_covered(t, r.goal_outputs, have)) return false;
  QoSProfile agg = aggregate_of(plan.stages);
  auto close = [](double a, double b) { return std::abs(a - b) < 1e-9; };
  return close(agg.delay_ms, plan.aggregate.delay_ms) && close(agg.price, plan.aggregate.price) &&
         close(agg.reliability, plan.aggregate.reliability) &&
         close(agg.availability, plan.aggregate.availability) &&
         agg.security_level == plan.aggregate.security_level;
}

// -- composition ------------------------------------------------------------------

namespace detail {

struct ComposeSearch {
  const Taxonomy* t;
  const CompositionRequest* r;
  const std::vector<StageRef>* reps;
  unsigned target_len = 0;
  std::vector<size_t> prefix;
  std::vector<bool> used;
  std::vector<std::vector<size_t>> found;

  void dfs(const std::set<std::string>& have) {
    if (prefix.size() == target_len) {
      if (goal_covered(*t, r->goal_outputs, have)) found.push_back(prefix);
      return;
    }
    // a prefix that already covers the goal belongs to a shorter length
    if (goal_covered(*t, r->goal_outputs, have)) return;
    for (size_t i = 0; i < reps->size(); ++i) {
      if (used[i]) continue;
      const ServiceDescription& s = (*reps)[i].svc;
      if (!applicable(*t, s, have)) continue;
      used[i] = true;
      prefix.push_back(i);
      std::set<std::string> next = have;
      next.insert(s.outputs.begin(), s.outputs.end());
      dfs(next);
      prefix.pop_back();
      used[i] = false;
    }
  }
};

}  // namespace detail

// All minimal-length satisfied plans built from the top candidate of each
// cluster (forward chaining, inputs satisfied under subsumption).
inline std::vector<CompositionPlan> compose(const CompositionRequest& r,
                                            const std::vector<ServiceCluster>& clusters,
                                            const Taxonomy& t) {
  r.validate();
  if (goal_covered(t, r.goal_outputs, r.available_inputs))
    return {CompositionPlan{{}, kEmptyAggregate, true}};
  std::vector<StageRef> reps;
  for (const auto& cl : clusters)
    if (!cl.members.empty()) reps.push_back(cl.members.front());
  detail::ComposeSearch search{&t, &r, &reps};
  search.used.assign(reps.size(), false);
  for (unsigned len = 1; len <= r.max_stages && len <= reps.size(); ++len) {
    search.target_len = len;
    search.found.clear();
    search.dfs(r.available_inputs);
    if (search.found.empty()) continue;
    std::vector<CompositionPlan> out;
    for (const auto& idxs : search.found) {
      CompositionPlan p;
      for (size_t i : idxs) p.stages.push_back(reps[i]);
      p.aggregate = aggregate_of(p.stages);
      p.satisfied = true;
      out.push_back(std::move(p));
    }
    return out;
  }
  raise(Errc::no_plan_found, "within max_stages");
}

// -- optimization -------------------------------------------------------------------

namespace detail {

inline const ServiceCluster* cluster_of(const std::vector<ServiceCluster>& clusters,
                                        const StageRef& st) {
  std::vector<std::string> sig(st.svc.outputs.begin(), st.svc.outputs.end());
  for (const auto& cl : clusters)
    if (cl.functional_concept == st.svc.functional_concept && cl.outputs_signature == sig)
      return &cl;
  return nullptr;
}

inline bool better_plan(const std::vector<std::string>& a_ids, double a_util, size_t a_len,
                        const std::vector<std::string>& b_ids, double b_util, size_t b_len) {
  if (a_util != b_util) return a_util > b_util;
  if (a_len != b_len) return a_len < b_len;
  return a_ids < b_ids;
}

}  // namespace detail

inline constexpr std::uint64_t kExhaustiveComboLimit = 512;

// Per-stage member substitution: exhaustive SAW argmax when the variant space
// is small, greedy per-stage otherwise.
inline CompositionPlan optimize(const std::vector<CompositionPlan>& plans,
                                const std::vector<ServiceCluster>& clusters,
                                const CompositionRequest& r, const Taxonomy& t,
                                const WeightVector& w) {
  if (plans.empty()) raise(Errc::no_plan_found, "optimize");
  std::uint64_t combos = 0;
  std::vector<std::vector<const ServiceCluster*>> plan_clusters(plans.size());
  for (size_t pi = 0; pi < plans.size(); ++pi) {
    std::uint64_t c = 1;
    for (const auto& st : plans[pi].stages) {
      const ServiceCluster* cl = detail::cluster_of(clusters, st);
      plan_clusters[pi].push_back(cl);
      c *= cl ? cl->members.size() : 1;
    }
    combos += c;
  }

  std::vector<CompositionPlan> variants;
  if (combos <= kExhaustiveComboLimit) {
    for (size_t pi = 0; pi < plans.size(); ++pi) {
      const auto& plan = plans[pi];
      std::vector<size_t> pick(plan.stages.size(), 0);
      while (true) {
        CompositionPlan v;
        v.satisfied = true;
        for (size_t si = 0; si < plan.stages.size(); ++si) {
          const ServiceCluster* cl = plan_clusters[pi][si];
          v.stages.push_back(cl ? cl->members[pick[si]] : plan.stages[si]);
        }
        v.aggregate = aggregate_of(v.stages);
        if (validate_plan(t, r, v)) variants.push_back(std::move(v));
        // advance the mixed-radix counter
        size_t si = 0;
        for (; si < pick.size(); ++si) {
          const ServiceCluster* cl = plan_clusters[pi][si];
          size_t radix = cl ? cl->members.size() : 1;
          if (++pick[si] < radix) break;
          pick[si] = 0;
        }
        if (si == pick.size()) break;
      }
    }
  } else {
    for (size_t pi = 0; pi < plans.size(); ++pi) {
      const auto& plan = plans[pi];
      CompositionPlan g;
      g.satisfied = true;
      std::set<std::string> have = r.available_inputs;
      for (size_t si = 0; si < plan.stages.size(); ++si) {
        const ServiceCluster* cl = plan_clusters[pi][si];
        StageRef chosen = plan.stages[si];
        if (cl) {
          for (const auto& m : cl->members) {  // members pre-ranked by utility
            if (applicable(t, m.svc, have)) {
              chosen = m;
              break;
            }
          }
        }
        have.insert(chosen.svc.outputs.begin(), chosen.svc.outputs.end());
        g.stages.push_back(std::move(chosen));
      }
      g.aggregate = aggregate_of(g.stages);
      if (validate_plan(t, r, g)) variants.push_back(std::move(g));
    }
  }
  if (variants.empty()) raise(Errc::no_plan_found, "no valid variant");

  std::vector<QoSProfile> aggs;
  for (const auto& v : variants) aggs.push_back(v.aggregate);
  auto rows = normalize(aggs);
  size_t best = 0;
  double best_util = saw_utility(rows[0], w);
  for (size_t i = 1; i < variants.size(); ++i) {
    double u = saw_utility(rows[i], w);
    if (detail::better_plan(variants[i].stage_ids(), u, variants[i].stages.size(),
                            variants[best].stage_ids(), best_util, variants[best].stages.size())) {
      best = i;
      best_util = u;
    }
  }
  return variants[best];
}

}  // namespace fogdisc
