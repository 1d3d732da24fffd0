#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fogdisc/composer.hpp"
#include "fogdisc/proxy.hpp"
#include "fogdisc/rd_wire.hpp"
#include "fogdisc/taxonomy.hpp"

namespace fogdisc {

struct CloudConfig {
  std::string address = "cloud";
  std::string taxonomy_path;
  double min_similarity = 0.5;
  unsigned max_results = 10;
  double sim_weight = 0.7;
  double kw_weight = 0.3;
  WeightVector qos_weights = WeightVector::equal();
  // Per-gateway fan-out failure is retransmission exhaustion: with these
  // values a silent gateway is written off after 3.5 simulated seconds.
  double retransmit_base_ms = 500.0;
  unsigned max_retransmit = 2;

  void validate() const {
    if (address.empty()) raise(Errc::missing_field, "address");
    if (min_similarity < 0 || min_similarity > 1) raise(Errc::range_violation, "min_similarity");
    if (retransmit_base_ms <= 0) raise(Errc::range_violation, "retransmit_base_ms");
  }
};

inline Json cloud_config_to_json(const CloudConfig& c) {
  return Json{{"address", c.address},
              {"kw_weight", c.kw_weight},
              {"max_results", c.max_results},
              {"max_retransmit", c.max_retransmit},
              {"min_similarity", c.min_similarity},
              {"qos_weights", weights_to_json(c.qos_weights)},
              {"retransmit_base_ms", c.retransmit_base_ms},
              {"sim_weight", c.sim_weight},
              {"taxonomy_path", c.taxonomy_path}};
}

inline CloudConfig cloud_config_from_json(const Json& j) {
  detail::expect_members(j, {},
                         {"address", "kw_weight", "max_results", "max_retransmit",
                          "min_similarity", "qos_weights", "retransmit_base_ms", "sim_weight",
                          "taxonomy_path"});
  CloudConfig c;
  if (j.contains("address")) c.address = detail::string_field(j, "address");
  if (j.contains("taxonomy_path")) c.taxonomy_path = detail::string_field(j, "taxonomy_path");
  if (j.contains("min_similarity")) c.min_similarity = detail::number_field(j, "min_similarity");
  if (j.contains("sim_weight")) c.sim_weight = detail::number_field(j, "sim_weight");
  if (j.contains("kw_weight")) c.kw_weight = detail::number_field(j, "kw_weight");
  if (j.contains("retransmit_base_ms"))
    c.retransmit_base_ms = detail::number_field(j, "retransmit_base_ms");
  if (j.contains("max_results")) {
    if (!j.at("max_results").is_number_unsigned()) raise(Errc::malformed_json, "max_results");
    c.max_results = j.at("max_results").get<unsigned>();
  }
  if (j.contains("max_retransmit")) {
    if (!j.at("max_retransmit").is_number_unsigned())
      raise(Errc::malformed_json, "max_retransmit");
    c.max_retransmit = j.at("max_retransmit").get<unsigned>();
  }
  if (j.contains("qos_weights")) c.qos_weights = weights_from_json(j.at("qos_weights"));
  c.validate();
  return c;
}

struct GatewayInfo {
  std::string address;
  unsigned ordinal = 0;
  Location location;
  std::set<std::string> concepts;  // advertised top-level branches
  double last_seen = 0.0;
};

inline Json plan_to_json(const CompositionPlan& plan) {
  Json stages = Json::array();
  for (const auto& st : plan.stages)
    stages.push_back(Json{{"concept", st.svc.functional_concept},
                          {"gateway", st.gateway},
                          {"id", st.svc.id->render()},
                          {"path", st.svc.path}});
  return Json{{"aggregate", qos_to_json(plan.aggregate)},
              {"satisfied", plan.satisfied},
              {"stages", stages}};
}

/// Composition service: keeps the gateway index fresh from announcements,
/// fans discovery/provisioning out to gateways, clusters and composes the
/// aggregate, and caches finished plans with removal-driven repair.
class CloudNode {
 public:
  CloudNode(VirtualNet* net, const Taxonomy* taxonomy, CloudConfig cfg = {})
      : net_(net),
        taxonomy_(taxonomy),
        cfg_(std::move(cfg)),
        ep_(net, cfg_.address, RetransmitPolicy{cfg_.retransmit_base_ms, cfg_.max_retransmit}),
        proxy_(cfg_.address + "#http", [this](const CoapMessage& m, const std::string& f,
                                              const Responder& r) { dispatch(m, f, r); }) {
    cfg_.validate();
    ep_.set_request_handler(
        [this](const CoapMessage& m, const std::string& f, const Responder& r) {
          dispatch(m, f, r);
        });
  }

  CloudNode(const CloudNode&) = delete;
  CloudNode& operator=(const CloudNode&) = delete;

  const CloudConfig& config() const { return cfg_; }
  CoapEndpoint& endpoint() { return ep_; }
  HttpProxy& proxy() { return proxy_; }
  const std::map<std::string, GatewayInfo>& index() const { return index_; }
  size_t cache_size() const { return cache_.size(); }

  void dispatch(const CoapMessage& msg, const std::string& from, const Responder& respond) {
    try {
      route(msg, respond);
    } catch (const Error& e) {
      respond_error(respond, e);
    } catch (const std::exception& e) {
      respond(code::bad_request, to_bytes(std::string("BadPayload: ") + e.what()));
    }
  }

  // A service disappeared from a gateway: repair cached plans from cluster
  // siblings where possible, evict the rest.
  void monitor_event(const std::string& gateway, const Identifier& service_id) {
    const std::string victim = gateway + "|" + service_id.render();
    for (auto it = cache_.begin(); it != cache_.end();) {
      CacheEntry& e = it->second;
      for (auto& cl : e.clusters)
        std::erase_if(cl.members, [&](const StageRef& m) { return m.render() == victim; });
      bool hit = false;
      for (const auto& st : e.plan.stages)
        if (st.render() == victim) hit = true;
      if (!hit) {
        ++it;
        continue;
      }
      if (repair(e, victim)) {
        net_->bump("plan_repaired");
        ++it;
      } else {
        net_->bump("plan_evicted");
        it = cache_.erase(it);
      }
    }
  }

 private:
  struct CacheEntry {
    CompositionRequest request;
    CompositionPlan plan;
    std::vector<ServiceCluster> clusters;  // ranked, for sibling repair
  };

  struct ComposeFlow {
    CompositionRequest request;
    std::string key;
    std::optional<Responder> respond;
    std::vector<RemoteHit> hits;
    std::set<std::string> seen;  // StageRef::render keys
    std::vector<std::string> targets;
    unsigned pending = 0;
    unsigned failures = 0;
    bool second_round = false;
  };

  struct DiscoverFlow {
    DiscoveryRequest request;
    WeightVector weights = WeightVector::equal();
    std::optional<Responder> respond;
    std::map<std::pair<std::string, std::string>, ServiceDescription> svc;
    std::vector<MatchResult> hits;
    std::set<std::pair<std::string, std::string>> seen;
    unsigned pending = 0;
    unsigned failures = 0;
    unsigned targets = 0;
  };

  void route(const CoapMessage& msg, const Responder& respond) {
    const std::string path = msg.path();
    if (path == "/gw/announce") {
      if (!(msg.code == code::post)) raise(Errc::unsupported_method, path);
      return handle_announce(msg, respond);
    }
    if (path == "/rd-lookup") {
      if (!(msg.code == code::get)) raise(Errc::unsupported_method, path);
      return handle_discovery(msg, respond);
    }
    if (path == "/compose") {
      if (!(msg.code == code::post)) raise(Errc::unsupported_method, path);
      return handle_compose(msg, respond);
    }
    raise(Errc::not_found, path);
  }

  // -- gateway index ------------------------------------------------------------

  void handle_announce(const CoapMessage& msg, const Responder& respond) {
    Json j = parse_json_payload(msg);
    detail::expect_members(j, {"address", "concepts", "location", "ordinal", "removed"}, {});
    GatewayInfo info;
    info.address = detail::string_field(j, "address");
    info.location = location_from_json(j.at("location"));
    if (!j.at("ordinal").is_number_unsigned()) raise(Errc::malformed_json, "ordinal");
    info.ordinal = j.at("ordinal").get<unsigned>();
    info.concepts = detail::string_set_field(j, "concepts");
    info.last_seen = net_->now();
    auto it = index_.find(info.address);
    if (it != index_.end() && it->second.last_seen > info.last_seen)
      info.last_seen = it->second.last_seen;  // keep monotone
    index_[info.address] = info;
    if (!j.at("removed").is_array()) raise(Errc::malformed_json, "removed");
    for (const auto& rid : j.at("removed")) {
      if (!rid.is_string()) raise(Errc::malformed_json, "removed");
      monitor_event(info.address, Identifier::parse(rid.get<std::string>()));
    }
    respond(code::changed);
  }

  // Gateways whose advertised branches intersect the request's branch; all of
  // them when nothing advertises it (it may be registrable but unseen yet).
  std::vector<std::string> select_gateways(const std::set<std::string>& branches) const {
    std::vector<std::string> hit, all;
    for (const auto& [addr, info] : index_) {
      all.push_back(addr);
      for (const auto& b : branches)
        if (info.concepts.count(b)) {
          hit.push_back(addr);
          break;
        }
    }
    return hit.empty() ? all : hit;
  }

  // -- discovery fan-out ------------------------------------------------------------

  void handle_discovery(const CoapMessage& msg, const Responder& respond) {
    ParsedDiscovery pd =
        parse_discovery_query(msg.queries(), cfg_.min_similarity, cfg_.max_results);
    pd.request.validate(*taxonomy_);
    if (index_.empty()) raise(Errc::no_gateways_known, "empty index");
    auto fl = std::make_shared<DiscoverFlow>();
    fl->request = pd.request;
    fl->weights = pd.weights.empty() ? cfg_.qos_weights : WeightVector::make(pd.weights);
    fl->respond = respond;
    std::set<std::string> branches;
    if (auto b = taxonomy_->top_level_ancestor(pd.request.concept_iri)) branches.insert(*b);
    auto targets = select_gateways(branches);
    fl->pending = fl->targets = static_cast<unsigned>(targets.size());
    Json q{{"kind", "discovery"}, {"request", discovery_request_to_json(fl->request)}};
    Bytes payload = to_bytes(canonical_dump(q));
    for (const auto& g : targets) {
      net_->bump("cloud_fanout");
      ep_.request(g,
                  make_request(code::post, "/dht/query", {}, payload,
                               kContentFormatJsonLdDefault),
                  [this, fl](Expected<CoapMessage> r) { on_discover_reply(fl, std::move(r)); });
    }
  }

  void on_discover_reply(std::shared_ptr<DiscoverFlow> fl, Expected<CoapMessage> resp) {
    --fl->pending;
    if (!resp || !(resp.value().code == code::content)) {
      ++fl->failures;
    } else {
      try {
        Json j = Json::parse(to_string(resp.value().payload));
        for (const auto& hj : j.at("hits")) {
          RemoteHit h = remote_hit_from_json(hj);
          auto key = std::make_pair(h.match.gateway, h.match.service_id.render());
          if (!fl->seen.insert(key).second) continue;
          fl->hits.push_back(h.match);
          fl->svc[key] = std::move(h.svc);
        }
      } catch (const std::exception&) {
        ++fl->failures;
      }
    }
    if (fl->pending != 0) return;
    if (fl->failures == fl->targets) {
      respond_error(*fl->respond, Error(Errc::all_gateways_timed_out, "discovery"));
      return;
    }
    if (fl->hits.empty()) {
      respond_error(*fl->respond, Error(Errc::no_remote_match, fl->request.concept_iri));
      return;
    }
    std::sort(fl->hits.begin(), fl->hits.end());
    if (fl->hits.size() > fl->request.max_results) fl->hits.resize(fl->request.max_results);
    std::vector<std::pair<MatchResult, QoSProfile>> pairs;
    for (const auto& m : fl->hits)
      pairs.push_back({m, fl->svc.at({m.gateway, m.service_id.render()}).qos});
    std::vector<LinkView> views;
    for (const auto& rk : select_rank(pairs, fl->weights, fl->request.max_results)) {
      LinkView v;
      v.gateway = rk.match.gateway;
      std::string p = fl->svc.at({rk.match.gateway, rk.match.service_id.render()}).path;
      v.path = (p.empty() || p[0] != '/') ? "/" + p : p;
      v.rt = fl->request.concept_iri;
      v.degree = rk.match.degree;
      v.score = rk.match.score;
      v.utility = rk.utility;
      views.push_back(std::move(v));
    }
    (*fl->respond)(code::content, to_bytes(render_discovery_links(views)), kContentFormatLink);
  }

  // -- composition ----------------------------------------------------------------

  void handle_compose(const CoapMessage& msg, const Responder& respond) {
    CompositionRequest r = composition_request_from_json(parse_json_payload(msg));
    std::string key = canonical_dump(composition_request_to_json(r));
    auto cached = cache_.find(key);
    if (cached != cache_.end()) {
      net_->bump("cache_hit");
      respond(code::content, to_bytes(canonical_dump(plan_to_json(cached->second.plan))),
              kContentFormatJsonLdDefault);
      return;
    }
    net_->bump("cache_miss");
    if (index_.empty()) raise(Errc::no_gateways_known, "empty index");
    auto fl = std::make_shared<ComposeFlow>();
    fl->request = std::move(r);
    fl->key = std::move(key);
    fl->respond = respond;
    for (const auto& [addr, _] : index_) fl->targets.push_back(addr);
    provision_round(fl, fl->request.available_inputs);
  }

  void provision_round(std::shared_ptr<ComposeFlow> fl, const std::set<std::string>& inputs) {
    fl->pending = static_cast<unsigned>(fl->targets.size());
    fl->failures = 0;
    Json q{{"inputs", detail::sorted_array(inputs)},
           {"kind", "provision"},
           {"outputs", detail::sorted_array(fl->request.goal_outputs)}};
    Bytes payload = to_bytes(canonical_dump(q));
    for (const auto& g : fl->targets) {
      net_->bump("cloud_fanout");
      ep_.request(g,
                  make_request(code::post, "/dht/query", {}, payload,
                               kContentFormatJsonLdDefault),
                  [this, fl](Expected<CoapMessage> r) { on_provision_reply(fl, std::move(r)); });
    }
  }

  void on_provision_reply(std::shared_ptr<ComposeFlow> fl, Expected<CoapMessage> resp) {
    --fl->pending;
    if (!resp || !(resp.value().code == code::content)) {
      ++fl->failures;
    } else {
      try {
        Json j = Json::parse(to_string(resp.value().payload));
        for (const auto& hj : j.at("hits")) {
          RemoteHit h = remote_hit_from_json(hj);
          StageRef ref{h.match.gateway, h.svc};
          if (!fl->seen.insert(ref.render()).second) continue;
          fl->hits.push_back(std::move(h));
        }
      } catch (const std::exception&) {
        ++fl->failures;
      }
    }
    if (fl->pending != 0) return;
    if (fl->failures == fl->targets.size() && !fl->second_round) {
      respond_error(*fl->respond, Error(Errc::all_gateways_timed_out, "provision"));
      return;
    }
    finish_compose(fl);
  }

  void finish_compose(std::shared_ptr<ComposeFlow> fl) {
    std::vector<StageRef> candidates;
    for (const auto& h : fl->hits) candidates.push_back({h.match.gateway, h.svc});
    auto clusters = classify(candidates);
    rank_clusters(clusters, fl->request.qos_weights);
    std::vector<CompositionPlan> plans;
    try {
      plans = compose(fl->request, clusters, *taxonomy_);
    } catch (const Error& e) {
      if (e.code() == Errc::no_plan_found && !fl->second_round) {
        // Mid-chain providers scattered across gateways may not have been
        // reported: re-query once with every output seen so far as an input.
        fl->second_round = true;
        std::set<std::string> expanded = fl->request.available_inputs;
        for (const auto& h : fl->hits)
          expanded.insert(h.svc.outputs.begin(), h.svc.outputs.end());
        provision_round(fl, expanded);
        return;
      }
      respond_error(*fl->respond, e);
      return;
    }
    CompositionPlan best =
        optimize(plans, clusters, fl->request, *taxonomy_, fl->request.qos_weights);
    cache_[fl->key] = CacheEntry{fl->request, best, clusters};
    (*fl->respond)(code::content, to_bytes(canonical_dump(plan_to_json(best))),
                   kContentFormatJsonLdDefault);
  }

  // Replace the victim stage with the best remaining sibling of its cluster;
  // the rebuilt plan must re-validate before it replaces the cached one.
  bool repair(CacheEntry& e, const std::string& victim) {
    CompositionPlan candidate = e.plan;
    for (auto& st : candidate.stages) {
      if (st.render() != victim) continue;
      std::vector<std::string> sig(st.svc.outputs.begin(), st.svc.outputs.end());
      std::sort(sig.begin(), sig.end());
      const ServiceCluster* home = nullptr;
      for (const auto& cl : e.clusters)
        if (cl.functional_concept == st.svc.functional_concept && cl.outputs_signature == sig)
          home = &cl;
      if (!home || home->members.empty()) return false;
      st = home->members.front();  // members stay ranked best-first
    }
    candidate.aggregate = aggregate_of(candidate.stages);
    if (!validate_plan(*taxonomy_, e.request, candidate)) return false;
    e.plan = std::move(candidate);
    return true;
  }

  VirtualNet* net_;
  const Taxonomy* taxonomy_;
  CloudConfig cfg_;
  CoapEndpoint ep_;
  HttpProxy proxy_;
  std::map<std::string, GatewayInfo> index_;
  std::map<std::string, CacheEntry> cache_;
};

}  // namespace fogdisc
