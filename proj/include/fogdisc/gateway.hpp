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
#include "fogdisc/directory.hpp"
#include "fogdisc/matchmaker.hpp"
#include "fogdisc/overlay.hpp"
#include "fogdisc/proxy.hpp"
#include "fogdisc/ranking.hpp"
#include "fogdisc/rd_wire.hpp"

namespace fogdisc {

struct GatewayConfig {
  std::string address;
  unsigned ordinal = 0;
  unsigned overlay_m = 16;
  std::optional<std::string> bootstrap;
  std::string taxonomy_path;
  std::string cloud;  // announce target; empty = standalone fog node
  Location location;
  double min_similarity = 0.5;
  unsigned max_results = 10;
  double sim_weight = 0.7;
  double kw_weight = 0.3;
  WeightVector qos_weights = WeightVector::equal();
  double lifetime_s = 90.0;
  unsigned fanout = 3;
  // Federation needs failure detection well under a lease period, so the
  // gateway defaults are tighter than the protocol-level ones: two retries on
  // a 500 ms base bound the dead-peer verdict at 3.5 s.
  double retransmit_base_ms = 500.0;
  unsigned max_retransmit = 2;
  double announce_interval_ms = 60000.0;
  double stabilize_interval_ms = 1000.0;
  double republish_interval_ms = 30000.0;
  double expiry_sweep_interval_ms = 1000.0;

  void validate() const {
    if (address.empty()) raise(Errc::missing_field, "address");
    if (overlay_m < 1 || overlay_m > 63) raise(Errc::range_violation, "overlay_m");
    if (min_similarity < 0 || min_similarity > 1) raise(Errc::range_violation, "min_similarity");
    if (sim_weight < 0 || kw_weight < 0) raise(Errc::range_violation, "score weights");
    if (lifetime_s <= 0) raise(Errc::range_violation, "lifetime_s");
    if (fanout < 1) raise(Errc::range_violation, "fanout");
    if (retransmit_base_ms <= 0) raise(Errc::range_violation, "retransmit_base_ms");
    location.validate();
  }

  OverlayConfig overlay_config() const {
    OverlayConfig oc;
    oc.m = overlay_m;
    oc.fanout = fanout;
    oc.stabilize_interval_ms = stabilize_interval_ms;
    oc.republish_interval_ms = republish_interval_ms;
    return oc;
  }
};

inline Json gateway_config_to_json(const GatewayConfig& c) {
  Json j{{"address", c.address},
         {"announce_interval_ms", c.announce_interval_ms},
         {"cloud", c.cloud},
         {"expiry_sweep_interval_ms", c.expiry_sweep_interval_ms},
         {"fanout", c.fanout},
         {"kw_weight", c.kw_weight},
         {"lifetime_s", c.lifetime_s},
         {"location", location_to_json(c.location)},
         {"max_retransmit", c.max_retransmit},
         {"max_results", c.max_results},
         {"min_similarity", c.min_similarity},
         {"ordinal", c.ordinal},
         {"overlay_m", c.overlay_m},
         {"qos_weights", weights_to_json(c.qos_weights)},
         {"republish_interval_ms", c.republish_interval_ms},
         {"retransmit_base_ms", c.retransmit_base_ms},
         {"sim_weight", c.sim_weight},
         {"stabilize_interval_ms", c.stabilize_interval_ms},
         {"taxonomy_path", c.taxonomy_path}};
  if (c.bootstrap) j["bootstrap"] = *c.bootstrap;
  return j;
}

inline GatewayConfig gateway_config_from_json(const Json& j) {
  detail::expect_members(
      j, {"address", "ordinal"},
      {"announce_interval_ms", "bootstrap", "cloud", "expiry_sweep_interval_ms", "fanout",
       "kw_weight", "lifetime_s", "location", "max_retransmit", "max_results", "min_similarity",
       "overlay_m", "qos_weights", "republish_interval_ms", "retransmit_base_ms", "sim_weight",
       "stabilize_interval_ms", "taxonomy_path"});
  GatewayConfig c;
  c.address = detail::string_field(j, "address");
  if (!j.at("ordinal").is_number_unsigned()) raise(Errc::malformed_json, "ordinal");
  c.ordinal = j.at("ordinal").get<unsigned>();
  auto num = [&](const char* key, double& out) {
    if (j.contains(key)) out = detail::number_field(j, key);
  };
  auto uns = [&](const char* key, unsigned& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_unsigned()) raise(Errc::malformed_json, key);
    out = j.at(key).get<unsigned>();
  };
  uns("overlay_m", c.overlay_m);
  uns("max_results", c.max_results);
  uns("fanout", c.fanout);
  uns("max_retransmit", c.max_retransmit);
  if (j.contains("bootstrap")) c.bootstrap = detail::string_field(j, "bootstrap");
  if (j.contains("taxonomy_path")) c.taxonomy_path = detail::string_field(j, "taxonomy_path");
  if (j.contains("cloud")) c.cloud = detail::string_field(j, "cloud");
  if (j.contains("location")) c.location = location_from_json(j.at("location"));
  if (j.contains("qos_weights")) c.qos_weights = weights_from_json(j.at("qos_weights"));
  num("min_similarity", c.min_similarity);
  num("sim_weight", c.sim_weight);
  num("kw_weight", c.kw_weight);
  num("lifetime_s", c.lifetime_s);
  num("retransmit_base_ms", c.retransmit_base_ms);
  num("announce_interval_ms", c.announce_interval_ms);
  num("stabilize_interval_ms", c.stabilize_interval_ms);
  num("republish_interval_ms", c.republish_interval_ms);
  num("expiry_sweep_interval_ms", c.expiry_sweep_interval_ms);
  c.validate();
  return c;
}

// The request concept plus its taxonomy ancestors down to depth 2, most
// specific first: the order pointer lookups are attempted when forwarding.
inline std::vector<std::string> forward_concepts(const Taxonomy& t,
                                                 const std::string& concept_iri) {
  std::vector<std::string> out{concept_iri};
  std::vector<std::pair<int, std::string>> ranked;
  for (const auto& a : t.ancestors_of(concept_iri)) {
    if (a == concept_iri) continue;
    int d = t.depth(a);
    if (d >= 2) ranked.push_back({-d, a});
  }
  std::sort(ranked.begin(), ranked.end());
  for (auto& [_, a] : ranked) out.push_back(a);
  return out;
}

// Services worth shipping to a composer: the forward closure reachable from
// the inputs, plus anything producing a goal output directly (partial matches
// whose inputs other gateways may cover).
inline std::vector<Identifier> provision_candidates(const Directory& dir, const Taxonomy& t,
                                                    const std::set<std::string>& inputs,
                                                    const std::set<std::string>& goals) {
  std::set<std::string> have = inputs;
  std::set<Identifier> picked;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [id, s] : dir.services()) {
      if (picked.count(id) || !applicable(t, s, have)) continue;
      picked.insert(id);
      for (const auto& o : s.outputs)
        if (have.insert(o).second) grew = true;
    }
  }
  for (const auto& [id, s] : dir.services()) {
    if (picked.count(id)) continue;
    std::set<std::string> outs(s.outputs.begin(), s.outputs.end());
    for (const auto& g : goals)
      if (concept_satisfied(t, g, outs)) {
        picked.insert(id);
        break;
      }
  }
  return {picked.begin(), picked.end()};
}

/// One fog node: directory + matchmaker behind CoAP resource-directory
/// endpoints, a Chord peer for federation, announce/expiry/republish timers,
/// and an HTTP proxy sharing the dispatch path.
class GatewayNode {
 public:
  GatewayNode(VirtualNet* net, const Taxonomy* taxonomy, GatewayConfig cfg)
      : net_(net),
        taxonomy_(taxonomy),
        cfg_(std::move(cfg)),
        directory_(taxonomy, cfg_.ordinal),
        ep_(net, cfg_.address, RetransmitPolicy{cfg_.retransmit_base_ms, cfg_.max_retransmit}),
        overlay_(&ep_, cfg_.overlay_config()),
        proxy_(cfg_.address + "#http", [this](const CoapMessage& m, const std::string& f,
                                              const Responder& r) { dispatch(m, f, r); }) {
    cfg_.validate();
    ep_.set_request_handler(
        [this](const CoapMessage& m, const std::string& f, const Responder& r) {
          dispatch(m, f, r);
        });
  }

  GatewayNode(const GatewayNode&) = delete;
  GatewayNode& operator=(const GatewayNode&) = delete;

  const GatewayConfig& config() const { return cfg_; }
  Directory& directory() { return directory_; }
  const Directory& directory() const { return directory_; }
  CoapEndpoint& endpoint() { return ep_; }
  OverlayNode& overlay() { return overlay_; }
  HttpProxy& proxy() { return proxy_; }
  bool running() const { return running_; }

  // Boot: create the ring (no bootstrap) or join through one, retrying a few
  // times while the bootstrap settles; then announce and arm timers.
  void start(std::function<void(Expected<bool>)> done = {}) {
    running_ = true;
    if (!cfg_.bootstrap) {
      overlay_.create_ring();
      after_start();
      if (done) done(Expected<bool>(true));
      return;
    }
    join_attempt(0, std::move(done));
  }

  // Abrupt stop: silences every timer chain without a goodbye. The object has
  // to outlive any armed timers, so a runner keeps halted nodes around.
  void halt() {
    running_ = false;
    overlay_.halt();
  }

  // Graceful departure: withdraw advertised pointers, then leave the ring.
  void leave(std::function<void()> done = {}) {
    running_ = false;
    auto concepts = directory_.advertised_concepts();
    auto finish = [this, done = std::move(done)] {
      overlay_.leave([done] {
        if (done) done();
      });
    };
    if (concepts.empty()) {
      finish();
      return;
    }
    auto remaining = std::make_shared<size_t>(concepts.size());
    for (const auto& c : concepts)
      overlay_.unpublish(c, cfg_.address, [remaining, finish](Expected<bool>) {
        if (--*remaining == 0) finish();
      });
  }

  // Lease sweep; returns the removed service ids (also announced to the cloud).
  std::vector<Identifier> expire_stale() {
    auto stale = directory_.stale_things(net_->now(), cfg_.lifetime_s * 1000.0);
    std::vector<Identifier> removed;
    if (stale.empty()) return removed;
    auto before = directory_.advertised_concepts();
    for (const auto& t : stale)
      for (auto& sid : directory_.delete_thing(t)) removed.push_back(sid);
    pointer_diff(before, directory_.advertised_concepts());
    if (!removed.empty()) announce_now(removed);
    return removed;
  }

  void announce_now(const std::vector<Identifier>& removed) {
    if (cfg_.cloud.empty()) return;
    Json rm = Json::array();
    for (const auto& id : removed) rm.push_back(id.render());
    Json body{{"address", cfg_.address},
              {"concepts", detail::sorted_array(directory_.advertised_top_level())},
              {"location", location_to_json(cfg_.location)},
              {"ordinal", cfg_.ordinal},
              {"removed", rm}};
    ep_.request(cfg_.cloud,
                make_request(code::post, "/gw/announce", {},
                             to_bytes(canonical_dump(body)), kContentFormatJsonLdDefault),
                [this](Expected<CoapMessage> r) {
                  if (!r) net_->bump("announce_failed");
                });
  }

  // Single entry point for native CoAP and the HTTP proxy alike.
  void dispatch(const CoapMessage& msg, const std::string& from, const Responder& respond) {
    try {
      route(msg, from, respond);
    } catch (const Error& e) {
      respond_error(respond, e);
    } catch (const std::exception& e) {
      respond(code::bad_request, to_bytes(std::string("BadPayload: ") + e.what()));
    }
  }

 private:
  struct RegChain {
    Responder respond;
    Identifier thing_id;
    std::vector<Identifier> svc_ids;
    std::pair<unsigned, unsigned> seq;
    std::vector<std::string> concepts;  // to publish, sorted
    std::vector<std::string> novel;     // rollback set
    size_t index = 0;
  };

  struct ForwardFlow {
    DiscoveryRequest request;
    WeightVector weights = WeightVector::equal();
    std::optional<Responder> respond;
    std::map<std::pair<std::string, std::string>, ServiceDescription> svc;  // (gw, id)
    std::vector<MatchResult> hits;
    std::set<std::pair<std::string, std::string>> seen;
    unsigned pending = 0;
    unsigned failures = 0;
    unsigned holder_count = 0;
    unsigned hops = 0;
  };

  void route(const CoapMessage& msg, const std::string& from, const Responder& respond) {
    const std::string path = msg.path();
    const bool get = msg.code == code::get;
    const bool post = msg.code == code::post;
    if (path == "/rd") {
      if (!post) raise(Errc::unsupported_method, path);
      return handle_registration(msg, respond);
    }
    if (path == "/rd-lookup") {
      if (!get) raise(Errc::unsupported_method, path);
      return handle_discovery(msg, from, respond);
    }
    if (path.rfind("/dht/", 0) == 0) {
      if (!post) raise(Errc::unsupported_method, path);
      return handle_dht(path, msg, respond);
    }
    if (path.rfind("/rd/", 0) == 0) {
      Identifier id = Identifier::parse(path.substr(4));
      if (get) return handle_get_entry(id, respond);
      if (msg.code == code::put) return handle_put(id, msg, respond);
      if (msg.code == code::del) return handle_delete(id, respond);
      raise(Errc::unsupported_method, path);
    }
    raise(Errc::not_found, path);
  }

  void handle_dht(const std::string& path, const CoapMessage& msg, const Responder& respond) {
    if (path == "/dht/query") return handle_query(msg, respond);
    if (!overlay_.in_ring()) {
      respond(code::service_unavailable, to_bytes("NotInRing"));
      return;
    }
    Json j = parse_json_payload(msg);
    if (path == "/dht/find") return overlay_.handle_find(j, respond);
    if (path == "/dht/notify") return overlay_.handle_notify(j, respond);
    if (path == "/dht/pointer") return overlay_.handle_pointer(j, respond);
    raise(Errc::not_found, path);
  }

  // -- registration -----------------------------------------------------------

  void handle_registration(const CoapMessage& msg, const Responder& respond) {
    RegistrationBundle b = parse_registration(to_string(msg.payload));
    auto seq = directory_.sequence_state();
    auto before = directory_.advertised_concepts();
    Identifier thing_id;
    std::vector<Identifier> svc_ids;
    bool thing_in = false;
    try {
      thing_id = directory_.post_thing(b.thing);
      thing_in = true;
      directory_.refresh_thing(thing_id, net_->now());
      for (auto s : b.services) {
        s.thing_id = thing_id;
        svc_ids.push_back(directory_.post_service(std::move(s)));
      }
    } catch (const Error&) {
      if (thing_in) directory_.delete_thing(thing_id);
      directory_.restore_sequence_state(seq);
      throw;
    }
    std::set<std::string> distinct;
    for (const auto& s : b.services) distinct.insert(s.functional_concept);
    auto st = std::shared_ptr<RegChain>(
        new RegChain{respond, thing_id, std::move(svc_ids), seq,
                     std::vector<std::string>(distinct.begin(), distinct.end()), {}, 0});
    for (const auto& c : distinct)
      if (!before.count(c)) st->novel.push_back(c);
    publish_step(st);
  }

  void publish_step(std::shared_ptr<RegChain> st) {
    if (st->index >= st->concepts.size()) {
      Json ids = Json::array();
      for (const auto& id : st->svc_ids) ids.push_back(id.render());
      Json body{{"services", ids}, {"thing", st->thing_id.render()}};
      st->respond(code::created, to_bytes(canonical_dump(body)), kContentFormatJsonLdDefault,
                  {"rd", st->thing_id.render()});
      return;
    }
    const std::string c = st->concepts[st->index++];
    overlay_.publish(c, cfg_.address, [this, st](Expected<bool> r) {
      if (r) {
        publish_step(st);
        return;
      }
      rollback_registration(*st);
      st->respond(code::internal_error,
                  to_bytes("PublishFailed: " + std::string(errc_name(r.error().code()))));
    });
  }

  void rollback_registration(const RegChain& st) {
    try {
      directory_.delete_thing(st.thing_id);
    } catch (const Error&) {
      return;  // already gone (expired or deleted since) — nothing to undo
    }
    // only rewind counters if nothing else allocated ids in the meantime
    auto cur = directory_.sequence_state();
    if (cur.first == st.seq.first + 1 &&
        cur.second == st.seq.second + st.svc_ids.size())
      directory_.restore_sequence_state(st.seq);
    for (const auto& c : st.novel)
      overlay_.unpublish(c, cfg_.address, [](Expected<bool>) {});
  }

  // -- entry CRUD -------------------------------------------------------------

  void handle_get_entry(const Identifier& id, const Responder& respond) {
    Json j = id.kind == EntityKind::thing ? thing_to_json(directory_.get_thing(id))
                                          : service_to_json(directory_.get_service(id));
    respond(code::content, to_bytes(canonical_dump(j)), kContentFormatJsonLdDefault);
  }

  void handle_put(const Identifier& id, const CoapMessage& msg, const Responder& respond) {
    if (msg.payload.empty()) {
      // lease refresh
      if (id.kind != EntityKind::thing) raise(Errc::malformed_json, "refresh target");
      if (!directory_.has_thing(id)) raise(Errc::not_found, id.render());
      directory_.refresh_thing(id, net_->now());
      respond(code::changed);
      return;
    }
    Description d = decode_description(to_string(msg.payload));
    auto before = directory_.advertised_concepts();
    if (auto* t = std::get_if<ThingDescription>(&d)) {
      if (id.kind != EntityKind::thing) raise(Errc::malformed_json, "@type");
      if (t->id && *t->id != id) raise(Errc::malformed_json, "@id mismatch");
      directory_.put_thing(id, *t);
      directory_.refresh_thing(id, net_->now());
    } else {
      auto& s = std::get<ServiceDescription>(d);
      if (id.kind != EntityKind::service) raise(Errc::malformed_json, "@type");
      if (s.id && *s.id != id) raise(Errc::malformed_json, "@id mismatch");
      directory_.put_service(id, s);
      directory_.refresh_thing(*directory_.get_service(id).thing_id, net_->now());
    }
    pointer_diff(before, directory_.advertised_concepts());
    respond(code::changed);
  }

  void handle_delete(const Identifier& id, const Responder& respond) {
    auto before = directory_.advertised_concepts();
    std::vector<Identifier> removed = directory_.delete_entry(id);
    pointer_diff(before, directory_.advertised_concepts());
    if (!removed.empty()) announce_now(removed);
    respond(code::deleted);
  }

  void pointer_diff(const std::set<std::string>& before, const std::set<std::string>& after) {
    for (const auto& c : after)
      if (!before.count(c)) overlay_.publish(c, cfg_.address, [](Expected<bool>) {});
    for (const auto& c : before)
      if (!after.count(c)) overlay_.unpublish(c, cfg_.address, [](Expected<bool>) {});
  }

  // -- discovery ----------------------------------------------------------------

  void handle_discovery(const CoapMessage& msg, const std::string& from,
                        const Responder& respond) {
    ParsedDiscovery pd = parse_discovery_query(msg.queries(), cfg_.min_similarity,
                                               cfg_.max_results);
    pd.request.validate(*taxonomy_);
    WeightVector w =
        pd.weights.empty() ? cfg_.qos_weights : WeightVector::make(pd.weights);
    auto local = matchmake(pd.request, directory_, cfg_.address, cfg_.sim_weight,
                           cfg_.kw_weight);
    if (!local.empty()) {
      std::vector<std::pair<MatchResult, QoSProfile>> pairs;
      for (const auto& m : local)
        pairs.push_back({m, directory_.get_service(m.service_id).qos});
      respond_links(respond, pd.request.concept_iri,
                    select_rank(pairs, w, pd.request.max_results), 0,
                    [this](const MatchResult& m) {
                      return directory_.get_service(m.service_id).path;
                    });
      return;
    }
    forward_discovery(pd.request, w, from, respond);
  }

  void forward_discovery(const DiscoveryRequest& r, const WeightVector& w,
                         const std::string& from, const Responder& respond) {
    auto fl = std::make_shared<ForwardFlow>();
    fl->request = r;
    fl->weights = w;
    fl->respond = respond;
    overlay_.collect_holders(forward_concepts(*taxonomy_, r.concept_iri), cfg_.fanout, from,
                             [this, fl](CollectOutcome oc) {
                               if (oc.holders.empty()) {
                                 if (oc.all_failed())
                                   respond_error(*fl->respond,
                                                 Error(Errc::lookup_timeout, "pointer lookup"));
                                 else
                                   respond_error(*fl->respond, Error(Errc::no_remote_match,
                                                                     fl->request.concept_iri));
                                 return;
                               }
                               // overlay legs on the answer path: the routing
                               // hops plus the forward to the holder itself,
                               // so any remote answer reports at least 1
                               fl->hops = oc.hops + 1;
                               fl->pending = fl->holder_count =
                                   static_cast<unsigned>(oc.holders.size());
                               Json q{{"kind", "discovery"},
                                      {"request", discovery_request_to_json(fl->request)}};
                               Bytes payload = to_bytes(canonical_dump(q));
                               for (const auto& h : oc.holders)
                                 ep_.request(h,
                                             make_request(code::post, "/dht/query", {}, payload,
                                                          kContentFormatJsonLdDefault),
                                             [this, fl](Expected<CoapMessage> resp) {
                                               on_forward_reply(fl, std::move(resp));
                                             });
                             });
  }

  void on_forward_reply(std::shared_ptr<ForwardFlow> fl, Expected<CoapMessage> resp) {
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
    if (fl->hits.empty()) {
      if (fl->failures == fl->holder_count)
        respond_error(*fl->respond, Error(Errc::lookup_timeout, "forward"));
      else
        respond_error(*fl->respond, Error(Errc::no_remote_match, fl->request.concept_iri));
      return;
    }
    std::sort(fl->hits.begin(), fl->hits.end());
    if (fl->hits.size() > fl->request.max_results) fl->hits.resize(fl->request.max_results);
    std::vector<std::pair<MatchResult, QoSProfile>> pairs;
    for (const auto& m : fl->hits)
      pairs.push_back({m, fl->svc.at({m.gateway, m.service_id.render()}).qos});
    respond_links(*fl->respond, fl->request.concept_iri,
                  select_rank(pairs, fl->weights, fl->request.max_results), fl->hops,
                  [fl](const MatchResult& m) {
                    return fl->svc.at({m.gateway, m.service_id.render()}).path;
                  });
  }

  template <typename PathFn>
  void respond_links(const Responder& respond, const std::string& rt,
                     const std::vector<Ranked>& ranked, unsigned hops, PathFn path_of) {
    std::vector<LinkView> views;
    for (const auto& rk : ranked) {
      LinkView v;
      v.gateway = rk.match.gateway;
      std::string p = path_of(rk.match);
      v.path = (p.empty() || p[0] != '/') ? "/" + p : p;
      v.rt = rt;
      v.degree = rk.match.degree;
      v.score = rk.match.score;
      v.utility = rk.utility;
      views.push_back(std::move(v));
    }
    CoapMessage resp = make_response(respond.request(), code::content,
                                     to_bytes(render_discovery_links(views)),
                                     kContentFormatLink);
    resp.add_option(kOptionHops, detail::uint_to_bytes(hops));
    respond.send(resp);
  }

  // -- federation queries ---------------------------------------------------------

  void handle_query(const CoapMessage& msg, const Responder& respond) {
    Json j = parse_json_payload(msg);
    std::string kind = j.at("kind").get<std::string>();
    Json hits = Json::array();
    if (kind == "discovery") {
      DiscoveryRequest r = discovery_request_from_json(j.at("request"));
      r.validate(*taxonomy_);
      for (const auto& m : matchmake(r, directory_, cfg_.address, cfg_.sim_weight,
                                     cfg_.kw_weight))
        hits.push_back(remote_hit_to_json({m, directory_.get_service(m.service_id)}));
    } else if (kind == "provision") {
      std::set<std::string> inputs, goals;
      for (const auto& v : j.at("inputs")) inputs.insert(v.get<std::string>());
      for (const auto& v : j.at("outputs")) goals.insert(v.get<std::string>());
      for (const auto& id : provision_candidates(directory_, *taxonomy_, inputs, goals)) {
        MatchResult m{id, cfg_.address, MatchDegree::exact, 1.0};
        hits.push_back(remote_hit_to_json({m, directory_.get_service(id)}));
      }
    } else {
      raise(Errc::malformed_json, "kind: " + kind);
    }
    respond(code::content, to_bytes(canonical_dump(Json{{"hits", hits}})),
            kContentFormatJsonLdDefault);
  }

  // -- lifecycle ------------------------------------------------------------------

  void join_attempt(unsigned attempt, std::function<void(Expected<bool>)> done) {
    overlay_.join(*cfg_.bootstrap,
                  [this, attempt, done = std::move(done)](Expected<bool> r) mutable {
                    if (r) {
                      after_start();
                      if (done) done(std::move(r));
                      return;
                    }
                    if (attempt + 1 >= 8 || !running_) {
                      net_->bump("join_abandoned");
                      if (done) done(std::move(r));
                      return;
                    }
                    net_->schedule_node(cfg_.stabilize_interval_ms, cfg_.address,
                                        [this, attempt, done = std::move(done)]() mutable {
                                          join_attempt(attempt + 1, std::move(done));
                                        });
                  });
  }

  void after_start() {
    announce_now({});
    arm_announce();
    arm_expiry();
    arm_republish();
  }

  void arm_announce() {
    net_->schedule_node(cfg_.announce_interval_ms, cfg_.address, [this] {
      if (!running_) return;
      announce_now({});
      arm_announce();
    });
  }

  void arm_expiry() {
    net_->schedule_node(cfg_.expiry_sweep_interval_ms, cfg_.address, [this] {
      if (!running_) return;
      expire_stale();
      arm_expiry();
    });
  }

  void arm_republish() {
    net_->schedule_node(cfg_.republish_interval_ms, cfg_.address, [this] {
      if (!running_) return;
      for (const auto& c : directory_.advertised_concepts())
        overlay_.publish(c, cfg_.address, [](Expected<bool>) {});
      arm_republish();
    });
  }

  VirtualNet* net_;
  const Taxonomy* taxonomy_;
  GatewayConfig cfg_;
  Directory directory_;
  CoapEndpoint ep_;
  OverlayNode overlay_;
  HttpProxy proxy_;
  bool running_ = false;
};

}  // namespace fogdisc
