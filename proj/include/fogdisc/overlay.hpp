#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fogdisc/chord.hpp"
#include "fogdisc/coap_endpoint.hpp"
#include "fogdisc/jsonld.hpp"

namespace fogdisc {

struct OverlayConfig {
  unsigned m = 16;
  unsigned successor_count = 3;
  double stabilize_interval_ms = 1000;
  double fix_fingers_interval_ms = 250;
  double republish_interval_ms = 30000;
  double expiry_sweep_interval_ms = 1000;
  unsigned expiry_missed_intervals = 3;
  unsigned predecessor_stale_intervals = 3;
  unsigned fanout = 3;
  std::optional<NodeId> forced_id;  // tests pin ring positions directly
};

/// Soft-state pointer: which gateways currently advertise a concept. Lives on
/// successor(hash_key(concept)); holders expire unless republished.
struct PointerRecord {
  NodeId key = 0;
  std::string concept_iri;
  std::map<std::string, double> holders;  // address -> last refresh, sim ms
};

struct LookupResult {
  NodeRef node;
  unsigned hops = 0;  // remote routing steps; 0 when answered locally
};

struct HoldersResult {
  std::vector<std::string> holders;
  unsigned hops = 0;
};

struct CollectOutcome {
  std::vector<std::string> holders;
  unsigned hops = 0;
  unsigned lookups = 0;
  unsigned failures = 0;

  bool all_failed() const { return lookups > 0 && failures == lookups; }
};

namespace wire {

inline Json ref_to_json(const NodeRef& n) {
  return Json{{"address", n.address}, {"id", n.id}};
}

inline NodeRef ref_from_json(const Json& j) {
  return {j.at("id").get<NodeId>(), j.at("address").get<std::string>()};
}

inline Json record_to_json(const PointerRecord& r) {
  Json holders = Json::array();
  for (const auto& [a, _] : r.holders) holders.push_back(a);
  return Json{{"concept", r.concept_iri}, {"holders", holders}, {"key", r.key}};
}

}  // namespace wire

/// One gateway's Chord peer: ring membership, routing-table maintenance,
/// iterative lookup, and the distributed pointer index. All remote traffic
/// rides POST /dht/find | /dht/notify | /dht/pointer on the shared endpoint.
class OverlayNode {
 public:
  using LookupCb = std::function<void(Expected<LookupResult>)>;
  using BoolCb = std::function<void(Expected<bool>)>;
  using HoldersCb = std::function<void(Expected<HoldersResult>)>;

  OverlayNode(CoapEndpoint* ep, OverlayConfig cfg) : ep_(ep), cfg_(cfg) {
    NodeId id = cfg.forced_id ? *cfg.forced_id : hash_key(ep->address(), cfg.m);
    table_ = RoutingTable({id, ep->address()}, cfg.m, cfg.successor_count);
  }

  NodeId id() const { return table_.self().id; }
  const std::string& address() const { return ep_->address(); }
  const RoutingTable& table() const { return table_; }
  const std::map<std::string, PointerRecord>& store() const { return store_; }
  const OverlayConfig& config() const { return cfg_; }
  bool in_ring() const { return in_ring_; }

  // -- membership -----------------------------------------------------------

  void create_ring() {
    in_ring_ = true;
    start_maintenance();
  }

  // Abrupt stop (simulated crash): no goodbye messages, maintenance chains
  // die at their next firing. Peers find out through timeouts.
  void halt() { in_ring_ = false; }

  void join(const std::string& bootstrap, BoolCb done) {
    auto st = std::make_shared<LookupState>();
    st->key = id();
    st->current = NodeRef{0, bootstrap};
    st->bootstrap = bootstrap;
    st->remote_started = true;
    st->cb = [this, bootstrap, done = std::move(done)](Expected<LookupResult> r) {
      if (!r) {
        done(Expected<bool>(r.error()));
        return;
      }
      NodeRef succ = r.value().node;
      if (succ.address == address()) succ = NodeRef{hash_key(bootstrap, cfg_.m), bootstrap};
      table_.set_successor(succ);
      in_ring_ = true;
      start_maintenance();
      stabilize();  // pick up predecessor + key transfer right away
      done(Expected<bool>(true));
    };
    lookup_step(st);
  }

  // Graceful departure: hand records to the successor, introduce the
  // neighbours to each other, stop maintenance.
  void leave(std::function<void()> done) {
    if (!in_ring_) {
      done();
      return;
    }
    in_ring_ = false;
    NodeRef succ = table_.successor();
    auto pred = table_.predecessor();
    if (succ.address == address()) {
      store_.clear();
      done();
      return;
    }
    Json base{{"from", wire::ref_to_json(table_.self())},
              {"leaving", true},
              {"successor", wire::ref_to_json(succ)},
              {"predecessor", pred ? wire::ref_to_json(*pred) : Json(nullptr)}};
    Json to_succ = base;
    Json transfer = Json::array();
    for (const auto& [_, rec] : store_) transfer.push_back(wire::record_to_json(rec));
    to_succ["transfer"] = transfer;
    store_.clear();
    auto remaining = std::make_shared<int>(1);
    auto finish = [remaining, done = std::move(done)](Expected<CoapMessage>) {
      if (--*remaining == 0) done();
    };
    bool tell_pred = pred && pred->address != address() && pred->address != succ.address;
    if (tell_pred) ++*remaining;
    post_json(succ.address, "/dht/notify", to_succ, finish);
    if (tell_pred) post_json(pred->address, "/dht/notify", base, finish);
  }

  // -- lookup ------------------------------------------------------------------

  void find_successor(NodeId key, LookupCb cb) { find_successor(key, {}, std::move(cb)); }

  void find_successor(NodeId key, std::set<std::string> avoid, LookupCb cb) {
    auto st = std::make_shared<LookupState>();
    st->key = key;
    st->current = table_.self();
    st->avoid = std::move(avoid);
    st->cb = std::move(cb);
    lookup_step(st);
  }

  // -- pointer index -------------------------------------------------------------

  void publish(const std::string& concept_iri, const std::string& holder, BoolCb cb) {
    pointer_op(concept_iri,
               Json{{"concept", concept_iri}, {"holder", holder}, {"op", "publish"}},
               std::move(cb));
  }

  void unpublish(const std::string& concept_iri, const std::string& holder, BoolCb cb) {
    pointer_op(concept_iri,
               Json{{"concept", concept_iri}, {"holder", holder}, {"op", "unpublish"}},
               std::move(cb));
  }

  void lookup_holders(const std::string& concept_iri, HoldersCb cb) {
    holders_attempt(concept_iri, {}, true, std::move(cb));
  }

  void holders_attempt(const std::string& concept_iri, std::set<std::string> avoid,
                       bool may_retry, HoldersCb cb) {
    find_successor(
        hash_key(concept_iri, cfg_.m), avoid,
        [this, concept_iri, avoid, may_retry, cb = std::move(cb)](Expected<LookupResult> r) mutable {
          if (!r) {
            cb(Expected<HoldersResult>(r.error()));
            return;
          }
          unsigned hops = r.value().hops;
          const NodeRef& owner = r.value().node;
          if (owner.address == address()) {
            cb(Expected<HoldersResult>(HoldersResult{apply_lookup(concept_iri), hops}));
            return;
          }
          post_json(owner.address, "/dht/pointer",
                    Json{{"concept", concept_iri}, {"op", "lookup"}},
                    [this, concept_iri, avoid = std::move(avoid), may_retry, cb = std::move(cb),
                     hops, owner](Expected<CoapMessage> resp) mutable {
                      if (!resp) {
                        table_.drop_peer(owner.address);
                        if (may_retry) {
                          avoid.insert(owner.address);
                          holders_attempt(concept_iri, std::move(avoid), false, std::move(cb));
                          return;
                        }
                        cb(Expected<HoldersResult>(Error(Errc::lookup_timeout, "pointer owner")));
                        return;
                      }
                      HoldersResult out;
                      out.hops = hops;
                      try {
                        Json j = Json::parse(to_string(resp.value().payload));
                        for (const auto& h : j.at("holders"))
                          out.holders.push_back(h.get<std::string>());
                      } catch (const std::exception&) {
                        cb(Expected<HoldersResult>(Error(Errc::malformed_json, "holders")));
                        return;
                      }
                      cb(Expected<HoldersResult>(std::move(out)));
                    });
        });
  }

  // Union of holders over the given concepts (in order), skipping origin and
  // self, truncated to max_holders. Failed lookups degrade to fewer holders;
  // the outcome reports how many lookups ran and how many of those failed.
  void collect_holders(const std::vector<std::string>& concepts, unsigned max_holders,
                       const std::string& origin,
                       std::function<void(CollectOutcome)> cb) {
    auto st = std::make_shared<CollectState>();
    st->concepts = concepts;
    st->max_holders = max_holders;
    st->origin = origin;
    st->cb = std::move(cb);
    collect_step(st);
  }

  // -- wire handlers (dispatched by the gateway) ---------------------------------

  void handle_find(const Json& payload, const Responder& respond) {
    NodeId key = payload.at("key").get<NodeId>();
    std::set<std::string> avoid;
    for (const auto& a : payload.at("avoid")) avoid.insert(a.get<std::string>());
    respond(code::content, to_bytes(canonical_dump(answer_find(key, avoid))),
            kContentFormatJsonLdDefault);
  }

  void handle_notify(const Json& payload, const Responder& respond) {
    NodeRef from = wire::ref_from_json(payload.at("from"));
    if (payload.at("leaving").get<bool>()) {
      handle_leave(from, payload);
      respond(code::changed, to_bytes(canonical_dump(Json{{"ok", true}})),
              kContentFormatJsonLdDefault);
      return;
    }
    Json reply;
    auto old_pred = table_.predecessor();
    reply["predecessor"] = old_pred ? wire::ref_to_json(*old_pred) : Json(nullptr);
    Json transfer = Json::array();
    bool adopt = !old_pred || in_interval_oo(old_pred->id, id(), from.id);
    if (old_pred && old_pred->address == from.address) {
      last_pred_notify_ = now();
    } else if (adopt && from.address != address()) {
      table_.set_predecessor(from);
      last_pred_notify_ = now();
      // keys no longer in (pred, self] move to the new predecessor
      for (auto it = store_.begin(); it != store_.end();) {
        if (!in_interval_oc(from.id, id(), it->second.key)) {
          transfer.push_back(wire::record_to_json(it->second));
          it = store_.erase(it);
        } else {
          ++it;
        }
      }
    }
    Json succs = Json::array();
    for (const auto& s : table_.successors()) succs.push_back(wire::ref_to_json(s));
    reply["successors"] = succs;
    reply["transfer"] = transfer;
    respond(code::content, to_bytes(canonical_dump(reply)), kContentFormatJsonLdDefault);
  }

  void handle_pointer(const Json& payload, const Responder& respond) {
    std::string op = payload.at("op").get<std::string>();
    Json reply{{"ok", true}};
    if (op == "publish") {
      apply_publish(payload.at("concept").get<std::string>(),
                    payload.at("holder").get<std::string>());
    } else if (op == "unpublish") {
      apply_unpublish(payload.at("concept").get<std::string>(),
                      payload.at("holder").get<std::string>());
    } else if (op == "lookup") {
      Json holders = Json::array();
      for (const auto& h : apply_lookup(payload.at("concept").get<std::string>()))
        holders.push_back(h);
      reply = Json{{"holders", holders}};
    } else if (op == "absorb") {
      for (const auto& r : payload.at("records")) absorb_record(r);
    } else {
      respond(code::bad_request, to_bytes("unknown op"));
      return;
    }
    respond(code::content, to_bytes(canonical_dump(reply)), kContentFormatJsonLdDefault);
  }

  // -- maintenance ----------------------------------------------------------------

  // Records outside (pred, self] were stored here by a lookup that raced ring
  // convergence. Push them one step toward the owner each round; the walk
  // stops at the node whose arc contains the key.
  void rehome_misplaced() {
    auto pred = table_.predecessor();
    if (!pred || pred->address == address()) return;
    Json records = Json::array();
    for (auto it = store_.begin(); it != store_.end();) {
      if (!in_interval_oc(pred->id, id(), it->second.key)) {
        records.push_back(wire::record_to_json(it->second));
        it = store_.erase(it);
      } else {
        ++it;
      }
    }
    if (records.empty()) return;
    post_json(pred->address, "/dht/pointer", Json{{"op", "absorb"}, {"records", records}},
              [](Expected<CoapMessage>) {});
  }

  void stabilize() {
    if (!in_ring_) return;
    prune_stale_predecessor();
    rehome_misplaced();
    NodeRef succ = table_.successor();
    if (succ.address == address()) {
      auto pred = table_.predecessor();
      if (pred && pred->address != address()) table_.set_successor(*pred);
      return;
    }
    Json req{{"from", wire::ref_to_json(table_.self())}, {"leaving", false}};
    post_json(succ.address, "/dht/notify", req, [this, succ](Expected<CoapMessage> r) {
      if (!r) {
        table_.drop_peer(succ.address);  // fail over to the next successor
        return;
      }
      Json j;
      try {
        j = Json::parse(to_string(r.value().payload));
      } catch (const std::exception&) {
        return;
      }
      for (const auto& rec : j.at("transfer")) absorb_record(rec);
      if (!j.at("predecessor").is_null()) {
        NodeRef p = wire::ref_from_json(j.at("predecessor"));
        if (p.address != address() && in_interval_oo(id(), succ.id, p.id)) {
          table_.set_successor(p);
          return;
        }
      }
      std::vector<NodeRef> list;
      for (const auto& s : j.at("successors")) list.push_back(wire::ref_from_json(s));
      table_.adopt_successor_list(succ, list);
    });
  }

  void fix_fingers() {
    if (!in_ring_) return;
    unsigned i = next_finger_;
    next_finger_ = (next_finger_ + 1) % cfg_.m;
    find_successor(finger_target(id(), i, cfg_.m), [this, i](Expected<LookupResult> r) {
      if (r) table_.set_finger(i, r.value().node);
    });
  }

  void expire_holders() {
    double limit = cfg_.expiry_missed_intervals * cfg_.republish_interval_ms;
    for (auto it = store_.begin(); it != store_.end();) {
      auto& holders = it->second.holders;
      for (auto h = holders.begin(); h != holders.end();) {
        h = now() - h->second > limit ? holders.erase(h) : std::next(h);
      }
      it = holders.empty() ? store_.erase(it) : std::next(it);
    }
  }

  // test access
  RoutingTable& mutable_table() { return table_; }

 private:
  struct LookupState {
    NodeId key = 0;
    NodeRef current;
    std::set<std::string> avoid;
    unsigned hops = 0;
    unsigned restarts = 0;
    bool remote_started = false;  // joining: no local table yet
    std::string bootstrap;
    LookupCb cb;
  };

  struct CollectState {
    std::vector<std::string> concepts;
    unsigned max_holders = 3;
    unsigned index = 0;
    std::string origin;
    CollectOutcome outcome;
    std::set<std::string> seen;
    std::function<void(CollectOutcome)> cb;
  };

  double now() const { return ep_->net().now(); }

  unsigned hop_cap() const { return cfg_.m + 2 * cfg_.successor_count + 4; }

  void post_json(const std::string& to, const std::string& path, const Json& body,
                 CoapEndpoint::ResponseCallback cb) {
    ep_->request(to, make_request(code::post, path, {}, to_bytes(canonical_dump(body)),
                                  kContentFormatJsonLdDefault),
                 std::move(cb));
  }

  Json answer_find(NodeId key, const std::set<std::string>& avoid) const {
    NodeRef succ = table_.successor();
    // A dead successor's arc falls to the next list entry; skipping avoided
    // successors here lets a retried lookup resolve to the heir instead of
    // bouncing off the same unreachable owner.
    for (const auto& s : table_.successors())
      if (!avoid.count(s.address)) {
        succ = s;
        break;
      }
    if (succ.address == address() || in_interval_oc(id(), succ.id, key))
      return Json{{"done", true}, {"node", wire::ref_to_json(succ)}};
    NodeRef next = table_.closest_preceding(key, avoid);
    if (next.address == address())
      return Json{{"done", true}, {"node", wire::ref_to_json(succ)}};
    return Json{{"done", false}, {"node", wire::ref_to_json(next)}};
  }

  void lookup_step(std::shared_ptr<LookupState> st) {
    if (st->hops > hop_cap()) {
      st->cb(Expected<LookupResult>(Error(Errc::lookup_timeout, "hop cap exceeded")));
      return;
    }
    if (!st->remote_started && st->current.address == address()) {
      Json local = answer_find(st->key, st->avoid);
      NodeRef node = wire::ref_from_json(local.at("node"));
      if (local.at("done").get<bool>()) {
        st->cb(Expected<LookupResult>(LookupResult{node, st->hops}));
        return;
      }
      st->current = node;
    }
    Json avoid = Json::array();
    for (const auto& a : st->avoid) avoid.push_back(a);
    post_json(st->current.address, "/dht/find", Json{{"avoid", avoid}, {"key", st->key}},
              [this, st](Expected<CoapMessage> r) {
                if (!r) {
                  on_lookup_peer_failure(st);
                  return;
                }
                ++st->hops;
                Json j;
                try {
                  j = Json::parse(to_string(r.value().payload));
                } catch (const std::exception&) {
                  on_lookup_peer_failure(st);
                  return;
                }
                NodeRef node = wire::ref_from_json(j.at("node"));
                if (j.at("done").get<bool>()) {
                  st->cb(Expected<LookupResult>(LookupResult{node, st->hops}));
                  return;
                }
                st->current = node;
                lookup_step(st);
              });
  }

  void on_lookup_peer_failure(std::shared_ptr<LookupState> st) {
    if (st->remote_started && st->hops == 0 && st->current.address == st->bootstrap) {
      st->cb(Expected<LookupResult>(Error(Errc::bootstrap_unreachable, st->bootstrap)));
      return;
    }
    st->avoid.insert(st->current.address);
    table_.drop_peer(st->current.address);
    if (++st->restarts > 3) {
      st->cb(Expected<LookupResult>(Error(Errc::lookup_timeout, st->current.address)));
      return;
    }
    st->current = st->remote_started ? NodeRef{0, st->bootstrap} : table_.self();
    lookup_step(st);
  }

  void pointer_op(const std::string& concept_iri, Json body, BoolCb cb) {
    pointer_attempt(concept_iri, std::move(body), {}, true, std::move(cb));
  }

  // A publish that resolves the owner while the ring still lists a dead node
  // would otherwise vanish until the next republish; one retry with the dead
  // owner avoided reaches its heir instead.
  void pointer_attempt(const std::string& concept_iri, Json body, std::set<std::string> avoid,
                       bool may_retry, BoolCb cb) {
    find_successor(
        hash_key(concept_iri, cfg_.m), avoid,
        [this, concept_iri, body = std::move(body), avoid, may_retry,
         cb = std::move(cb)](Expected<LookupResult> r) mutable {
          if (!r) {
            cb(Expected<bool>(r.error()));
            return;
          }
          const NodeRef& owner = r.value().node;
          if (owner.address == address()) {
            if (body.at("op") == "publish")
              apply_publish(concept_iri, body.at("holder").get<std::string>());
            else
              apply_unpublish(concept_iri, body.at("holder").get<std::string>());
            cb(Expected<bool>(true));
            return;
          }
          post_json(owner.address, "/dht/pointer", body,
                    [this, concept_iri, body, avoid = std::move(avoid), may_retry,
                     cb = std::move(cb), owner](Expected<CoapMessage> resp) mutable {
                      if (resp) {
                        cb(Expected<bool>(true));
                        return;
                      }
                      table_.drop_peer(owner.address);
                      if (!may_retry) {
                        cb(Expected<bool>(Error(Errc::lookup_timeout, "pointer owner")));
                        return;
                      }
                      avoid.insert(owner.address);
                      pointer_attempt(concept_iri, std::move(body), std::move(avoid), false,
                                      std::move(cb));
                    });
        });
  }

  // Stops at the first concept that yields any holder: more specific pointers
  // shadow ancestor pointers, and skipping the rest keeps hop counts low.
  void collect_step(std::shared_ptr<CollectState> st) {
    auto& o = st->outcome;
    if (st->index >= st->concepts.size() || !o.holders.empty()) {
      if (o.holders.size() > st->max_holders) o.holders.resize(st->max_holders);
      st->cb(std::move(o));
      return;
    }
    const std::string c = st->concepts[st->index++];
    lookup_holders(c, [this, st](Expected<HoldersResult> r) {
      auto& o = st->outcome;
      ++o.lookups;
      if (r) {
        o.hops += r.value().hops;
        for (const auto& h : r.value().holders) {
          if (h == st->origin || h == address() || st->seen.count(h)) continue;
          if (o.holders.size() >= st->max_holders) break;
          st->seen.insert(h);
          o.holders.push_back(h);
        }
      } else {
        ++o.failures;
      }
      collect_step(st);
    });
  }

  void handle_leave(const NodeRef& from, const Json& payload) {
    bool was_primary = table_.successor().address == from.address;
    bool was_pred = table_.predecessor() && table_.predecessor()->address == from.address;
    table_.drop_peer(from.address);
    if (was_primary) {
      NodeRef repl = wire::ref_from_json(payload.at("successor"));
      if (repl.address != address() && repl.address != from.address) table_.set_successor(repl);
    }
    if (was_pred) {
      if (payload.at("predecessor").is_null()) {
        table_.set_predecessor(std::nullopt);
      } else {
        NodeRef repl = wire::ref_from_json(payload.at("predecessor"));
        if (repl.address == address() || repl.address == from.address)
          table_.set_predecessor(std::nullopt);
        else
          table_.set_predecessor(repl);
        last_pred_notify_ = now();
      }
    }
    if (payload.contains("transfer"))
      for (const auto& r : payload.at("transfer")) absorb_record(r);
  }

  void apply_publish(const std::string& concept_iri, const std::string& holder) {
    PointerRecord& rec = store_[concept_iri];
    rec.concept_iri = concept_iri;
    rec.key = hash_key(concept_iri, cfg_.m);
    rec.holders[holder] = now();
  }

  void apply_unpublish(const std::string& concept_iri, const std::string& holder) {
    auto it = store_.find(concept_iri);
    if (it == store_.end()) return;
    it->second.holders.erase(holder);
    if (it->second.holders.empty()) store_.erase(it);
  }

  std::vector<std::string> apply_lookup(const std::string& concept_iri) const {
    std::vector<std::string> out;
    auto it = store_.find(concept_iri);
    if (it != store_.end())
      for (const auto& [a, _] : it->second.holders) out.push_back(a);
    return out;
  }

  void absorb_record(const Json& j) {
    std::string c = j.at("concept").get<std::string>();
    for (const auto& h : j.at("holders")) apply_publish(c, h.get<std::string>());
  }

  void prune_stale_predecessor() {
    auto pred = table_.predecessor();
    if (!pred || pred->address == address()) return;
    double limit = cfg_.predecessor_stale_intervals * cfg_.stabilize_interval_ms;
    if (now() - last_pred_notify_ > limit) table_.set_predecessor(std::nullopt);
  }

  void start_maintenance() {
    schedule_stabilize();
    schedule_fix_fingers();
    schedule_expiry();
  }

  void schedule_stabilize() {
    ep_->net().schedule_node(cfg_.stabilize_interval_ms, address(), [this] {
      if (!in_ring_) return;
      stabilize();
      schedule_stabilize();
    });
  }

  void schedule_fix_fingers() {
    ep_->net().schedule_node(cfg_.fix_fingers_interval_ms, address(), [this] {
      if (!in_ring_) return;
      fix_fingers();
      schedule_fix_fingers();
    });
  }

  void schedule_expiry() {
    ep_->net().schedule_node(cfg_.expiry_sweep_interval_ms, address(), [this] {
      if (!in_ring_) return;
      expire_holders();
      schedule_expiry();
    });
  }

  CoapEndpoint* ep_;
  OverlayConfig cfg_;
  RoutingTable table_;
  std::map<std::string, PointerRecord> store_;  // concept -> record
  bool in_ring_ = false;
  unsigned next_finger_ = 0;
  double last_pred_notify_ = 0;
};

}  // namespace fogdisc
