#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fogdisc/cloud.hpp"
#include "fogdisc/gateway.hpp"

namespace fogdisc {

// The runner's own endpoint for timeline queries and compositions.
inline constexpr const char* kClientAddress = "client";

struct LinkDefaults {
  double fog_latency_ms = 5.0;    // everything except links touching the cloud
  double cloud_latency_ms = 40.0;
  double drop_prob = 0.0;

  void validate() const {
    if (fog_latency_ms < 0 || cloud_latency_ms < 0)
      raise(Errc::range_violation, "latency_ms");
    if (drop_prob < 0 || drop_prob > 1) raise(Errc::range_violation, "drop_prob");
  }
};

struct DeviceSpec {
  std::string address;
  std::string gateway;
  ThingDescription thing;
  std::vector<ServiceDescription> services;
  double auto_refresh_ms = 0.0;  // 0: lease renewed only by explicit refresh actions
};

enum class ActionKind {
  register_device,
  refresh,
  remove_device,
  query,
  compose,
  kill_gateway,
  join_gateway,
  leave_gateway,
  audit_ring,
};

struct TimelineAction {
  double time_ms = 0.0;
  ActionKind kind = ActionKind::audit_ring;
  std::string device;                // register / refresh / remove_device
  std::string target;                // query / compose destination
  std::vector<std::string> queries;  // query
  CompositionRequest compose_request;
  std::string gateway;          // kill_gateway / leave_gateway
  GatewayConfig join_config;    // join_gateway
};

struct Scenario {
  std::string taxonomy_path;
  LinkDefaults links;
  std::optional<CloudConfig> cloud;
  std::vector<GatewayConfig> gateways;
  std::vector<DeviceSpec> devices;
  std::vector<TimelineAction> timeline;
  double duration_ms = 0.0;  // 0: run until last action + settle window

  void validate() const;
};

// -- metrics ------------------------------------------------------------------

struct QueryMetric {
  double time_ms = 0.0;
  std::string target;
  double latency_ms = 0.0;
  unsigned hops = 0;
  unsigned links = 0;
  bool success = false;
  std::string status = "pending";
};

struct ComposeMetric {
  double time_ms = 0.0;
  std::string target;
  double latency_ms = 0.0;
  unsigned stages = 0;
  bool success = false;
  std::string status = "pending";
};

struct RingAudit {
  double time_ms = 0.0;
  unsigned nodes = 0;
  bool ring_ok = false;
  bool pointers_ok = false;
  unsigned missing = 0;    // advertised concepts without a resident pointer
  unsigned misplaced = 0;  // pointer records held off the ideal owner
};

struct Metrics {
  std::uint64_t seed = 0;
  std::vector<QueryMetric> queries;
  std::vector<ComposeMetric> composes;
  std::vector<RingAudit> ring_audits;
  std::map<std::string, std::uint64_t> counters;

  Json to_json() const {
    Json qs = Json::array();
    for (const auto& q : queries)
      qs.push_back(Json{{"hops", q.hops},
                        {"latency_ms", q.latency_ms},
                        {"links", q.links},
                        {"status", q.status},
                        {"success", q.success},
                        {"target", q.target},
                        {"time_ms", q.time_ms}});
    Json cs = Json::array();
    for (const auto& c : composes)
      cs.push_back(Json{{"latency_ms", c.latency_ms},
                        {"stages", c.stages},
                        {"status", c.status},
                        {"success", c.success},
                        {"target", c.target},
                        {"time_ms", c.time_ms}});
    Json as = Json::array();
    for (const auto& a : ring_audits)
      as.push_back(Json{{"misplaced", a.misplaced},
                        {"missing", a.missing},
                        {"nodes", a.nodes},
                        {"pointers_ok", a.pointers_ok},
                        {"ring_ok", a.ring_ok},
                        {"time_ms", a.time_ms}});
    Json cnt = Json::object();
    for (const auto& [k, v] : counters) cnt[k] = v;
    return Json{{"composes", cs},
                {"counters", cnt},
                {"queries", qs},
                {"ring_audits", as},
                {"seed", seed}};
  }

  std::string dump() const { return canonical_dump(to_json()); }
};

// -- scenario parsing -----------------------------------------------------------

namespace detail {

inline ActionKind action_kind_from_name(const std::string& s) {
  if (s == "register") return ActionKind::register_device;
  if (s == "refresh") return ActionKind::refresh;
  if (s == "remove_device") return ActionKind::remove_device;
  if (s == "query") return ActionKind::query;
  if (s == "compose") return ActionKind::compose;
  if (s == "kill_gateway") return ActionKind::kill_gateway;
  if (s == "join_gateway") return ActionKind::join_gateway;
  if (s == "leave_gateway") return ActionKind::leave_gateway;
  if (s == "audit_ring") return ActionKind::audit_ring;
  raise(Errc::scenario_parse_error, "action: " + s);
}

inline TimelineAction action_from_json(const Json& j) {
  if (!j.is_object()) raise(Errc::scenario_parse_error, "timeline entry");
  if (!j.contains("action") || !j.contains("time_ms"))
    raise(Errc::scenario_parse_error, "timeline entry needs action and time_ms");
  TimelineAction a;
  a.time_ms = number_field(j, "time_ms");
  if (a.time_ms < 0) raise(Errc::scenario_parse_error, "time_ms < 0");
  a.kind = action_kind_from_name(string_field(j, "action"));
  std::set<std::string> allowed{"action", "time_ms"};
  switch (a.kind) {
    case ActionKind::register_device:
    case ActionKind::refresh:
    case ActionKind::remove_device:
      a.device = string_field(j, "device");
      allowed.insert("device");
      break;
    case ActionKind::query: {
      a.target = string_field(j, "target");
      if (!j.contains("queries") || !j.at("queries").is_array())
        raise(Errc::scenario_parse_error, "queries");
      for (const auto& q : j.at("queries")) {
        if (!q.is_string()) raise(Errc::scenario_parse_error, "queries");
        a.queries.push_back(q.get<std::string>());
      }
      allowed.insert("target");
      allowed.insert("queries");
      break;
    }
    case ActionKind::compose:
      a.target = string_field(j, "target");
      a.compose_request = composition_request_from_json(j.at("request"));
      allowed.insert("target");
      allowed.insert("request");
      break;
    case ActionKind::kill_gateway:
    case ActionKind::leave_gateway:
      a.gateway = string_field(j, "gateway");
      allowed.insert("gateway");
      break;
    case ActionKind::join_gateway:
      a.join_config = gateway_config_from_json(j.at("config"));
      allowed.insert("config");
      break;
    case ActionKind::audit_ring:
      break;
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) raise(Errc::scenario_parse_error, "unknown key: " + it.key());
  return a;
}

inline DeviceSpec device_from_json(const Json& j) {
  expect_members(j, {"address", "gateway", "services", "thing"}, {"auto_refresh_ms"});
  DeviceSpec d;
  d.address = string_field(j, "address");
  d.gateway = string_field(j, "gateway");
  d.thing = thing_from_json(j.at("thing"));
  if (!j.at("services").is_array()) raise(Errc::scenario_parse_error, "services");
  for (const auto& s : j.at("services")) d.services.push_back(service_from_json(s));
  if (j.contains("auto_refresh_ms")) {
    d.auto_refresh_ms = number_field(j, "auto_refresh_ms");
    if (d.auto_refresh_ms < 0) raise(Errc::scenario_parse_error, "auto_refresh_ms");
  }
  return d;
}

inline LinkDefaults links_from_json(const Json& j) {
  expect_members(j, {}, {"cloud_latency_ms", "drop_prob", "fog_latency_ms"});
  LinkDefaults l;
  if (j.contains("fog_latency_ms")) l.fog_latency_ms = number_field(j, "fog_latency_ms");
  if (j.contains("cloud_latency_ms")) l.cloud_latency_ms = number_field(j, "cloud_latency_ms");
  if (j.contains("drop_prob")) l.drop_prob = number_field(j, "drop_prob");
  l.validate();
  return l;
}

}  // namespace detail

inline Scenario scenario_from_json(const Json& j) {
  detail::expect_members(j, {"gateways", "taxonomy", "timeline"},
                         {"cloud", "devices", "duration_ms", "links"});
  Scenario sc;
  sc.taxonomy_path = detail::string_field(j, "taxonomy");
  if (j.contains("links")) sc.links = detail::links_from_json(j.at("links"));
  if (j.contains("cloud")) sc.cloud = cloud_config_from_json(j.at("cloud"));
  if (!j.at("gateways").is_array()) raise(Errc::scenario_parse_error, "gateways");
  for (const auto& g : j.at("gateways")) sc.gateways.push_back(gateway_config_from_json(g));
  if (j.contains("devices")) {
    if (!j.at("devices").is_array()) raise(Errc::scenario_parse_error, "devices");
    for (const auto& d : j.at("devices")) sc.devices.push_back(detail::device_from_json(d));
  }
  if (!j.at("timeline").is_array()) raise(Errc::scenario_parse_error, "timeline");
  for (const auto& a : j.at("timeline")) sc.timeline.push_back(detail::action_from_json(a));
  if (j.contains("duration_ms")) {
    sc.duration_ms = detail::number_field(j, "duration_ms");
    if (sc.duration_ms < 0) raise(Errc::scenario_parse_error, "duration_ms");
  }
  // a cloud-backed scenario announces to the cloud by default
  if (sc.cloud) {
    for (auto& g : sc.gateways)
      if (g.cloud.empty()) g.cloud = sc.cloud->address;
    for (auto& a : sc.timeline)
      if (a.kind == ActionKind::join_gateway && a.join_config.cloud.empty())
        a.join_config.cloud = sc.cloud->address;
  }
  sc.validate();
  return sc;
}

inline void Scenario::validate() const {
  if (taxonomy_path.empty()) raise(Errc::scenario_parse_error, "taxonomy");
  std::set<std::string> gateway_addrs;
  std::set<std::string> all_addrs{kClientAddress};
  if (cloud) all_addrs.insert(cloud->address);
  unsigned m = 0;
  auto add_gateway = [&](const GatewayConfig& g) {
    if (g.address.find('#') != std::string::npos)
      raise(Errc::scenario_parse_error, "address: " + g.address);
    gateway_addrs.insert(g.address);
    if (m == 0) m = g.overlay_m;
    if (g.overlay_m != m)
      raise(Errc::scenario_parse_error, "overlay_m differs: " + g.address);
  };
  for (const auto& g : gateways) {
    if (!all_addrs.insert(g.address).second)
      raise(Errc::scenario_parse_error, "duplicate address: " + g.address);
    add_gateway(g);
  }
  for (const auto& a : timeline)
    if (a.kind == ActionKind::join_gateway) add_gateway(a.join_config);
  std::set<std::string> device_addrs;
  for (const auto& d : devices) {
    if (!all_addrs.insert(d.address).second)
      raise(Errc::scenario_parse_error, "duplicate address: " + d.address);
    device_addrs.insert(d.address);
    if (!gateway_addrs.count(d.gateway)) raise(Errc::unknown_address, d.gateway);
  }
  double last = 0.0;
  for (const auto& a : timeline) {
    if (a.time_ms < last) raise(Errc::scenario_parse_error, "timeline not sorted");
    last = a.time_ms;
    switch (a.kind) {
      case ActionKind::register_device:
      case ActionKind::refresh:
      case ActionKind::remove_device:
        if (!device_addrs.count(a.device)) raise(Errc::unknown_address, a.device);
        break;
      case ActionKind::query:
        if (!gateway_addrs.count(a.target) && !(cloud && cloud->address == a.target))
          raise(Errc::unknown_address, a.target);
        break;
      case ActionKind::compose:
        if (!(cloud && cloud->address == a.target)) raise(Errc::unknown_address, a.target);
        break;
      case ActionKind::kill_gateway:
      case ActionKind::leave_gateway:
        if (!gateway_addrs.count(a.gateway)) raise(Errc::unknown_address, a.gateway);
        break;
      case ActionKind::join_gateway:
      case ActionKind::audit_ring:
        break;
    }
  }
}

inline Scenario load_scenario_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    // re-parse with exceptions to recover the offending byte, then report a line
    try {
      Json probe = Json::parse(text);
      (void)probe;
    } catch (const Json::parse_error& e) {
      std::size_t line = 1;
      for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
      raise(Errc::scenario_parse_error, "line " + std::to_string(line));
    }
    raise(Errc::scenario_parse_error, "line 1");
  }
  return scenario_from_json(j);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::scenario_parse_error, "cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario sc = load_scenario_text(buf.str());
  // taxonomy paths resolve relative to the scenario file
  auto resolve = [&](std::string& p) {
    if (p.empty()) return;
    std::filesystem::path tp(p);
    if (tp.is_relative()) p = (std::filesystem::path(path).parent_path() / tp).string();
  };
  resolve(sc.taxonomy_path);
  if (sc.cloud) resolve(sc.cloud->taxonomy_path);
  return sc;
}

// -- device agent -----------------------------------------------------------------

/// A constrained device: registers its bundled descriptions with its gateway
/// and keeps the lease alive when configured to.
class DeviceAgent {
 public:
  DeviceAgent(VirtualNet* net, DeviceSpec spec)
      : net_(net), spec_(std::move(spec)), ep_(net, spec_.address) {}

  const DeviceSpec& spec() const { return spec_; }
  const std::optional<std::string>& thing_id() const { return thing_id_; }

  void register_now() {
    ep_.request(spec_.gateway,
                make_request(code::post, "/rd", {},
                             to_bytes(canonical_dump(
                                 registration_to_json(spec_.thing, spec_.services))),
                             kContentFormatJsonLdDefault),
                [this](Expected<CoapMessage> r) {
                  if (!r || !(r.value().code == code::created)) {
                    net_->bump("register_failed");
                    return;
                  }
                  net_->bump("register_ok");
                  Json body = Json::parse(to_string(r.value().payload));
                  thing_id_ = body.at("thing").get<std::string>();
                  active_ = true;
                  if (spec_.auto_refresh_ms > 0) arm_refresh();
                });
  }

  void refresh_now() {
    if (!thing_id_) {
      net_->bump("refresh_skipped");
      return;
    }
    ep_.request(spec_.gateway, make_request(code::put, "/rd/" + *thing_id_, {}, {}),
                [this](Expected<CoapMessage> r) {
                  net_->bump(r && r.value().code == code::changed ? "refresh_ok"
                                                                  : "refresh_failed");
                });
  }

  void remove_now() {
    active_ = false;
    if (!thing_id_) {
      net_->bump("remove_skipped");
      return;
    }
    ep_.request(spec_.gateway, make_request(code::del, "/rd/" + *thing_id_, {}, {}),
                [this](Expected<CoapMessage> r) {
                  net_->bump(r && r.value().code == code::deleted ? "remove_ok"
                                                                  : "remove_failed");
                });
    thing_id_.reset();
  }

 private:
  void arm_refresh() {
    net_->schedule_node(spec_.auto_refresh_ms, spec_.address, [this] {
      if (!active_) return;
      refresh_now();
      arm_refresh();
    });
  }

  VirtualNet* net_;
  DeviceSpec spec_;
  CoapEndpoint ep_;
  std::optional<std::string> thing_id_;
  bool active_ = false;
};

// -- runner -----------------------------------------------------------------------

/// Executes a scenario on the virtual network and returns metrics whose dump
/// is a pure function of (scenario bytes, seed).
class ScenarioRunner {
 public:
  ScenarioRunner(Scenario scenario, std::uint64_t seed)
      : scenario_(std::move(scenario)),
        net_(seed),
        taxonomy_(load_taxonomy_file(scenario_.taxonomy_path)) {
    metrics_.seed = seed;
  }

  VirtualNet& net() { return net_; }
  const Metrics& metrics() const { return metrics_; }
  GatewayNode* gateway(const std::string& addr) {
    auto it = gateways_.find(addr);
    return it == gateways_.end() ? nullptr : it->second.get();
  }
  CloudNode* cloud() { return cloud_.get(); }

  Metrics run() {
    wire_links();
    if (scenario_.cloud) {
      // the cloud may run a broader taxonomy than the fog layer
      const Taxonomy* tax = &taxonomy_;
      if (!scenario_.cloud->taxonomy_path.empty()) {
        cloud_taxonomy_ = load_taxonomy_file(scenario_.cloud->taxonomy_path);
        tax = &*cloud_taxonomy_;
      }
      cloud_ = std::make_unique<CloudNode>(&net_, tax, *scenario_.cloud);
    }
    for (const auto& d : scenario_.devices)
      devices_[d.address] = std::make_unique<DeviceAgent>(&net_, d);
    client_ = std::make_unique<CoapEndpoint>(&net_, kClientAddress);
    boot_next(0);
    double last_action = 0.0;
    for (const auto& a : scenario_.timeline) {
      last_action = a.time_ms;
      net_.schedule(a.time_ms, [this, &a] { execute(a); });
    }
    double end = std::max(scenario_.duration_ms, last_action + kSettleMs);
    net_.run_until(end);
    // settle late deliveries without letting periodic timers run unbounded
    for (int i = 0; i < 100 && net_.messages_in_flight() > 0; ++i)
      net_.run_until(net_.now() + 100.0);
    collect_counters();
    return metrics_;
  }

  // Successor-ring and pointer-residency audit over the live in-ring nodes.
  RingAudit audit_ring_now() {
    RingAudit a;
    a.time_ms = net_.now();
    std::vector<GatewayNode*> live;
    for (auto& [addr, gw] : gateways_)
      if (gw->running() && gw->overlay().in_ring() && net_.alive(addr)) live.push_back(gw.get());
    a.nodes = static_cast<unsigned>(live.size());
    if (live.empty()) {
      a.ring_ok = a.pointers_ok = true;
      metrics_.ring_audits.push_back(a);
      return a;
    }
    std::sort(live.begin(), live.end(), [](GatewayNode* x, GatewayNode* y) {
      return x->overlay().id() < y->overlay().id();
    });
    a.ring_ok = true;
    for (size_t i = 0; i < live.size(); ++i) {
      const std::string& expect = live[(i + 1) % live.size()]->config().address;
      if (live[i]->overlay().table().successor().address != expect) a.ring_ok = false;
    }
    unsigned m = live.front()->overlay().config().m;
    auto ideal_owner = [&](NodeId key) -> GatewayNode* {
      for (auto* gw : live)
        if (gw->overlay().id() >= key) return gw;
      return live.front();
    };
    for (auto* gw : live) {
      for (const auto& c : gw->directory().advertised_concepts()) {
        GatewayNode* owner = ideal_owner(hash_key(c, m));
        const auto& store = owner->overlay().store();
        auto it = store.find(c);
        if (it == store.end() || !it->second.holders.count(gw->config().address)) ++a.missing;
      }
    }
    for (auto* gw : live)
      for (const auto& [c, rec] : gw->overlay().store())
        if (ideal_owner(rec.key) != gw) ++a.misplaced;
    a.pointers_ok = a.missing == 0;
    metrics_.ring_audits.push_back(a);
    return a;
  }

 private:
  static constexpr double kSettleMs = 10000.0;

  void wire_links() {
    net_.set_default_link({scenario_.links.fog_latency_ms, scenario_.links.drop_prob});
    if (!scenario_.cloud) return;
    const std::string& c = scenario_.cloud->address;
    LinkSpec up{scenario_.links.cloud_latency_ms, scenario_.links.drop_prob};
    auto wire = [&](const std::string& other) { net_.add_link(c, other, up); };
    for (const auto& g : scenario_.gateways) wire(g.address);
    for (const auto& a : scenario_.timeline)
      if (a.kind == ActionKind::join_gateway) wire(a.join_config.address);
    for (const auto& d : scenario_.devices) wire(d.address);
    wire(kClientAddress);
  }

  // Gateways boot strictly in listing order; each join waits for the previous.
  void boot_next(size_t index) {
    if (index >= scenario_.gateways.size()) return;
    auto gw = std::make_unique<GatewayNode>(&net_, &taxonomy_, scenario_.gateways[index]);
    GatewayNode* raw = gw.get();
    gateways_[raw->config().address] = std::move(gw);
    raw->start([this, index](Expected<bool> r) {
      if (!r) net_.bump("boot_failed");
      boot_next(index + 1);
    });
  }

  void execute(const TimelineAction& a) {
    switch (a.kind) {
      case ActionKind::register_device: return devices_.at(a.device)->register_now();
      case ActionKind::refresh: return devices_.at(a.device)->refresh_now();
      case ActionKind::remove_device: return devices_.at(a.device)->remove_now();
      case ActionKind::query: return do_query(a);
      case ActionKind::compose: return do_compose(a);
      case ActionKind::kill_gateway: return do_kill(a.gateway);
      case ActionKind::join_gateway: return do_join(a.join_config);
      case ActionKind::leave_gateway: return do_leave(a.gateway);
      case ActionKind::audit_ring: audit_ring_now(); return;
    }
  }

  void do_query(const TimelineAction& a) {
    size_t idx = metrics_.queries.size();
    QueryMetric q;
    q.time_ms = net_.now();
    q.target = a.target;
    metrics_.queries.push_back(q);
    // scenario query strings are whole filter expressions; each token becomes
    // one Uri-Query option
    std::vector<std::string> opts;
    for (const auto& s : a.queries) {
      std::istringstream iss(s);
      std::string tok;
      while (iss >> tok) opts.push_back(tok);
    }
    client_->request(a.target, make_request(code::get, "/rd-lookup", opts, {}),
                     [this, idx, t0 = net_.now()](Expected<CoapMessage> r) {
                       QueryMetric& q = metrics_.queries[idx];
                       q.latency_ms = net_.now() - t0;
                       if (!r) {
                         q.status = errc_name(r.error().code());
                         return;
                       }
                       const CoapMessage& m = r.value();
                       q.status = m.code.render();
                       q.success = m.code == code::content;
                       if (auto h = m.option_uint(kOptionHops))
                         q.hops = static_cast<unsigned>(*h);
                       if (q.success)
                         q.links = static_cast<unsigned>(
                             parse_links(to_string(m.payload)).size());
                     });
  }

  void do_compose(const TimelineAction& a) {
    size_t idx = metrics_.composes.size();
    ComposeMetric c;
    c.time_ms = net_.now();
    c.target = a.target;
    metrics_.composes.push_back(c);
    Bytes payload = to_bytes(canonical_dump(composition_request_to_json(a.compose_request)));
    client_->request(a.target,
                     make_request(code::post, "/compose", {}, payload,
                                  kContentFormatJsonLdDefault),
                     [this, idx, t0 = net_.now()](Expected<CoapMessage> r) {
                       ComposeMetric& c = metrics_.composes[idx];
                       c.latency_ms = net_.now() - t0;
                       if (!r) {
                         c.status = errc_name(r.error().code());
                         return;
                       }
                       const CoapMessage& m = r.value();
                       c.status = m.code.render();
                       c.success = m.code == code::content;
                       if (c.success) {
                         Json body = Json::parse(to_string(m.payload), nullptr, false);
                         if (body.is_object() && body.contains("stages"))
                           c.stages = static_cast<unsigned>(body.at("stages").size());
                       }
                     });
  }

  void do_kill(const std::string& addr) {
    auto it = gateways_.find(addr);
    if (it == gateways_.end()) return;
    it->second->halt();
    net_.kill(addr);
    net_.bump("gateway_killed");
    graveyard_.push_back(std::move(it->second));  // armed timers may still hold it
    gateways_.erase(it);
  }

  void do_join(const GatewayConfig& cfg) {
    auto it = gateways_.find(cfg.address);
    if (it != gateways_.end()) {  // rejoin after a leave: retire the old node
      it->second->halt();
      graveyard_.push_back(std::move(it->second));
      gateways_.erase(it);
    }
    auto gw = std::make_unique<GatewayNode>(&net_, &taxonomy_, cfg);
    GatewayNode* raw = gw.get();
    gateways_[cfg.address] = std::move(gw);
    net_.bump("gateway_joined");
    raw->start([this](Expected<bool> r) {
      if (!r) net_.bump("join_failed");
    });
  }

  void do_leave(const std::string& addr) {
    auto it = gateways_.find(addr);
    if (it == gateways_.end()) return;
    net_.bump("gateway_left");
    it->second->leave();
  }

  void collect_counters() {
    metrics_.counters = net_.tags();
    metrics_.counters["delivered"] = net_.messages_delivered();
    metrics_.counters["dropped"] = net_.messages_dropped();
    metrics_.counters["in_flight"] = net_.messages_in_flight();
    metrics_.counters["sent"] = net_.messages_sent();
  }

  Scenario scenario_;
  VirtualNet net_;
  Taxonomy taxonomy_;
  std::optional<Taxonomy> cloud_taxonomy_;
  Metrics metrics_;
  std::unique_ptr<CloudNode> cloud_;
  std::map<std::string, std::unique_ptr<GatewayNode>> gateways_;
  std::vector<std::unique_ptr<GatewayNode>> graveyard_;
  std::map<std::string, std::unique_ptr<DeviceAgent>> devices_;
  std::unique_ptr<CoapEndpoint> client_;
};

inline Metrics run_scenario(const std::string& path, std::uint64_t seed) {
  ScenarioRunner runner(load_scenario(path), seed);
  return runner.run();
}

}  // namespace fogdisc
