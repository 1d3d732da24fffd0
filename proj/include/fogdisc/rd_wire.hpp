#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "fogdisc/coap_endpoint.hpp"
#include "fogdisc/jsonld.hpp"
#include "fogdisc/link_format.hpp"
#include "fogdisc/matchmaker.hpp"

namespace fogdisc {

// Domain error → response class. Client mistakes map to 4.00, lookups that
// came up empty to 4.04, infrastructure trouble to 5.03.
inline CoapCode status_for_error(Errc c) {
  switch (c) {
    case Errc::unknown_concept:
    case Errc::unknown_thing:
    case Errc::not_found:
    case Errc::no_remote_match:
    case Errc::no_plan_found:
      return code::not_found;
    case Errc::lookup_timeout:
    case Errc::request_timeout:
    case Errc::bootstrap_unreachable:
    case Errc::no_gateways_known:
    case Errc::all_gateways_timed_out:
      return code::service_unavailable;
    default:
      return code::bad_request;
  }
}

inline void respond_error(const Responder& respond, const Error& e) {
  std::string text = errc_name(e.code());
  if (!e.detail().empty()) text += ": " + e.detail();
  respond(status_for_error(e.code()), to_bytes(text));
}

inline Json parse_json_payload(const CoapMessage& msg) {
  Json j = Json::parse(to_string(msg.payload), nullptr, false);
  if (j.is_discarded()) raise(Errc::malformed_json, "parse");
  return j;
}

// -- query-string grammar -------------------------------------------------------
// rt=<concept> [kw=<text>]* [q.<field>=<op><num>]* [minsim=<real>] [k=<uint>]
// [w.<field>=<real>]*   op ∈ {<, <=, >, >=, ==, !=, =}

inline Cmp parse_cmp(const std::string& text, size_t& pos) {
  auto starts = [&](const char* t) {
    return text.compare(pos, std::char_traits<char>::length(t), t) == 0;
  };
  if (starts("<=")) return pos += 2, Cmp::le;
  if (starts(">=")) return pos += 2, Cmp::ge;
  if (starts("==")) return pos += 2, Cmp::eq;
  if (starts("!=")) return pos += 2, Cmp::ne;
  if (starts("<")) return pos += 1, Cmp::lt;
  if (starts(">")) return pos += 1, Cmp::gt;
  if (starts("=")) return pos += 1, Cmp::eq;
  raise(Errc::syntax_error, "comparator: " + text);
}

namespace detail {

inline double parse_number_arg(const std::string& text, const std::string& key) {
  if (text.empty()) raise(Errc::syntax_error, key);
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) raise(Errc::syntax_error, key + "=" + text);
  return v;
}

}  // namespace detail

struct ParsedDiscovery {
  DiscoveryRequest request;
  std::map<QosField, double> weights;  // empty → caller's default
};

inline ParsedDiscovery parse_discovery_query(const std::vector<std::string>& queries,
                                             double default_min_similarity,
                                             unsigned default_max_results) {
  ParsedDiscovery out;
  out.request.min_similarity = default_min_similarity;
  out.request.max_results = default_max_results;
  bool have_rt = false;
  for (const auto& q : queries) {
    auto eq = q.find('=');
    if (eq == std::string::npos) raise(Errc::syntax_error, q);
    std::string key = q.substr(0, eq);
    std::string value = q.substr(eq + 1);
    if (key == "rt") {
      if (value.empty()) raise(Errc::syntax_error, "rt");
      out.request.concept_iri = value;
      have_rt = true;
    } else if (key == "kw") {
      if (value.empty()) raise(Errc::syntax_error, "kw");
      out.request.keywords.insert(value);
    } else if (key == "minsim") {
      out.request.min_similarity = detail::parse_number_arg(value, key);
    } else if (key == "k") {
      double v = detail::parse_number_arg(value, key);
      if (v < 0 || v != static_cast<unsigned>(v)) raise(Errc::syntax_error, "k=" + value);
      out.request.max_results = static_cast<unsigned>(v);
    } else if (key.rfind("q.", 0) == 0) {
      QosField field = qos_field_from_name(key.substr(2));
      size_t pos = 0;
      Cmp cmp = parse_cmp(value, pos);
      double bound = detail::parse_number_arg(value.substr(pos), key);
      out.request.qos_constraints.push_back({field, cmp, bound});
    } else if (key.rfind("w.", 0) == 0) {
      out.weights[qos_field_from_name(key.substr(2))] = detail::parse_number_arg(value, key);
    } else {
      raise(Errc::syntax_error, key);
    }
  }
  if (!have_rt) raise(Errc::missing_field, "rt");
  return out;
}

// -- federated query payloads ------------------------------------------------------

inline Json discovery_request_to_json(const DiscoveryRequest& r) {
  Json constraints = Json::array();
  for (const auto& c : r.qos_constraints)
    constraints.push_back(Json{{"bound", c.bound},
                               {"cmp", cmp_text(c.cmp)},
                               {"field", qos_field_name(c.field)}});
  return Json{{"concept", r.concept_iri},
              {"keywords", detail::sorted_array(r.keywords)},
              {"max_results", r.max_results},
              {"min_similarity", r.min_similarity},
              {"qos_constraints", constraints}};
}

inline DiscoveryRequest discovery_request_from_json(const Json& j) {
  detail::expect_members(
      j, {"concept", "keywords", "max_results", "min_similarity", "qos_constraints"}, {});
  DiscoveryRequest r;
  r.concept_iri = detail::string_field(j, "concept");
  r.keywords = detail::string_set_field(j, "keywords");
  r.min_similarity = detail::number_field(j, "min_similarity");
  if (!j.at("max_results").is_number_unsigned()) raise(Errc::malformed_json, "max_results");
  r.max_results = j.at("max_results").get<unsigned>();
  for (const auto& c : j.at("qos_constraints")) {
    detail::expect_members(c, {"bound", "cmp", "field"}, {});
    size_t pos = 0;
    std::string cmp_s = detail::string_field(c, "cmp");
    Cmp cmp = parse_cmp(cmp_s, pos);
    if (pos != cmp_s.size()) raise(Errc::malformed_json, "cmp");
    r.qos_constraints.push_back(
        {qos_field_from_name(detail::string_field(c, "field")), cmp,
         detail::number_field(c, "bound")});
  }
  return r;
}

/// One federated-discovery hit: the match plus the full description, so the
/// origin can rank on fresh QoS values.
struct RemoteHit {
  MatchResult match;
  ServiceDescription svc;

  friend bool operator==(const RemoteHit&, const RemoteHit&) = default;
};

inline Json remote_hit_to_json(const RemoteHit& h) {
  return Json{{"degree", degree_name(h.match.degree)},
              {"gateway", h.match.gateway},
              {"score", h.match.score},
              {"service", service_to_json(h.svc)}};
}

inline RemoteHit remote_hit_from_json(const Json& j) {
  detail::expect_members(j, {"degree", "gateway", "score", "service"}, {});
  RemoteHit h;
  h.svc = service_from_json(j.at("service"));
  h.match.degree = degree_from_name(detail::string_field(j, "degree"));
  h.match.gateway = detail::string_field(j, "gateway");
  h.match.score = detail::number_field(j, "score");
  if (!h.svc.id) raise(Errc::missing_field, "service @id");
  h.match.service_id = *h.svc.id;
  return h;
}

// -- link rendering ------------------------------------------------------------------

inline std::string format_fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct LinkView {
  std::string gateway;
  std::string path;
  std::string rt;
  MatchDegree degree = MatchDegree::fail;
  double score = 0;
  double utility = 0;
};

inline std::string render_discovery_links(const std::vector<LinkView>& views) {
  std::vector<LinkEntry> entries;
  for (const auto& v : views) {
    LinkEntry e;
    e.target = "coap://" + v.gateway + v.path;
    e.params = {{"deg", degree_name(v.degree)},
                {"rt", v.rt},
                {"score", format_fixed3(v.score)},
                {"util", format_fixed3(v.utility)}};
    entries.push_back(std::move(e));
  }
  return serialize_links(entries);
}

// -- registration bundle --------------------------------------------------------------

struct RegistrationBundle {
  ThingDescription thing;
  std::vector<ServiceDescription> services;
};

inline RegistrationBundle parse_registration(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) raise(Errc::malformed_json, "parse");
  detail::expect_members(j, {"services", "thing"}, {});
  RegistrationBundle b;
  b.thing = thing_from_json(j.at("thing"));
  if (!j.at("services").is_array()) raise(Errc::malformed_json, "services");
  for (const auto& s : j.at("services")) b.services.push_back(service_from_json(s));
  return b;
}

inline Json registration_to_json(const ThingDescription& t,
                                 const std::vector<ServiceDescription>& services) {
  Json svc = Json::array();
  for (const auto& s : services) svc.push_back(service_to_json(s));
  return Json{{"services", svc}, {"thing", thing_to_json(t)}};
}

}  // namespace fogdisc
