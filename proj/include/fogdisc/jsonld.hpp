#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "fogdisc/model.hpp"

namespace fogdisc {

using Json = nlohmann::json;

using Description = std::variant<ThingDescription, ServiceDescription>;

// nlohmann::json keeps object members in a sorted std::map, so dumping with
// no indent already yields the canonical text: keys sorted, sets emitted as
// sorted arrays by the encoders below, no insignificant whitespace.
inline std::string canonical_dump(const Json& j) { return j.dump(); }

namespace detail {

inline Json thing_context() {
  return Json{{"concept", "fog:concept"},   {"endpoint", "fog:endpoint"},
              {"location", "fog:location"}, {"metadata", "fog:metadata"},
              {"name", "fog:name"}};
}

inline Json service_context() {
  return Json{{"functional_concept", "fog:functionalConcept"},
              {"inputs", "fog:inputs"},
              {"keywords", "fog:keywords"},
              {"outputs", "fog:outputs"},
              {"path", "fog:path"},
              {"qos", "fog:qos"},
              {"sector", "fog:sector"},
              {"thing_id", "fog:thingId"}};
}

inline Json sorted_array(const std::set<std::string>& s) {
  Json a = Json::array();
  for (const auto& v : s) a.push_back(v);
  return a;
}

inline void expect_members(const Json& obj, const std::set<std::string>& required,
                           const std::set<std::string>& optional) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!required.count(it.key()) && !optional.count(it.key()))
      raise(Errc::unknown_member, it.key());
  }
  for (const auto& name : required) {
    if (!obj.contains(name)) raise(Errc::missing_field, name);
  }
}

inline double number_field(const Json& obj, const std::string& name) {
  const Json& v = obj.at(name);
  if (!v.is_number()) raise(Errc::malformed_json, name);
  return v.get<double>();
}

inline std::string string_field(const Json& obj, const std::string& name) {
  const Json& v = obj.at(name);
  if (!v.is_string()) raise(Errc::malformed_json, name);
  return v.get<std::string>();
}

inline std::set<std::string> string_set_field(const Json& obj, const std::string& name) {
  const Json& v = obj.at(name);
  if (!v.is_array()) raise(Errc::malformed_json, name);
  std::set<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) raise(Errc::malformed_json, name);
    out.insert(e.get<std::string>());
  }
  return out;
}

}  // namespace detail

inline Json location_to_json(const Location& loc) {
  return Json{{"latitude", loc.latitude}, {"longitude", loc.longitude}};
}

inline Location location_from_json(const Json& j) {
  if (!j.is_object()) raise(Errc::malformed_json, "location");
  detail::expect_members(j, {"latitude", "longitude"}, {});
  Location loc;
  loc.latitude = detail::number_field(j, "latitude");
  loc.longitude = detail::number_field(j, "longitude");
  loc.validate();
  return loc;
}

inline Json qos_to_json(const QoSProfile& q) {
  return Json{{"availability", q.availability},
              {"delay_ms", q.delay_ms},
              {"price", q.price},
              {"reliability", q.reliability},
              {"security_level", q.security_level}};
}

inline QoSProfile qos_from_json(const Json& j) {
  if (!j.is_object()) raise(Errc::malformed_json, "qos");
  detail::expect_members(
      j, {"availability", "delay_ms", "price", "reliability", "security_level"}, {});
  QoSProfile q;
  q.delay_ms = detail::number_field(j, "delay_ms");
  q.price = detail::number_field(j, "price");
  q.reliability = detail::number_field(j, "reliability");
  q.availability = detail::number_field(j, "availability");
  if (!j.at("security_level").is_number_integer())
    raise(Errc::malformed_json, "security_level");
  q.security_level = j.at("security_level").get<int>();
  q.validate();
  return q;
}

inline Json thing_to_json(const ThingDescription& d) {
  Json j{{"@context", detail::thing_context()},
         {"@type", "Thing"},
         {"concept", d.concept_iri},
         {"endpoint", d.endpoint},
         {"location", location_to_json(d.location)},
         {"name", d.name}};
  Json meta = Json::object();
  for (const auto& [k, v] : d.metadata) meta[k] = v;
  j["metadata"] = meta;
  if (d.id) j["@id"] = d.id->render();
  return j;
}

inline Json service_to_json(const ServiceDescription& d) {
  Json j{{"@context", detail::service_context()},
         {"@type", "Service"},
         {"functional_concept", d.functional_concept},
         {"inputs", detail::sorted_array(d.inputs)},
         {"keywords", detail::sorted_array(d.keywords)},
         {"outputs", detail::sorted_array(d.outputs)},
         {"path", d.path},
         {"qos", qos_to_json(d.qos)},
         {"sector", d.sector}};
  if (d.id) j["@id"] = d.id->render();
  if (d.thing_id) j["thing_id"] = d.thing_id->render();
  return j;
}

inline std::string encode_description(const ThingDescription& d) {
  return canonical_dump(thing_to_json(d));
}

inline std::string encode_description(const ServiceDescription& d) {
  return canonical_dump(service_to_json(d));
}

inline std::string encode_description(const Description& d) {
  return std::visit([](const auto& v) { return encode_description(v); }, d);
}

inline ThingDescription thing_from_json(const Json& j) {
  detail::expect_members(
      j, {"@context", "@type", "concept", "endpoint", "location", "metadata", "name"},
      {"@id"});
  ThingDescription d;
  if (j.contains("@id")) d.id = Identifier::parse(detail::string_field(j, "@id"));
  d.name = detail::string_field(j, "name");
  d.concept_iri = detail::string_field(j, "concept");
  d.location = location_from_json(j.at("location"));
  d.endpoint = detail::string_field(j, "endpoint");
  const Json& meta = j.at("metadata");
  if (!meta.is_object()) raise(Errc::malformed_json, "metadata");
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    if (!it.value().is_string()) raise(Errc::malformed_json, "metadata");
    d.metadata[it.key()] = it.value().get<std::string>();
  }
  return d;
}

inline ServiceDescription service_from_json(const Json& j) {
  detail::expect_members(j,
                         {"@context", "@type", "functional_concept", "inputs",
                          "keywords", "outputs", "path", "qos", "sector"},
                         {"@id", "thing_id"});
  ServiceDescription d;
  if (j.contains("@id")) d.id = Identifier::parse(detail::string_field(j, "@id"));
  if (j.contains("thing_id"))
    d.thing_id = Identifier::parse(detail::string_field(j, "thing_id"));
  d.functional_concept = detail::string_field(j, "functional_concept");
  d.inputs = detail::string_set_field(j, "inputs");
  d.outputs = detail::string_set_field(j, "outputs");
  d.keywords = detail::string_set_field(j, "keywords");
  d.qos = qos_from_json(j.at("qos"));
  d.path = detail::string_field(j, "path");
  if (!j.at("sector").is_number_unsigned()) raise(Errc::malformed_json, "sector");
  d.sector = j.at("sector").get<unsigned>();
  return d;
}

inline Description description_from_json(const Json& j) {
  if (!j.is_object()) raise(Errc::malformed_json, "top-level");
  if (!j.contains("@context")) raise(Errc::missing_field, "@context");
  if (!j.contains("@type")) raise(Errc::missing_field, "@type");
  const Json& type = j.at("@type");
  if (!type.is_string()) raise(Errc::malformed_json, "@type");
  std::string t = type.get<std::string>();
  if (t == "Thing") return thing_from_json(j);
  if (t == "Service") return service_from_json(j);
  raise(Errc::malformed_json, "@type: " + t);
}

inline Description decode_description(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) raise(Errc::malformed_json, "parse");
  return description_from_json(j);
}

inline std::string canonicalize(const ThingDescription& d) {
  return canonical_dump(thing_to_json(d));
}

inline std::string canonicalize(const ServiceDescription& d) {
  return canonical_dump(service_to_json(d));
}

inline std::string canonicalize(const Description& d) {
  return std::visit([](const auto& v) { return canonicalize(v); }, d);
}

}  // namespace fogdisc
