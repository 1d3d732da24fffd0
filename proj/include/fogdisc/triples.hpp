#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fogdisc/model.hpp"

namespace fogdisc {

using TripleValue = std::variant<std::string, double>;

// numbers order before text
inline bool value_less(const TripleValue& a, const TripleValue& b) {
  if (a.index() != b.index()) return a.index() > b.index() ? false : std::holds_alternative<double>(a);
  if (std::holds_alternative<double>(a)) return std::get<double>(a) < std::get<double>(b);
  return std::get<std::string>(a) < std::get<std::string>(b);
}

struct Triple {
  std::string subject;
  std::string predicate;
  TripleValue object;

  bool operator==(const Triple&) const = default;
};

namespace pred {
inline constexpr const char* name = "fog:name";
inline constexpr const char* concept_iri = "fog:concept";
inline constexpr const char* latitude = "fog:lat";
inline constexpr const char* longitude = "fog:lon";
inline constexpr const char* endpoint = "fog:endpoint";
inline constexpr const char* metadata_prefix = "fog:meta/";
inline constexpr const char* functional_concept = "fog:functionalConcept";
inline constexpr const char* thing_id = "fog:thingId";
inline constexpr const char* path = "fog:path";
inline constexpr const char* keyword = "fog:keyword";
inline constexpr const char* input = "fog:input";
inline constexpr const char* output = "fog:output";
inline constexpr const char* qos_prefix = "fog:qos/";
}  // namespace pred

inline std::vector<Triple> to_triples(const ThingDescription& d) {
  if (!d.id) raise(Errc::unregistered_description, "thing");
  std::string s = d.id->render();
  std::vector<Triple> out{
      {s, pred::name, d.name},
      {s, pred::concept_iri, d.concept_iri},
      {s, pred::latitude, d.location.latitude},
      {s, pred::longitude, d.location.longitude},
      {s, pred::endpoint, d.endpoint},
  };
  for (const auto& [k, v] : d.metadata)
    out.push_back({s, pred::metadata_prefix + k, v});
  return out;
}

inline std::vector<Triple> to_triples(const ServiceDescription& d) {
  if (!d.id || !d.thing_id) raise(Errc::unregistered_description, "service");
  std::string s = d.id->render();
  std::vector<Triple> out{
      {s, pred::functional_concept, d.functional_concept},
      {s, pred::thing_id, d.thing_id->render()},
      {s, pred::path, d.path},
  };
  for (QosField f : kQosFields)
    out.push_back({s, std::string(pred::qos_prefix) + qos_field_name(f), d.qos.get(f)});
  for (const auto& kw : d.keywords) out.push_back({s, pred::keyword, kw});
  for (const auto& in : d.inputs) out.push_back({s, pred::input, in});
  for (const auto& o : d.outputs) out.push_back({s, pred::output, o});
  return out;
}

}  // namespace fogdisc
