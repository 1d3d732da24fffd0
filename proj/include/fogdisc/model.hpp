#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "fogdisc/common.hpp"

namespace fogdisc {

enum class EntityKind { thing, service, gateway, composite };

inline char kind_letter(EntityKind k) {
  switch (k) {
    case EntityKind::thing: return 't';
    case EntityKind::service: return 's';
    case EntityKind::gateway: return 'g';
    case EntityKind::composite: return 'c';
  }
  return '?';
}

/// Gateway-scoped counter identity, rendered as `<kind>-<gateway>-<sequence>`.
struct Identifier {
  EntityKind kind = EntityKind::thing;
  unsigned gateway_ordinal = 0;
  unsigned sequence = 0;

  auto operator<=>(const Identifier&) const = default;

  std::string render() const {
    return std::string(1, kind_letter(kind)) + "-" +
           std::to_string(gateway_ordinal) + "-" + std::to_string(sequence);
  }

  static Identifier parse(const std::string& text) {
    auto bad = [&] { raise(Errc::malformed_json, "identifier: " + text); };
    if (text.size() < 5 || text[1] != '-') bad();
    EntityKind kind;
    switch (text[0]) {
      case 't': kind = EntityKind::thing; break;
      case 's': kind = EntityKind::service; break;
      case 'g': kind = EntityKind::gateway; break;
      case 'c': kind = EntityKind::composite; break;
      default: bad();
    }
    auto dash = text.find('-', 2);
    if (dash == std::string::npos || dash + 1 >= text.size()) bad();
    for (size_t i = 2; i < text.size(); ++i)
      if (i != dash && (text[i] < '0' || text[i] > '9')) bad();
    Identifier id;
    id.kind = kind;
    id.gateway_ordinal = static_cast<unsigned>(std::stoul(text.substr(2, dash - 2)));
    id.sequence = static_cast<unsigned>(std::stoul(text.substr(dash + 1)));
    return id;
  }
};

struct Location {
  double latitude = 0.0;
  double longitude = 0.0;

  auto operator<=>(const Location&) const = default;

  void validate() const {
    if (latitude < -90.0 || latitude > 90.0) raise(Errc::range_violation, "latitude");
    if (longitude < -180.0 || longitude > 180.0) raise(Errc::range_violation, "longitude");
  }
};

enum class QosField { delay_ms, price, reliability, availability, security_level };

inline constexpr std::array<QosField, 5> kQosFields = {
    QosField::delay_ms, QosField::price, QosField::reliability,
    QosField::availability, QosField::security_level};

inline const char* qos_field_name(QosField f) {
  switch (f) {
    case QosField::delay_ms: return "delay_ms";
    case QosField::price: return "price";
    case QosField::reliability: return "reliability";
    case QosField::availability: return "availability";
    case QosField::security_level: return "security_level";
  }
  return "?";
}

inline QosField qos_field_from_name(const std::string& name) {
  for (QosField f : kQosFields)
    if (name == qos_field_name(f)) return f;
  raise(Errc::unknown_member, name);
}

/// Non-functional service profile. delay_ms and price are costs, the rest
/// are benefits.
struct QoSProfile {
  double delay_ms = 0.0;
  double price = 0.0;
  double reliability = 1.0;
  double availability = 1.0;
  int security_level = 0;

  auto operator<=>(const QoSProfile&) const = default;

  double get(QosField f) const {
    switch (f) {
      case QosField::delay_ms: return delay_ms;
      case QosField::price: return price;
      case QosField::reliability: return reliability;
      case QosField::availability: return availability;
      case QosField::security_level: return static_cast<double>(security_level);
    }
    return 0.0;
  }

  void validate() const {
    if (delay_ms < 0.0) raise(Errc::range_violation, "delay_ms");
    if (price < 0.0) raise(Errc::range_violation, "price");
    if (reliability < 0.0 || reliability > 1.0) raise(Errc::range_violation, "reliability");
    if (availability < 0.0 || availability > 1.0) raise(Errc::range_violation, "availability");
    if (security_level < 0 || security_level > 5) raise(Errc::range_violation, "security_level");
  }

  static bool legal(QosField f, double v) {
    switch (f) {
      case QosField::delay_ms:
      case QosField::price: return v >= 0.0;
      case QosField::reliability:
      case QosField::availability: return v >= 0.0 && v <= 1.0;
      case QosField::security_level: return v >= 0.0 && v <= 5.0;
    }
    return false;
  }
};

struct ThingDescription {
  std::optional<Identifier> id;
  std::string name;
  std::string concept_iri;
  Location location;
  std::string endpoint;
  std::map<std::string, std::string> metadata;

  auto operator<=>(const ThingDescription&) const = default;
};

struct ServiceDescription {
  std::optional<Identifier> id;
  std::optional<Identifier> thing_id;  // stamped by the registration module
  std::string functional_concept;
  std::set<std::string> inputs;
  std::set<std::string> outputs;
  std::set<std::string> keywords;
  QoSProfile qos;
  std::string path;
  unsigned sector = 0;

  auto operator<=>(const ServiceDescription&) const = default;
};

}  // namespace fogdisc
