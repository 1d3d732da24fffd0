#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fogdisc {

// Every failure the library reports carries one of these codes. Handlers and
// tests dispatch on the code; the detail string names the offending field,
// concept, or position.
enum class Errc {
  // codecs
  malformed_json,
  missing_field,
  range_violation,
  unknown_member,
  token_too_long,
  option_out_of_order,
  truncated,
  bad_version,
  reserved_tkl,
  payload_marker_without_payload,
  malformed_option,
  unterminated_quote,
  empty_target,
  unsupported_method,
  // taxonomy / queries
  cycle_detected,
  multiple_roots,
  dangling_parent,
  unknown_concept,
  syntax_error,
  unbound_filter_variable,
  unbound_projection,
  unregistered_description,
  // directory
  already_has_id,
  unknown_thing,
  not_found,
  // ranking / composition
  empty_candidate_list,
  empty_plan,
  no_plan_found,
  no_gateways_known,
  all_gateways_timed_out,
  // overlay / network
  lookup_timeout,
  bootstrap_unreachable,
  no_remote_match,
  request_timeout,
  no_link,
  unknown_address,
  scenario_parse_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_json: return "MalformedJson";
    case Errc::missing_field: return "MissingField";
    case Errc::range_violation: return "RangeViolation";
    case Errc::unknown_member: return "UnknownMember";
    case Errc::token_too_long: return "TokenTooLong";
    case Errc::option_out_of_order: return "OptionOutOfOrder";
    case Errc::truncated: return "Truncated";
    case Errc::bad_version: return "BadVersion";
    case Errc::reserved_tkl: return "ReservedTKL";
    case Errc::payload_marker_without_payload: return "PayloadMarkerWithoutPayload";
    case Errc::malformed_option: return "MalformedOption";
    case Errc::unterminated_quote: return "UnterminatedQuote";
    case Errc::empty_target: return "EmptyTarget";
    case Errc::unsupported_method: return "UnsupportedMethod";
    case Errc::cycle_detected: return "CycleDetected";
    case Errc::multiple_roots: return "MultipleRoots";
    case Errc::dangling_parent: return "DanglingParent";
    case Errc::unknown_concept: return "UnknownConcept";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unbound_filter_variable: return "UnboundFilterVariable";
    case Errc::unbound_projection: return "UnboundProjection";
    case Errc::unregistered_description: return "UnregisteredDescription";
    case Errc::already_has_id: return "AlreadyHasId";
    case Errc::unknown_thing: return "UnknownThing";
    case Errc::not_found: return "NotFound";
    case Errc::empty_candidate_list: return "EmptyCandidateList";
    case Errc::empty_plan: return "EmptyPlan";
    case Errc::no_plan_found: return "NoPlanFound";
    case Errc::no_gateways_known: return "NoGatewaysKnown";
    case Errc::all_gateways_timed_out: return "AllGatewaysTimedOut";
    case Errc::lookup_timeout: return "LookupTimeout";
    case Errc::bootstrap_unreachable: return "BootstrapUnreachable";
    case Errc::no_remote_match: return "NoRemoteMatch";
    case Errc::request_timeout: return "RequestTimeout";
    case Errc::no_link: return "NoLink";
    case Errc::unknown_address: return "UnknownAddress";
    case Errc::scenario_parse_error: return "ScenarioParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail = "")
      : std::runtime_error(std::string(errc_name(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code),
        detail_(std::move(detail)) {}

  Errc code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] inline void raise(Errc code, std::string detail = "") {
  throw Error(code, std::move(detail));
}

// Value-or-error carrier for asynchronous completions, where throwing across
// the event loop is not an option.
template <typename T>
class Expected {
 public:
  Expected(T value) : v_(std::move(value)) {}
  Expected(Error err) : v_(std::move(err)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() { return std::get<T>(v_); }
  const T& value() const { return std::get<T>(v_); }
  const Error& error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(const Bytes& b) { return std::string(b.begin(), b.end()); }

}  // namespace fogdisc
