#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fogdisc/common.hpp"

namespace fogdisc {

enum class CoapType : uint8_t { con = 0, non = 1, ack = 2, rst = 3 };

struct CoapCode {
  uint8_t cls = 0;     // 3 bits
  uint8_t detail = 0;  // 5 bits

  auto operator<=>(const CoapCode&) const = default;

  uint8_t byte() const { return static_cast<uint8_t>((cls << 5) | (detail & 0x1f)); }
  static CoapCode from_byte(uint8_t b) { return {static_cast<uint8_t>(b >> 5), static_cast<uint8_t>(b & 0x1f)}; }

  std::string render() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%u.%02u", cls, detail);
    return buf;
  }

  bool is_request() const { return cls == 0 && detail != 0; }
  bool is_success() const { return cls == 2; }
};

namespace code {
inline constexpr CoapCode empty{0, 0};
inline constexpr CoapCode get{0, 1};
inline constexpr CoapCode post{0, 2};
inline constexpr CoapCode put{0, 3};
inline constexpr CoapCode del{0, 4};
inline constexpr CoapCode created{2, 1};
inline constexpr CoapCode deleted{2, 2};
inline constexpr CoapCode changed{2, 4};
inline constexpr CoapCode content{2, 5};
inline constexpr CoapCode bad_request{4, 0};
inline constexpr CoapCode not_found{4, 4};
inline constexpr CoapCode internal_error{5, 0};
inline constexpr CoapCode service_unavailable{5, 3};
}  // namespace code

namespace option {
inline constexpr uint32_t location_path = 8;
inline constexpr uint32_t uri_path = 11;
inline constexpr uint32_t content_format = 12;
inline constexpr uint32_t uri_query = 15;
}  // namespace option

inline constexpr uint32_t kContentFormatLink = 40;
inline constexpr uint32_t kContentFormatJsonLdDefault = 50;

// Elective option carrying the overlay hop count on forwarded discovery
// responses. Even number in the experimental range: safe for peers to ignore.
inline constexpr uint32_t kOptionHops = 64990;

// Every client starts its counters here, so two transports issuing the same
// sequence of requests produce identical wire bytes.
inline constexpr uint16_t kInitialMessageId = 0x1000;
inline constexpr uint64_t kInitialToken = 1;

inline Bytes encode_token(uint64_t n) {
  Bytes t;
  do {
    t.insert(t.begin(), static_cast<uint8_t>(n & 0xff));
    n >>= 8;
  } while (n != 0);
  return t;
}

inline uint64_t bytes_to_uint(const Bytes& b) {
  uint64_t v = 0;
  for (uint8_t x : b) v = (v << 8) | x;
  return v;
}

struct CoapOption {
  uint32_t number = 0;
  Bytes value;

  auto operator<=>(const CoapOption&) const = default;
};

struct CoapMessage {
  CoapType type = CoapType::con;
  Bytes token;
  CoapCode code;
  uint16_t message_id = 0;
  std::vector<CoapOption> options;  // sorted by number ascending
  Bytes payload;

  auto operator<=>(const CoapMessage&) const = default;

  void add_option(uint32_t number, Bytes value) {
    options.push_back({number, std::move(value)});
  }
  void add_option(uint32_t number, const std::string& value) {
    options.push_back({number, to_bytes(value)});
  }

  std::vector<std::string> option_values(uint32_t number) const {
    std::vector<std::string> out;
    for (const auto& o : options)
      if (o.number == number) out.push_back(to_string(o.value));
    return out;
  }

  // Uri-Path segments joined as "/a/b"; "/" when absent.
  std::string path() const {
    std::string p;
    for (const auto& seg : option_values(option::uri_path)) p += "/" + seg;
    return p.empty() ? "/" : p;
  }

  std::vector<std::string> queries() const { return option_values(option::uri_query); }

  std::optional<uint64_t> option_uint(uint32_t number) const {
    for (const auto& o : options)
      if (o.number == number) return bytes_to_uint(o.value);
    return std::nullopt;
  }

  std::optional<uint32_t> content_format() const {
    if (auto v = option_uint(option::content_format)) return static_cast<uint32_t>(*v);
    return std::nullopt;
  }
};

namespace detail {

inline Bytes uint_to_bytes(uint32_t v) {
  Bytes out;
  while (v != 0) {
    out.insert(out.begin(), static_cast<uint8_t>(v & 0xff));
    v >>= 8;
  }
  return out;
}

// 4-bit nibble plus extension bytes, shared by option delta and length.
inline void encode_ext(uint32_t v, uint8_t& nibble, Bytes& ext) {
  if (v < 13) {
    nibble = static_cast<uint8_t>(v);
  } else if (v < 269) {
    nibble = 13;
    ext.push_back(static_cast<uint8_t>(v - 13));
  } else if (v < 269 + 65536) {
    nibble = 14;
    uint32_t e = v - 269;
    ext.push_back(static_cast<uint8_t>(e >> 8));
    ext.push_back(static_cast<uint8_t>(e & 0xff));
  } else {
    raise(Errc::malformed_option, "value too large: " + std::to_string(v));
  }
}

}  // namespace detail

inline Bytes encode_message(const CoapMessage& m) {
  if (m.token.size() > 8) raise(Errc::token_too_long, std::to_string(m.token.size()));
  Bytes out;
  out.push_back(static_cast<uint8_t>((1u << 6) | (static_cast<uint8_t>(m.type) << 4) |
                                     m.token.size()));
  out.push_back(m.code.byte());
  out.push_back(static_cast<uint8_t>(m.message_id >> 8));
  out.push_back(static_cast<uint8_t>(m.message_id & 0xff));
  out.insert(out.end(), m.token.begin(), m.token.end());

  uint32_t previous = 0;
  for (const auto& opt : m.options) {
    if (opt.number < previous)
      raise(Errc::option_out_of_order, std::to_string(opt.number));
    uint8_t dn = 0, ln = 0;
    Bytes dext, lext;
    detail::encode_ext(opt.number - previous, dn, dext);
    detail::encode_ext(static_cast<uint32_t>(opt.value.size()), ln, lext);
    out.push_back(static_cast<uint8_t>((dn << 4) | ln));
    out.insert(out.end(), dext.begin(), dext.end());
    out.insert(out.end(), lext.begin(), lext.end());
    out.insert(out.end(), opt.value.begin(), opt.value.end());
    previous = opt.number;
  }

  if (!m.payload.empty()) {
    out.push_back(0xff);
    out.insert(out.end(), m.payload.begin(), m.payload.end());
  }
  return out;
}

inline CoapMessage decode_message(const Bytes& bytes) {
  if (bytes.size() < 4) raise(Errc::truncated, "header");
  uint8_t b0 = bytes[0];
  if ((b0 >> 6) != 1) raise(Errc::bad_version, std::to_string(b0 >> 6));
  CoapMessage m;
  m.type = static_cast<CoapType>((b0 >> 4) & 0x3);
  uint8_t tkl = b0 & 0x0f;
  if (tkl > 8) raise(Errc::reserved_tkl, std::to_string(tkl));
  m.code = CoapCode::from_byte(bytes[1]);
  m.message_id = static_cast<uint16_t>((bytes[2] << 8) | bytes[3]);

  size_t pos = 4;
  if (pos + tkl > bytes.size()) raise(Errc::truncated, "token");
  m.token.assign(bytes.begin() + pos, bytes.begin() + pos + tkl);
  pos += tkl;

  auto read_ext = [&](uint8_t nibble) -> uint32_t {
    if (nibble < 13) return nibble;
    if (nibble == 13) {
      if (pos >= bytes.size()) raise(Errc::truncated, "option ext");
      return 13u + bytes[pos++];
    }
    // nibble == 14
    if (pos + 2 > bytes.size()) raise(Errc::truncated, "option ext");
    uint32_t v = 269u + ((bytes[pos] << 8) | bytes[pos + 1]);
    pos += 2;
    return v;
  };

  uint32_t number = 0;
  while (pos < bytes.size()) {
    uint8_t b = bytes[pos];
    if (b == 0xff) {
      ++pos;
      if (pos == bytes.size()) raise(Errc::payload_marker_without_payload, "");
      m.payload.assign(bytes.begin() + pos, bytes.end());
      pos = bytes.size();
      break;
    }
    ++pos;
    uint8_t dn = b >> 4;
    uint8_t ln = b & 0x0f;
    if (dn == 15 || ln == 15) raise(Errc::malformed_option, "reserved nibble");
    number += read_ext(dn);
    uint32_t len = read_ext(ln);
    if (pos + len > bytes.size()) raise(Errc::truncated, "option value");
    m.options.push_back({number, Bytes(bytes.begin() + pos, bytes.begin() + pos + len)});
    pos += len;
  }
  return m;
}

// Builders used across the stack; tokens and message ids are stamped by the
// messaging endpoint.
inline CoapMessage make_request(CoapCode method, const std::string& path,
                                const std::vector<std::string>& queries = {},
                                Bytes payload = {},
                                std::optional<uint32_t> content_format = std::nullopt) {
  CoapMessage m;
  m.type = CoapType::con;
  m.code = method;
  size_t start = 0;
  while (start < path.size()) {
    if (path[start] == '/') {
      ++start;
      continue;
    }
    size_t end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    m.add_option(option::uri_path, path.substr(start, end - start));
    start = end;
  }
  if (content_format)
    m.add_option(option::content_format, detail::uint_to_bytes(*content_format));
  for (const auto& q : queries) m.add_option(option::uri_query, q);
  // keep options sorted: uri_path(11) < content_format(12) < uri_query(15)
  m.payload = std::move(payload);
  return m;
}

inline CoapMessage make_response(const CoapMessage& request, CoapCode code,
                                 Bytes payload = {},
                                 std::optional<uint32_t> content_format = std::nullopt,
                                 const std::vector<std::string>& location_path = {}) {
  CoapMessage m;
  m.type = request.type == CoapType::con ? CoapType::ack : CoapType::non;
  m.code = code;
  m.message_id = request.message_id;  // piggy-backed; NON responses restamped by sender
  m.token = request.token;
  // keep options sorted: location_path(8) < content_format(12)
  for (const auto& seg : location_path) m.add_option(option::location_path, seg);
  if (content_format)
    m.add_option(option::content_format, detail::uint_to_bytes(*content_format));
  m.payload = std::move(payload);
  return m;
}

}  // namespace fogdisc
