#pragma once

#include <string>

#include "fogdisc/coap.hpp"

namespace fogdisc {

struct HttpRequest {
  std::string method;
  std::string path;
  std::string query;  // raw query string, no leading '?'
  Bytes body;
};

struct HttpResponse {
  int status = 0;
  Bytes body;
  std::string location;  // from Location-Path, empty when absent
};

inline CoapMessage map_http_to_coap(const std::string& method, const std::string& path,
                                    const std::string& query, const Bytes& body,
                                    uint32_t body_content_format = kContentFormatJsonLdDefault) {
  CoapCode code;
  if (method == "GET") code = code::get;
  else if (method == "POST") code = code::post;
  else if (method == "PUT") code = code::put;
  else if (method == "DELETE") code = code::del;
  else raise(Errc::unsupported_method, method);

  std::vector<std::string> queries;
  size_t start = 0;
  while (start < query.size()) {
    size_t end = query.find('&', start);
    if (end == std::string::npos) end = query.size();
    if (end > start) queries.push_back(query.substr(start, end - start));
    start = end + 1;
  }
  auto m = make_request(code, path, queries, body,
                        body.empty() ? std::nullopt : std::optional<uint32_t>(body_content_format));
  return m;
}

// Fixed response-code table; anything outside it maps to 502.
inline int map_coap_status(CoapCode code) {
  if (code == code::content) return 200;
  if (code == code::created) return 201;
  if (code == code::deleted) return 202;
  if (code == code::changed) return 204;
  if (code == code::bad_request) return 400;
  if (code == code::not_found) return 404;
  if (code == code::internal_error) return 500;
  return 502;
}

inline HttpResponse map_coap_to_http(const CoapMessage& resp) {
  HttpResponse out;
  out.status = map_coap_status(resp.code);
  out.body = resp.payload;
  for (const auto& seg : resp.option_values(option::location_path))
    out.location += "/" + seg;
  return out;
}

}  // namespace fogdisc
