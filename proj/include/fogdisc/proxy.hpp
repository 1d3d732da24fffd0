#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "fogdisc/coap_endpoint.hpp"
#include "fogdisc/http_map.hpp"

namespace fogdisc {

/// HTTP side of a node: translates an HTTP request into a CoAP message, pushes
/// it through the same dispatch path native requests take, and maps the CoAP
/// response back. Counters start at the shared initial values, so a proxy and
/// a native client issuing the same request sequence produce identical
/// wire-level messages.
class HttpProxy {
 public:
  using Dispatch =
      std::function<void(const CoapMessage&, const std::string& from, const Responder&)>;
  // The internal CoAP response rides along for transport-parity checks.
  using Callback = std::function<void(const HttpResponse&, const CoapMessage&)>;

  HttpProxy(std::string client_address, Dispatch dispatch)
      : client_address_(std::move(client_address)), dispatch_(std::move(dispatch)) {}

  void handle(const HttpRequest& req, Callback cb) {
    CoapMessage m;
    try {
      m = map_http_to_coap(req.method, req.path, req.query, req.body);
    } catch (const Error&) {
      cb(HttpResponse{405, {}, {}}, CoapMessage{});
      return;
    }
    m.type = CoapType::con;
    m.message_id = next_mid_++;
    m.token = encode_token(next_token_++);
    auto done = std::make_shared<Callback>(std::move(cb));
    Responder respond(m, client_address_, [done](const CoapMessage& resp) {
      (*done)(map_coap_to_http(resp), resp);
    });
    dispatch_(m, client_address_, respond);
  }

 private:
  std::string client_address_;
  Dispatch dispatch_;
  uint16_t next_mid_ = kInitialMessageId;
  uint64_t next_token_ = kInitialToken;
};

}  // namespace fogdisc
