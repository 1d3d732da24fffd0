#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "fogdisc/coap.hpp"
#include "fogdisc/simnet.hpp"

namespace fogdisc {

struct RetransmitPolicy {
  double base_timeout_ms = 2000.0;
  unsigned max_retransmit = 4;  // original + 4 retries, doubling timeout
};

/// Hands a request handler the means to answer later (handlers may complete
/// asynchronously after overlay round-trips). Piggy-backed ACK, token and
/// message id copied from the request.
class Responder {
 public:
  using SendFn = std::function<void(const CoapMessage&)>;

  Responder(CoapMessage request, std::string peer, SendFn send)
      : request_(std::move(request)), peer_(std::move(peer)), send_(std::move(send)) {}

  void operator()(CoapCode status, Bytes payload = {}, int content_format = -1,
                  const std::vector<std::string>& location_path = {}) const {
    std::optional<uint32_t> cf;
    if (content_format >= 0) cf = static_cast<uint32_t>(content_format);
    send_(make_response(request_, status, std::move(payload), cf, location_path));
  }

  // For responses needing options beyond what make_response covers; the caller
  // must have built the message from request() so ids still correlate.
  void send(const CoapMessage& response) const { send_(response); }

  const CoapMessage& request() const { return request_; }
  const std::string& peer() const { return peer_; }

 private:
  CoapMessage request_;
  std::string peer_;
  SendFn send_;
};

/// One node's CoAP message layer: assigns ids/tokens, matches responses to
/// pending requests by token, retransmits confirmable requests with doubling
/// timeouts, and replays cached responses for duplicate requests.
class CoapEndpoint : public SimNode {
 public:
  using RequestHandler =
      std::function<void(const CoapMessage&, const std::string& from, const Responder&)>;
  using ResponseCallback = std::function<void(Expected<CoapMessage>)>;

  CoapEndpoint(VirtualNet* net, std::string address, RetransmitPolicy policy = {})
      : net_(net), address_(std::move(address)), policy_(policy) {
    net_->add_node(address_, this);
  }

  ~CoapEndpoint() override { net_->remove_node(address_, this); }

  CoapEndpoint(const CoapEndpoint&) = delete;
  CoapEndpoint& operator=(const CoapEndpoint&) = delete;

  const std::string& address() const { return address_; }
  VirtualNet& net() { return *net_; }

  void set_request_handler(RequestHandler h) { handler_ = std::move(h); }

  // Fire a confirmable request; the callback gets the response or a
  // RequestTimeout error once retransmissions are exhausted.
  void request(const std::string& to, CoapMessage msg, ResponseCallback cb) {
    msg.type = CoapType::con;
    msg.message_id = next_mid_++;
    msg.token = encode_token(next_token_++);
    std::uint64_t key = token_key(msg.token);
    Bytes wire = encode_message(msg);
    pending_[key] = Pending{std::move(cb), to, wire, 0, 0};
    net_->bump("coap_request");
    transmit(key);
  }

  void on_datagram(const std::string& from, const Bytes& data) override {
    CoapMessage msg;
    try {
      msg = decode_message(data);
    } catch (const Error&) {
      net_->bump("malformed_datagram");
      return;
    }
    if (msg.code.is_request()) {
      handle_request(from, msg);
    } else {
      handle_response(msg);
    }
  }

 private:
  struct Pending {
    ResponseCallback cb;
    std::string to;
    Bytes wire;
    unsigned attempts = 0;
    std::uint64_t timer = 0;
  };

  static std::uint64_t token_key(const Bytes& t) { return bytes_to_uint(t); }

  void transmit(std::uint64_t key) {
    auto it = pending_.find(key);
    if (it == pending_.end()) return;
    Pending& p = it->second;
    if (p.attempts > policy_.max_retransmit) {
      auto cb = std::move(p.cb);
      pending_.erase(it);
      cb(Expected<CoapMessage>(Error(Errc::request_timeout, "retransmissions exhausted")));
      return;
    }
    if (p.attempts > 0) net_->bump("coap_retransmit");
    double timeout = policy_.base_timeout_ms * static_cast<double>(1u << p.attempts);
    ++p.attempts;
    net_->send(address_, p.to, p.wire);
    p.timer = net_->schedule_node(timeout, address_, [this, key] { transmit(key); });
  }

  void handle_request(const std::string& from, const CoapMessage& msg) {
    auto dup = dedup_.find({from, msg.message_id});
    if (dup != dedup_.end()) {
      net_->bump("coap_duplicate");
      net_->send(address_, from, dup->second);
      return;
    }
    if (!handler_) return;
    Responder respond(msg, from,
                      [this, from, mid = msg.message_id](const CoapMessage& resp) {
                        Bytes wire = encode_message(resp);
                        remember(from, mid, wire);
                        net_->bump("coap_response");
                        net_->send(address_, from, wire);
                      });
    handler_(msg, from, respond);
  }

  void handle_response(const CoapMessage& msg) {
    auto it = pending_.find(token_key(msg.token));
    if (it == pending_.end()) {
      net_->bump("coap_stale_response");
      return;
    }
    Pending p = std::move(it->second);
    pending_.erase(it);
    net_->cancel(p.timer);
    p.cb(Expected<CoapMessage>(msg));
  }

  void remember(const std::string& peer, std::uint16_t mid, Bytes wire) {
    dedup_[{peer, mid}] = std::move(wire);
    dedup_order_.push_back({peer, mid});
    while (dedup_order_.size() > 256) {
      dedup_.erase(dedup_order_.front());
      dedup_order_.pop_front();
    }
  }

  VirtualNet* net_;
  std::string address_;
  RetransmitPolicy policy_;
  RequestHandler handler_;
  std::uint16_t next_mid_ = kInitialMessageId;
  std::uint64_t next_token_ = kInitialToken;
  std::map<std::uint64_t, Pending> pending_;
  std::map<std::pair<std::string, std::uint16_t>, Bytes> dedup_;
  std::deque<std::pair<std::string, std::uint16_t>> dedup_order_;
};

}  // namespace fogdisc
