#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "fogdisc/common.hpp"

namespace fogdisc {

/// A network participant: receives datagrams addressed to it.
class SimNode {
 public:
  virtual ~SimNode() = default;
  virtual void on_datagram(const std::string& from, const Bytes& data) = 0;
};

struct LinkSpec {
  double latency_ms = 5.0;
  double drop_prob = 0.0;
};

/// Single-threaded virtual network: one event queue ordered by
/// (simulated time, insertion sequence), seeded drops, per-node timers.
/// Everything that happens is a deterministic function of (seed, call order).
class VirtualNet {
 public:
  explicit VirtualNet(std::uint64_t seed = 0) : rng_(seed) {}

  // -- topology --------------------------------------------------------------

  void add_node(const std::string& address, SimNode* node) { nodes_[address] = node; }

  // Unregister only if the slot still points at this node (a replacement may
  // have claimed the address after a kill).
  void remove_node(const std::string& address, SimNode* node) {
    auto it = nodes_.find(address);
    if (it != nodes_.end() && it->second == node) nodes_.erase(it);
  }

  void kill(const std::string& address) { nodes_.erase(address); }

  bool alive(const std::string& address) const { return nodes_.count(address) != 0; }

  void add_link(const std::string& a, const std::string& b, LinkSpec spec) {
    links_[ordered(a, b)] = spec;
  }

  void set_default_link(LinkSpec spec) { default_link_ = spec; }

  // -- clock and events --------------------------------------------------------

  double now() const { return clock_; }

  std::uint64_t schedule(double delay_ms, std::function<void()> fn) {
    return push(clock_ + delay_ms, Event{std::move(fn)});
  }

  // Timer bound to a node's life: silent if the node was killed meanwhile.
  std::uint64_t schedule_node(double delay_ms, const std::string& address,
                              std::function<void()> fn) {
    return schedule(delay_ms, [this, address, fn = std::move(fn)] {
      if (alive(address)) fn();
    });
  }

  void cancel(std::uint64_t id) { cancelled_.insert(id); }

  bool step() {
    while (!queue_.empty()) {
      auto it = queue_.begin();
      auto [key, ev] = *it;
      queue_.erase(it);
      if (cancelled_.erase(key.second)) continue;
      if (key.first > clock_) clock_ = key.first;
      ev.fn();
      return true;
    }
    return false;
  }

  void run() {
    while (step()) {
    }
  }

  void run_until(double t) {
    while (!queue_.empty() && queue_.begin()->first.first <= t) {
      if (!step()) break;
    }
    if (t > clock_) clock_ = t;
  }

  // -- datagrams ----------------------------------------------------------------

  void send(const std::string& from, const std::string& to, Bytes data) {
    if (!alive(from)) return;  // a departed node cannot transmit
    LinkSpec link;
    if (from == to) {
      link = {0.0, 0.0};
    } else {
      auto it = links_.find(ordered(from, to));
      if (it != links_.end()) {
        link = it->second;
      } else if (default_link_) {
        link = *default_link_;
      } else {
        raise(Errc::no_link, from + " -> " + to);
      }
    }
    ++sent_;
    if (link.drop_prob > 0 && uniform() < link.drop_prob) {
      ++dropped_;
      return;
    }
    push(clock_ + link.latency_ms, Event{[this, from, to, data = std::move(data)] {
           auto it = nodes_.find(to);
           if (it == nodes_.end()) {
             ++dropped_;
             return;
           }
           ++delivered_;
           it->second->on_datagram(from, data);
         }});
  }

  // -- accounting -----------------------------------------------------------------

  std::uint64_t messages_sent() const { return sent_; }
  std::uint64_t messages_delivered() const { return delivered_; }
  std::uint64_t messages_dropped() const { return dropped_; }
  std::uint64_t messages_in_flight() const { return sent_ - delivered_ - dropped_; }

  void bump(const std::string& tag) { ++tags_[tag]; }
  std::uint64_t tag(const std::string& t) const {
    auto it = tags_.find(t);
    return it == tags_.end() ? 0 : it->second;
  }
  const std::map<std::string, std::uint64_t>& tags() const { return tags_; }

 private:
  struct Event {
    std::function<void()> fn;
  };

  static std::pair<std::string, std::string> ordered(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }

  std::uint64_t push(double at, Event ev) {
    std::uint64_t id = ++seq_;
    queue_.emplace(std::make_pair(at, id), std::move(ev));
    return id;
  }

  // mt19937_64 output is fully specified, so this stays identical across
  // platforms (std::uniform_real_distribution would not).
  double uniform() { return (rng_() >> 11) * 0x1.0p-53; }

  std::map<std::pair<double, std::uint64_t>, Event> queue_;
  std::set<std::uint64_t> cancelled_;
  std::map<std::string, SimNode*> nodes_;
  std::map<std::pair<std::string, std::string>, LinkSpec> links_;
  std::optional<LinkSpec> default_link_;
  std::mt19937_64 rng_;
  double clock_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  std::map<std::string, std::uint64_t> tags_;
};

}  // namespace fogdisc
