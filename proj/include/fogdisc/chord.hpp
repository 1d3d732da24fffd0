#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fogdisc/common.hpp"

namespace fogdisc {

using NodeId = std::uint64_t;

inline std::uint64_t ring_size(unsigned m) { return std::uint64_t{1} << m; }

// First m bits of SHA-256 over the UTF-8 bytes.
inline NodeId hash_key(const std::string& text, unsigned m) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | digest[i];
  return m >= 64 ? v : v >> (64 - m);
}

// x ∈ (a, b] on the ring; a == b spans the full circle.
inline bool in_interval_oc(NodeId a, NodeId b, NodeId x) {
  if (a == b) return true;
  if (a < b) return a < x && x <= b;
  return x > a || x <= b;
}

// x ∈ (a, b) on the ring; a == b means everything except a.
inline bool in_interval_oo(NodeId a, NodeId b, NodeId x) {
  if (a == b) return x != a;
  if (a < b) return a < x && x < b;
  return x > a || x < b;
}

inline NodeId finger_target(NodeId self, unsigned i, unsigned m) {
  return (self + (std::uint64_t{1} << i)) & (ring_size(m) - 1);
}

struct NodeRef {
  NodeId id = 0;
  std::string address;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend bool operator<(const NodeRef& a, const NodeRef& b) {
    return a.id != b.id ? a.id < b.id : a.address < b.address;
  }
};

class RoutingTable {
 public:
  RoutingTable() = default;
  RoutingTable(NodeRef self, unsigned m, unsigned r) : self_(self), m_(m), r_(r) {
    fingers_.assign(m, std::nullopt);
  }

  const NodeRef& self() const { return self_; }
  unsigned m() const { return m_; }

  NodeRef successor() const { return successors_.empty() ? self_ : successors_.front(); }
  const std::vector<NodeRef>& successors() const { return successors_; }
  const std::optional<NodeRef>& predecessor() const { return predecessor_; }
  const std::vector<std::optional<NodeRef>>& fingers() const { return fingers_; }

  void set_predecessor(std::optional<NodeRef> p) { predecessor_ = std::move(p); }

  void set_successor(const NodeRef& s) {
    drop_successor(s.address);
    successors_.insert(successors_.begin(), s);
    trim();
  }

  // Rebuild from the successor's own list (successor first).
  void adopt_successor_list(const NodeRef& succ, const std::vector<NodeRef>& their_list) {
    successors_.clear();
    successors_.push_back(succ);
    for (const auto& n : their_list) {
      if (n.address == self_.address || n.address == succ.address) continue;
      successors_.push_back(n);
    }
    trim();
  }

  void drop_successor(const std::string& address) {
    std::erase_if(successors_, [&](const NodeRef& n) { return n.address == address; });
  }

  void drop_peer(const std::string& address) {
    drop_successor(address);
    if (predecessor_ && predecessor_->address == address) predecessor_.reset();
    for (auto& f : fingers_)
      if (f && f->address == address) f.reset();
  }

  void set_finger(unsigned i, NodeRef n) { fingers_[i] = std::move(n); }

  // Highest known id strictly between self and key, avoiding the given
  // addresses; falls back to the successor (routing always advances).
  NodeRef closest_preceding(NodeId key, const std::set<std::string>& avoid = {}) const {
    std::optional<NodeRef> best;
    auto consider = [&](const NodeRef& n) {
      if (n.address == self_.address || avoid.count(n.address)) return;
      if (!in_interval_oo(self_.id, key, n.id)) return;
      if (!best || in_interval_oo(best->id, key, n.id)) best = n;
    };
    for (const auto& f : fingers_)
      if (f) consider(*f);
    for (const auto& s : successors_) consider(s);
    if (best) return *best;
    for (const auto& s : successors_)
      if (!avoid.count(s.address)) return s;
    return self_;
  }

  bool stable_pair(const NodeRef& other) const {
    return successor().address == other.address && predecessor_ &&
           predecessor_->address == other.address;
  }

 private:
  void trim() {
    if (successors_.size() > r_) successors_.resize(r_);
  }

  NodeRef self_;
  unsigned m_ = 16;
  unsigned r_ = 3;
  std::vector<NodeRef> successors_;
  std::optional<NodeRef> predecessor_;
  std::vector<std::optional<NodeRef>> fingers_;
};

}  // namespace fogdisc
