#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sdffr {

/// Identifier of an OpenFlow device (an AP or the gateway).
/// Ordered lexicographically; routing uses that order to break ties.
struct NodeId {
  std::string value;

  NodeId() = default;
  NodeId(std::string v) : value(std::move(v)) {}
  NodeId(const char* v) : value(v) {}

  auto operator<=>(const NodeId&) const = default;
  bool operator==(const NodeId&) const = default;
};

inline const std::string& to_string(const NodeId& n) { return n.value; }

enum class LinkKind {
  Wired,         // b = 0
  WirelessMesh,  // b = 1
};

const char* to_string(LinkKind kind) noexcept;
LinkKind parse_link_kind(const std::string& text);

/// Unordered endpoint pair, stored with lo < hi.
struct LinkKey {
  NodeId lo;
  NodeId hi;

  LinkKey() = default;
  LinkKey(NodeId u, NodeId v);

  bool touches(const NodeId& n) const { return lo == n || hi == n; }
  const NodeId& other(const NodeId& n) const { return n == lo ? hi : lo; }

  auto operator<=>(const LinkKey&) const = default;
  bool operator==(const LinkKey&) const = default;
};

std::string to_string(const LinkKey& key);

struct Link {
  LinkKey key;
  LinkKind kind = LinkKind::Wired;
  double capacity_mbps = 0.0;
  double prop_delay_ms = 0.0;
  bool up = true;

  double effective_capacity() const { return up ? capacity_mbps : 0.0; }
};

class NetworkGraph {
 public:
  void add_node(const NodeId& n);
  void add_link(const NodeId& u, const NodeId& v, LinkKind kind,
                double capacity_mbps, double prop_delay_ms);
  void set_link_state(const NodeId& u, const NodeId& v, bool up);

  double effective_capacity(const NodeId& u, const NodeId& v) const;

  bool has_node(const NodeId& n) const { return nodes_.contains(n); }
  bool has_link(const NodeId& u, const NodeId& v) const;

  const Link& link(const NodeId& u, const NodeId& v) const;
  const Link& link(const LinkKey& key) const;

  const std::set<NodeId>& nodes() const { return nodes_; }
  const std::map<LinkKey, Link>& links() const { return links_; }

  /// Neighbours over any link, up or down, in NodeId order.
  const std::set<NodeId>& neighbors(const NodeId& n) const;

 private:
  Link& mutable_link(const NodeId& u, const NodeId& v);

  std::set<NodeId> nodes_;
  std::map<LinkKey, Link> links_;
  std::map<NodeId, std::set<NodeId>> adjacency_;
};

}  // namespace sdffr
