#include "sdffr/topology.hpp"

#include "sdffr/error.hpp"

namespace sdffr {

const char* to_string(LinkKind kind) noexcept {
  return kind == LinkKind::Wired ? "wired" : "mesh";
}

LinkKind parse_link_kind(const std::string& text) {
  if (text == "wired") return LinkKind::Wired;
  if (text == "mesh") return LinkKind::WirelessMesh;
  throw Error(ErrorKind::InvalidArgument,
              "link kind must be \"wired\" or \"mesh\", got \"" + text + "\"");
}

LinkKey::LinkKey(NodeId u, NodeId v) {
  if (v < u) std::swap(u, v);
  lo = std::move(u);
  hi = std::move(v);
}

std::string to_string(const LinkKey& key) {
  return key.lo.value + "-" + key.hi.value;
}

void NetworkGraph::add_node(const NodeId& n) {
  if (n.value.empty()) {
    throw Error(ErrorKind::InvalidArgument, "node id must be nonempty");
  }
  if (!nodes_.insert(n).second) {
    throw Error(ErrorKind::DuplicateNode, "duplicate node " + n.value);
  }
  adjacency_[n];
}

void NetworkGraph::add_link(const NodeId& u, const NodeId& v, LinkKind kind,
                            double capacity_mbps, double prop_delay_ms) {
  if (u == v) {
    throw Error(ErrorKind::SelfLoop, "self-loop on " + u.value);
  }
  for (const auto& n : {u, v}) {
    if (!has_node(n)) {
      throw Error(ErrorKind::UnknownNode, "unknown endpoint " + n.value);
    }
  }
  if (!(capacity_mbps > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "link " + to_string(LinkKey(u, v)) + " needs capacity > 0");
  }
  if (prop_delay_ms < 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                "link " + to_string(LinkKey(u, v)) + " has negative delay");
  }
  LinkKey key(u, v);
  if (links_.contains(key)) {
    throw Error(ErrorKind::DuplicateLink, "duplicate link " + to_string(key));
  }
  links_.emplace(key, Link{key, kind, capacity_mbps, prop_delay_ms, true});
  adjacency_[u].insert(v);
  adjacency_[v].insert(u);
}

void NetworkGraph::set_link_state(const NodeId& u, const NodeId& v, bool up) {
  mutable_link(u, v).up = up;
}

double NetworkGraph::effective_capacity(const NodeId& u, const NodeId& v) const {
  return link(u, v).effective_capacity();
}

bool NetworkGraph::has_link(const NodeId& u, const NodeId& v) const {
  return u != v && links_.contains(LinkKey(u, v));
}

const Link& NetworkGraph::link(const NodeId& u, const NodeId& v) const {
  return link(LinkKey(u, v));
}

const Link& NetworkGraph::link(const LinkKey& key) const {
  auto it = links_.find(key);
  if (it == links_.end()) {
    throw Error(ErrorKind::UnknownLink, "unknown link " + to_string(key));
  }
  return it->second;
}

const std::set<NodeId>& NetworkGraph::neighbors(const NodeId& n) const {
  auto it = adjacency_.find(n);
  if (it == adjacency_.end()) {
    throw Error(ErrorKind::UnknownNode, "unknown node " + n.value);
  }
  return it->second;
}

Link& NetworkGraph::mutable_link(const NodeId& u, const NodeId& v) {
  auto it = links_.find(LinkKey(u, v));
  if (it == links_.end()) {
    throw Error(ErrorKind::UnknownLink,
                "unknown link " + to_string(LinkKey(u, v)));
  }
  return it->second;
}

}  // namespace sdffr
