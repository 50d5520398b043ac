#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sdffr/topology.hpp"

namespace sdffr {

using FlowId = std::int64_t;

struct TrafficDemand {
  FlowId flow_id = 0;
  NodeId src;
  NodeId dst;
  double rate_mbps = 0.0;

  bool operator==(const TrafficDemand&) const = default;
};

/// Simple node path, src first.
struct FlowPath {
  std::vector<NodeId> nodes;

  std::size_t hops() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  std::vector<LinkKey> edges() const;
  bool uses(const LinkKey& key) const;

  auto operator<=>(const FlowPath&) const = default;
  bool operator==(const FlowPath&) const = default;
};

std::string to_string(const FlowPath& path);

/// Throws InvalidArgument unless `path` is a simple path of existing links
/// (up or down) starting at `src` and ending at `dst`.
void check_path(const NetworkGraph& graph, const FlowPath& path,
                const NodeId& src, const NodeId& dst);

enum class RulePriority { Low, High };

const char* to_string(RulePriority p) noexcept;

struct FlowRule {
  FlowId flow_id = 0;
  NodeId node;
  std::optional<NodeId> next_hop;  // nullopt: deliver locally
  RulePriority priority = RulePriority::Low;

  bool operator==(const FlowRule&) const = default;
};

/// Forwarding state of every node, matched on flow id only.
class FlowTables {
 public:
  /// Throws DuplicateRule if (node, flow, priority) is already present.
  void add(const FlowRule& rule);
  /// Add-or-replace, like an OpenFlow ADD for an identical match.
  void modify(const FlowRule& rule);
  /// No-op when absent.
  void erase(const NodeId& node, FlowId flow, RulePriority priority);

  const FlowRule* find(const NodeId& node, FlowId flow,
                       RulePriority priority) const;
  /// Highest-priority rule for `flow` at `node`, or nullptr.
  const FlowRule* match(const NodeId& node, FlowId flow) const;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<FlowRule> rules_of(FlowId flow) const;

 private:
  using Key = std::pair<FlowId, RulePriority>;
  std::map<NodeId, std::map<Key, FlowRule>> tables_;
};

void install_rules(FlowTables& tables, const FlowPath& path, FlowId flow,
                   RulePriority priority);
void delete_rules(FlowTables& tables, FlowId flow, RulePriority priority);

/// Walks highest-priority rules from the flow's source. Returns nullopt
/// (blackhole) on a missing rule, a loop, or a down link.
std::optional<FlowPath> active_path(const FlowTables& tables,
                                    const NetworkGraph& graph,
                                    const TrafficDemand& flow);

/// One flow-mod message. Delete ignores rule.next_hop.
struct RuleOp {
  enum class Kind { Add, Modify, Delete };
  Kind kind = Kind::Add;
  FlowRule rule;
};

using RuleBatch = std::vector<RuleOp>;

RuleBatch path_rules(const FlowPath& path, FlowId flow, RulePriority priority,
                     RuleOp::Kind kind);
RuleBatch delete_ops(const std::vector<NodeId>& nodes, FlowId flow,
                     RulePriority priority);
void apply_batch(FlowTables& tables, const RuleBatch& batch);

/// Link -> set of flows. Serves as TL (flows routed across a link) and AL
/// (flows rerouted because of a failed link). Empty sets are dropped.
class FlowSetRegistry {
 public:
  void add(const LinkKey& key, FlowId flow);
  /// Throws RegistryMismatch if `flow` is not on `key`.
  void remove(const LinkKey& key, FlowId flow);
  /// Removes `flow` wherever it appears; returns how many links held it.
  std::size_t remove_everywhere(FlowId flow);

  void add_path(const FlowPath& path, FlowId flow);
  void remove_path(const FlowPath& path, FlowId flow);

  const std::set<FlowId>& flows_on(const LinkKey& key) const;
  std::size_t count(const LinkKey& key) const { return flows_on(key).size(); }
  bool contains(const LinkKey& key, FlowId flow) const;
  std::vector<LinkKey> links_of(FlowId flow) const;

  const std::map<LinkKey, std::set<FlowId>>& entries() const { return sets_; }
  bool empty() const { return sets_.empty(); }

 private:
  std::map<LinkKey, std::set<FlowId>> sets_;
};

using LinkFlowRegistry = FlowSetRegistry;
using AffectedFlowRegistry = FlowSetRegistry;

}  // namespace sdffr
