#include "sdffr/flow_state.hpp"

#include <algorithm>

#include "sdffr/error.hpp"

namespace sdffr {

std::vector<LinkKey> FlowPath::edges() const {
  std::vector<LinkKey> out;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    out.emplace_back(nodes[i - 1], nodes[i]);
  }
  return out;
}

bool FlowPath::uses(const LinkKey& key) const {
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (LinkKey(nodes[i - 1], nodes[i]) == key) return true;
  }
  return false;
}

std::string to_string(const FlowPath& path) {
  std::string out;
  for (const auto& n : path.nodes) {
    if (!out.empty()) out += '-';
    out += n.value;
  }
  return out;
}

void check_path(const NetworkGraph& graph, const FlowPath& path,
                const NodeId& src, const NodeId& dst) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::InvalidArgument,
                "invalid path " + to_string(path) + ": " + why);
  };
  if (path.nodes.empty()) fail("empty");
  if (path.nodes.front() != src || path.nodes.back() != dst) {
    fail("does not join " + src.value + " to " + dst.value);
  }
  std::set<NodeId> seen;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    if (!seen.insert(path.nodes[i]).second) fail("repeats a node");
    if (i > 0 && !graph.has_link(path.nodes[i - 1], path.nodes[i])) {
      fail("no link " + to_string(LinkKey(path.nodes[i - 1], path.nodes[i])));
    }
  }
}

const char* to_string(RulePriority p) noexcept {
  return p == RulePriority::High ? "High" : "Low";
}

void FlowTables::add(const FlowRule& rule) {
  auto& table = tables_[rule.node];
  if (!table.emplace(Key{rule.flow_id, rule.priority}, rule).second) {
    throw Error(ErrorKind::DuplicateRule,
                "rule already present at " + rule.node.value + " for flow " +
                    std::to_string(rule.flow_id) + " priority " +
                    to_string(rule.priority));
  }
}

void FlowTables::modify(const FlowRule& rule) {
  tables_[rule.node][Key{rule.flow_id, rule.priority}] = rule;
}

void FlowTables::erase(const NodeId& node, FlowId flow,
                       RulePriority priority) {
  auto it = tables_.find(node);
  if (it == tables_.end()) return;
  it->second.erase(Key{flow, priority});
  if (it->second.empty()) tables_.erase(it);
}

const FlowRule* FlowTables::find(const NodeId& node, FlowId flow,
                                 RulePriority priority) const {
  auto it = tables_.find(node);
  if (it == tables_.end()) return nullptr;
  auto rule = it->second.find(Key{flow, priority});
  return rule == it->second.end() ? nullptr : &rule->second;
}

const FlowRule* FlowTables::match(const NodeId& node, FlowId flow) const {
  if (const auto* high = find(node, flow, RulePriority::High)) return high;
  return find(node, flow, RulePriority::Low);
}

std::size_t FlowTables::size() const {
  std::size_t n = 0;
  for (const auto& [node, table] : tables_) n += table.size();
  return n;
}

std::vector<FlowRule> FlowTables::rules_of(FlowId flow) const {
  std::vector<FlowRule> out;
  for (const auto& [node, table] : tables_) {
    for (const auto& [key, rule] : table) {
      if (key.first == flow) out.push_back(rule);
    }
  }
  return out;
}

RuleBatch path_rules(const FlowPath& path, FlowId flow, RulePriority priority,
                     RuleOp::Kind kind) {
  RuleBatch batch;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    FlowRule rule{flow, path.nodes[i], std::nullopt, priority};
    if (i + 1 < path.nodes.size()) rule.next_hop = path.nodes[i + 1];
    batch.push_back(RuleOp{kind, std::move(rule)});
  }
  return batch;
}

RuleBatch delete_ops(const std::vector<NodeId>& nodes, FlowId flow,
                     RulePriority priority) {
  RuleBatch batch;
  for (const auto& n : nodes) {
    batch.push_back(
        RuleOp{RuleOp::Kind::Delete, FlowRule{flow, n, std::nullopt, priority}});
  }
  return batch;
}

void apply_batch(FlowTables& tables, const RuleBatch& batch) {
  for (const auto& op : batch) {
    switch (op.kind) {
      case RuleOp::Kind::Add: tables.add(op.rule); break;
      case RuleOp::Kind::Modify: tables.modify(op.rule); break;
      case RuleOp::Kind::Delete:
        tables.erase(op.rule.node, op.rule.flow_id, op.rule.priority);
        break;
    }
  }
}

void install_rules(FlowTables& tables, const FlowPath& path, FlowId flow,
                   RulePriority priority) {
  // Validate the whole batch first so a duplicate leaves tables untouched.
  for (const auto& n : path.nodes) {
    if (tables.find(n, flow, priority)) {
      throw Error(ErrorKind::DuplicateRule,
                  "rule already present at " + n.value + " for flow " +
                      std::to_string(flow) + " priority " +
                      to_string(priority));
    }
  }
  apply_batch(tables, path_rules(path, flow, priority, RuleOp::Kind::Add));
}

void delete_rules(FlowTables& tables, FlowId flow, RulePriority priority) {
  for (const auto& rule : tables.rules_of(flow)) {
    if (rule.priority == priority) tables.erase(rule.node, flow, priority);
  }
}

std::optional<FlowPath> active_path(const FlowTables& tables,
                                    const NetworkGraph& graph,
                                    const TrafficDemand& flow) {
  FlowPath path;
  NodeId at = flow.src;
  const std::size_t max_hops = graph.nodes().size();
  path.nodes.push_back(at);
  for (std::size_t hops = 0;; ++hops) {
    const FlowRule* rule = tables.match(at, flow.flow_id);
    if (rule == nullptr) return std::nullopt;
    if (!rule->next_hop) {
      if (at != flow.dst) return std::nullopt;
      return path;
    }
    if (hops >= max_hops) return std::nullopt;
    const NodeId& next = *rule->next_hop;
    if (!graph.has_link(at, next) || !graph.link(at, next).up) {
      return std::nullopt;
    }
    if (std::find(path.nodes.begin(), path.nodes.end(), next) !=
        path.nodes.end()) {
      return std::nullopt;
    }
    path.nodes.push_back(next);
    at = next;
  }
}

void FlowSetRegistry::add(const LinkKey& key, FlowId flow) {
  sets_[key].insert(flow);
}

void FlowSetRegistry::remove(const LinkKey& key, FlowId flow) {
  auto it = sets_.find(key);
  if (it == sets_.end() || it->second.erase(flow) == 0) {
    throw Error(ErrorKind::RegistryMismatch,
                "flow " + std::to_string(flow) + " not registered on " +
                    to_string(key));
  }
  if (it->second.empty()) sets_.erase(it);
}

std::size_t FlowSetRegistry::remove_everywhere(FlowId flow) {
  std::size_t removed = 0;
  for (auto it = sets_.begin(); it != sets_.end();) {
    removed += it->second.erase(flow);
    if (it->second.empty()) {
      it = sets_.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

void FlowSetRegistry::add_path(const FlowPath& path, FlowId flow) {
  for (const auto& key : path.edges()) add(key, flow);
}

void FlowSetRegistry::remove_path(const FlowPath& path, FlowId flow) {
  for (const auto& key : path.edges()) remove(key, flow);
}

const std::set<FlowId>& FlowSetRegistry::flows_on(const LinkKey& key) const {
  static const std::set<FlowId> kEmpty;
  auto it = sets_.find(key);
  return it == sets_.end() ? kEmpty : it->second;
}

bool FlowSetRegistry::contains(const LinkKey& key, FlowId flow) const {
  return flows_on(key).contains(flow);
}

std::vector<LinkKey> FlowSetRegistry::links_of(FlowId flow) const {
  std::vector<LinkKey> out;
  for (const auto& [key, flows] : sets_) {
    if (flows.contains(flow)) out.push_back(key);
  }
  return out;
}

}  // namespace sdffr
