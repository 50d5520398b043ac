#include "sdffr/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "sdffr/error.hpp"

namespace sdffr {

std::optional<FlowPath> FlowRecord::routed_path() const {
  if (blackholed) return std::nullopt;
  if (high_path) return high_path;
  return low_path;
}

ControlState::ControlState(NetworkGraph g, WeightParams p)
    : graph(std::move(g)), params(p) {
  params.validate();
  refresh_weights(weights, WeightMode::Init, graph, params, nullptr, nullptr);
}

const FlowRecord& ControlState::flow(FlowId id) const {
  auto it = flows.find(id);
  if (it == flows.end()) {
    throw Error(ErrorKind::UnknownFlow, "unknown flow " + std::to_string(id));
  }
  return it->second;
}

FlowRecord& ControlState::flow(FlowId id) {
  return const_cast<FlowRecord&>(std::as_const(*this).flow(id));
}

std::vector<RoutedFlow> ControlState::routed_flows() const {
  std::vector<RoutedFlow> out;
  for (const auto& [id, record] : flows) {
    if (auto path = record.routed_path()) {
      out.push_back(RoutedFlow{record.demand.rate_mbps, std::move(*path)});
    }
  }
  return out;
}

LoadSample ControlState::current_loads() const {
  const auto routed = routed_flows();
  LoadSample sample = measure_loads(graph, routed);
  refresh_residuals(graph, sample);
  return sample;
}

namespace {

struct Label {
  double cost = 0.0;
  std::size_t hops = 0;
  std::vector<NodeId> nodes;

  bool operator<(const Label& other) const {
    return std::tie(cost, hops, nodes) <
           std::tie(other.cost, other.hops, other.nodes);
  }
};

void require_node(const NetworkGraph& graph, const NodeId& n) {
  if (!graph.has_node(n)) {
    throw Error(ErrorKind::UnknownNode, "unknown node " + n.value);
  }
}

}  // namespace

std::optional<FlowPath> shortest_path(const NetworkGraph& graph,
                                      const WeightMap& weights,
                                      const NodeId& src, const NodeId& dst) {
  require_node(graph, src);
  require_node(graph, dst);

  // Labels carry their full node sequence so the (cost, hops, sequence)
  // order is total. The order is preserved under path extension, which
  // keeps label-setting exact for positive weights.
  std::set<Label> frontier;
  std::map<NodeId, Label> best;
  std::set<NodeId> settled;

  Label start{0.0, 0, {src}};
  best[src] = start;
  frontier.insert(std::move(start));

  while (!frontier.empty()) {
    Label label = std::move(frontier.extract(frontier.begin()).value());
    const NodeId at = label.nodes.back();
    if (!settled.insert(at).second) continue;
    if (at == dst) return FlowPath{std::move(label.nodes)};

    for (const auto& next : graph.neighbors(at)) {
      if (settled.contains(next)) continue;
      const Link& link = graph.link(at, next);
      if (!link.up) continue;
      auto w = weights.find(link.key);
      if (w == weights.end() || !std::isfinite(w->second)) continue;

      Label candidate{label.cost + w->second, label.hops + 1, label.nodes};
      candidate.nodes.push_back(next);
      auto it = best.find(next);
      if (it != best.end() && !(candidate < it->second)) continue;
      if (it != best.end()) frontier.erase(it->second);
      best[next] = candidate;
      frontier.insert(std::move(candidate));
    }
  }
  return std::nullopt;
}

std::optional<RoutingOutcome> plan_normal_route(ControlState& state,
                                                const TrafficDemand& demand) {
  require_node(state.graph, demand.src);
  require_node(state.graph, demand.dst);

  const LoadSample loads = state.current_loads();
  refresh_weights(state.weights, WeightMode::Normal, state.graph, state.params,
                  &loads, nullptr);
  auto path = shortest_path(state.graph, state.weights.normal, demand.src,
                            demand.dst);
  if (!path) return std::nullopt;

  double min_residual = std::numeric_limits<double>::infinity();
  for (const auto& key : path->edges()) {
    min_residual = std::min(min_residual, loads.at(key).r_mbps);
  }
  return RoutingOutcome{std::move(*path), min_residual >= demand.rate_mbps};
}

Admission admit_flow(ControlState& state, const TrafficDemand& demand) {
  if (state.flows.contains(demand.flow_id)) {
    throw Error(ErrorKind::DuplicateFlow,
                "flow " + std::to_string(demand.flow_id) + " already admitted");
  }
  if (demand.src == demand.dst) {
    throw Error(ErrorKind::InvalidArgument,
                "flow " + std::to_string(demand.flow_id) + " has src == dst");
  }
  if (!(demand.rate_mbps > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "flow " + std::to_string(demand.flow_id) + " needs rate > 0");
  }
  auto outcome = plan_normal_route(state, demand);
  if (!outcome) {
    throw Error(ErrorKind::Unreachable, "no up path from " + demand.src.value +
                                            " to " + demand.dst.value);
  }

  FlowRecord record;
  record.demand = demand;
  record.low_path = outcome->path;
  record.satisfied = outcome->satisfied;
  state.flows.emplace(demand.flow_id, std::move(record));
  state.tl.add_path(outcome->path, demand.flow_id);

  Admission admission;
  admission.rules = path_rules(outcome->path, demand.flow_id,
                               RulePriority::Low, RuleOp::Kind::Add);
  admission.outcome = std::move(*outcome);
  return admission;
}

RoutingOutcome admit_flow(ControlState& state, FlowTables& tables,
                          const TrafficDemand& demand) {
  Admission admission = admit_flow(state, demand);
  apply_batch(tables, admission.rules);
  return std::move(admission.outcome);
}

RuleBatch remove_flow(ControlState& state, FlowId flow) {
  state.flow(flow);  // throws UnknownFlow
  state.tl.remove_everywhere(flow);
  state.al.remove_everywhere(flow);
  state.flows.erase(flow);

  const std::vector<NodeId> all(state.graph.nodes().begin(),
                                state.graph.nodes().end());
  RuleBatch batch = delete_ops(all, flow, RulePriority::High);
  RuleBatch low = delete_ops(all, flow, RulePriority::Low);
  batch.insert(batch.end(), low.begin(), low.end());
  return batch;
}

void remove_flow(ControlState& state, FlowTables& tables, FlowId flow) {
  apply_batch(tables, remove_flow(state, flow));
}

}  // namespace sdffr
