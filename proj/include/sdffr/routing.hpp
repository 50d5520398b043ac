#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sdffr/flow_state.hpp"
#include "sdffr/telemetry.hpp"
#include "sdffr/topology.hpp"
#include "sdffr/weighting.hpp"

namespace sdffr {

/// Controller bookkeeping for one admitted flow.
struct FlowRecord {
  TrafficDemand demand;
  FlowPath low_path;
  std::optional<FlowPath> high_path;
  bool satisfied = false;
  bool blackholed = false;  // lost its route and no backup was found

  /// Path the controller believes carries the flow (High shadows Low).
  std::optional<FlowPath> routed_path() const;
};

/// Everything the controller knows: its view of the graph, weights, flows
/// and the TL/AL registries. The data plane (FlowTables) lives elsewhere.
struct ControlState {
  NetworkGraph graph;
  WeightParams params;
  LinkWeights weights;
  std::map<FlowId, FlowRecord> flows;
  LinkFlowRegistry tl;
  AffectedFlowRegistry al;

  /// Validates params and runs the Init branch of weight management.
  ControlState(NetworkGraph g, WeightParams p);

  const FlowRecord& flow(FlowId id) const;
  FlowRecord& flow(FlowId id);
  std::vector<RoutedFlow> routed_flows() const;
  /// Loads from routed flows, residuals refreshed.
  LoadSample current_loads() const;
};

/// Minimum-weight simple path over up links with finite weight. Ties go to
/// fewer hops, then to the lexicographically smaller node sequence.
/// Links missing from `weights` are treated as unusable.
std::optional<FlowPath> shortest_path(const NetworkGraph& graph,
                                      const WeightMap& weights,
                                      const NodeId& src, const NodeId& dst);

struct RoutingOutcome {
  FlowPath path;
  bool satisfied = false;  // min residual on path >= rate, before admission
};

struct Admission {
  RoutingOutcome outcome;
  RuleBatch rules;  // Low-priority installs along the path
};

/// Routes a joining flow on fresh load-aware weights and books it into TL.
/// Throws Unreachable (state untouched), UnknownNode or DuplicateFlow.
Admission admit_flow(ControlState& state, const TrafficDemand& demand);
RoutingOutcome admit_flow(ControlState& state, FlowTables& tables,
                          const TrafficDemand& demand);

/// Drops the flow from TL/AL and returns deletes for both priorities.
RuleBatch remove_flow(ControlState& state, FlowId flow);
void remove_flow(ControlState& state, FlowTables& tables, FlowId flow);

/// Measures loads, refreshes normal weights and runs Dijkstra for `demand`
/// against the current state without booking anything.
std::optional<RoutingOutcome> plan_normal_route(ControlState& state,
                                                const TrafficDemand& demand);

}  // namespace sdffr
