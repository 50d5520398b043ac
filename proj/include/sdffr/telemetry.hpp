#pragma once

#include <map>
#include <span>

#include "sdffr/flow_state.hpp"
#include "sdffr/topology.hpp"

namespace sdffr {

struct LinkLoad {
  double tr_mbps = 0.0;  // carried traffic
  double r_mbps = 0.0;   // residual, filled by refresh_residuals
};

/// One entry per graph link.
using LoadSample = std::map<LinkKey, LinkLoad>;

struct RoutedFlow {
  double rate_mbps = 0.0;
  FlowPath path;
};

LoadSample measure_loads(const NetworkGraph& graph,
                         std::span<const RoutedFlow> flows);

/// r = max(0, effective capacity - tr).
void refresh_residuals(const NetworkGraph& graph, LoadSample& sample);

}  // namespace sdffr
