#pragma once

#include <cstddef>
#include <map>

#include "sdffr/flow_state.hpp"
#include "sdffr/telemetry.hpp"
#include "sdffr/topology.hpp"

namespace sdffr {

/// Multipliers of the exponential link cost. Valid when 0 < 2*q0 < 1,
/// q0 + q1 = 1 and alpha > 0.
struct WeightParams {
  double q0 = 0.1;
  double q1 = 0.9;
  double alpha = 10.0;

  static WeightParams from_q0(double q0, double alpha);

  /// Throws InvalidParams naming the violated constraint.
  void validate() const;
  double multiplier(LinkKind kind) const {
    return kind == LinkKind::Wired ? q0 : q1;
  }

  bool operator==(const WeightParams&) const = default;
};

/// Q_b * exp(alpha * (C - R) / C). Throws InvalidArgument for C <= 0.
double normal_weight(const WeightParams& params, LinkKind kind,
                     double capacity_mbps, double residual_mbps);

/// exp(flow_count).
double recovery_weight(std::size_t flow_count);

using WeightMap = std::map<LinkKey, double>;

struct LinkWeights {
  WeightMap normal;    // W
  WeightMap recovery;  // W'
};

enum class WeightMode { Init, Normal, PostRecovery };

/// Link weight management. Down links always get +inf in the refreshed map.
///   Init          W  := Q_b
///   Normal        W  := Q_b * exp(alpha * utilization) from `loads` (residuals must be fresh)
///   PostRecovery  W' := exp(|TL|) from `tl`
void refresh_weights(LinkWeights& weights, WeightMode mode,
                     const NetworkGraph& graph, const WeightParams& params,
                     const LoadSample* loads, const LinkFlowRegistry* tl);

}  // namespace sdffr
