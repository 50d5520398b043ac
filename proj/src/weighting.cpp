#include "sdffr/weighting.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sdffr/error.hpp"

namespace sdffr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

WeightParams WeightParams::from_q0(double q0, double alpha) {
  return WeightParams{q0, 1.0 - q0, alpha};
}

void WeightParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvalidParams, what);
  };
  if (!(q0 > 0.0 && 2.0 * q0 < 1.0)) {
    fail("q0 = " + std::to_string(q0) + " violates 0 < 2*q0 < 1");
  }
  if (std::abs(q0 + q1 - 1.0) > 1e-12) {
    fail("q0 + q1 = " + std::to_string(q0 + q1) + " violates q0 + q1 = 1");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    fail("alpha = " + std::to_string(alpha) + " violates alpha > 0");
  }
}

double normal_weight(const WeightParams& params, LinkKind kind,
                     double capacity_mbps, double residual_mbps) {
  if (!(capacity_mbps > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "normal weight needs capacity > 0; down links are +inf");
  }
  const double utilization = (capacity_mbps - residual_mbps) / capacity_mbps;
  return params.multiplier(kind) * std::exp(params.alpha * utilization);
}

double recovery_weight(std::size_t flow_count) {
  return std::exp(static_cast<double>(flow_count));
}

void refresh_weights(LinkWeights& weights, WeightMode mode,
                     const NetworkGraph& graph, const WeightParams& params,
                     const LoadSample* loads, const LinkFlowRegistry* tl) {
  if (mode == WeightMode::Normal && loads == nullptr) {
    throw Error(ErrorKind::InvalidArgument, "normal weights need a load sample");
  }
  if (mode == WeightMode::PostRecovery && tl == nullptr) {
    throw Error(ErrorKind::InvalidArgument,
                "post-recovery weights need the link flow registry");
  }
  WeightMap& target =
      mode == WeightMode::PostRecovery ? weights.recovery : weights.normal;
  for (const auto& [key, link] : graph.links()) {
    if (!link.up) {
      target[key] = kInf;
      continue;
    }
    switch (mode) {
      case WeightMode::Init:
        target[key] = params.multiplier(link.kind);
        break;
      case WeightMode::Normal: {
        auto it = loads->find(key);
        const double residual =
            it == loads->end() ? link.capacity_mbps : it->second.r_mbps;
        target[key] =
            normal_weight(params, link.kind, link.capacity_mbps, residual);
        break;
      }
      case WeightMode::PostRecovery:
        target[key] = recovery_weight(tl->count(key));
        break;
    }
  }
}

}  // namespace sdffr
