#include "sdffr/telemetry.hpp"

#include <algorithm>

#include "sdffr/error.hpp"

namespace sdffr {

LoadSample measure_loads(const NetworkGraph& graph,
                         std::span<const RoutedFlow> flows) {
  LoadSample sample;
  for (const auto& [key, link] : graph.links()) sample[key];
  for (const auto& flow : flows) {
    for (const auto& key : flow.path.edges()) {
      auto it = sample.find(key);
      if (it == sample.end()) {
        throw Error(ErrorKind::UnknownLink,
                    "flow path crosses unknown link " + to_string(key));
      }
      it->second.tr_mbps += flow.rate_mbps;
    }
  }
  return sample;
}

void refresh_residuals(const NetworkGraph& graph, LoadSample& sample) {
  for (auto& [key, load] : sample) {
    load.r_mbps =
        std::max(0.0, graph.link(key).effective_capacity() - load.tr_mbps);
  }
}

}  // namespace sdffr
