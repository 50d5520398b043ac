#pragma once

#include <optional>
#include <string>

#include "sdffr/error.hpp"
#include "sdffr/topology.hpp"

namespace sdffr::testing {

// Kind of the sdffr::Error thrown by fn, or nullopt if nothing was thrown.
template <class Fn>
std::optional<ErrorKind> error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const Error& err) {
    return err.kind();
  }
  return std::nullopt;
}

// Gateway plus five APs: wired uplinks and a full 5 GHz mesh, with the
// measured 100/71 Mbps and 0.37/0.66 ms link profiles.
inline NetworkGraph fig2_graph() {
  NetworkGraph g;
  g.add_node("GW");
  for (int i = 1; i <= 5; ++i) g.add_node("AP" + std::to_string(i));
  for (int i = 1; i <= 5; ++i) {
    g.add_link("AP" + std::to_string(i), "GW", LinkKind::Wired, 100.0, 0.37);
  }
  for (int i = 1; i <= 5; ++i) {
    for (int j = i + 1; j <= 5; ++j) {
      g.add_link("AP" + std::to_string(i), "AP" + std::to_string(j),
                 LinkKind::WirelessMesh, 71.0, 0.66);
    }
  }
  return g;
}

}  // namespace sdffr::testing
