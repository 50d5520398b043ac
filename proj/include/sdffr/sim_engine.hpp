#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sdffr/flow_state.hpp"
#include "sdffr/recovery.hpp"
#include "sdffr/routing.hpp"
#include "sdffr/sim_time.hpp"
#include "sdffr/topology.hpp"
#include "sdffr/weighting.hpp"

namespace sdffr {

/// Control-loop latencies, in milliseconds. Recovery delay of a failure is
/// detection + hc + hs + rtt.
struct DelayModel {
  double detection_ms = 44.6;
  double hc_ms = 5.0;   // controller processing
  double hs_ms = 2.0;   // switch processing
  double rtt_ms = 3.5;  // controller <-> switch round trip
  double detection_jitter_ms = 0.0;  // uniform +-jitter, seeded

  void validate() const;
  bool operator==(const DelayModel&) const = default;
};

// Scenario-level actions.
struct FlowArrival {
  TrafficDemand demand;
  bool operator==(const FlowArrival&) const = default;
};
struct FlowDeparture {
  FlowId flow_id = 0;
  bool operator==(const FlowDeparture&) const = default;
};
struct LinkFail {
  LinkKey link;
  bool operator==(const LinkFail&) const = default;
};
struct LinkRestore {
  LinkKey link;
  bool operator==(const LinkRestore&) const = default;
};

using Action = std::variant<FlowArrival, FlowDeparture, LinkFail, LinkRestore>;

struct TimedAction {
  double time_ms = 0.0;
  Action action;
  bool operator==(const TimedAction&) const = default;
};

struct SimInput {
  NetworkGraph graph;
  WeightParams params;
  DelayModel delays;
  std::uint64_t seed = 1;
  double duration_ms = 0.0;
  std::vector<TimedAction> actions;
};

// Internal events.
struct PortStatusDetected {
  PortStatusEvent status;
  SimTime physical_at{0};
  SimTime detection{0};
};

struct RuleCommitted {
  FlowId flow_id = 0;
  std::string label;  // failover / cleanup / install-low / delete-stale-low / delete-high
  RuleBatch rules;
  std::optional<std::size_t> recovery_index;
};

enum class EventKind {
  FlowArrival,
  FlowDeparture,
  LinkFail,
  LinkRestore,
  PortStatusDetected,
  RuleCommitted,
};

const char* to_string(EventKind kind) noexcept;

using EventPayload = std::variant<FlowArrival, FlowDeparture, LinkFail,
                                  LinkRestore, PortStatusDetected, RuleCommitted>;

struct SimEvent {
  SimTime time{0};
  std::uint64_t seq = 0;
  EventPayload payload;

  EventKind kind() const { return static_cast<EventKind>(payload.index()); }
};

struct RecoveryRecord {
  LinkKey link;
  SimTime failed_at{0};
  SimTime detected_at{0};
  SimTime committed_at{0};
  SimTime detection{0};
  SimTime hc{0};
  SimTime hs{0};
  SimTime rtt{0};
  std::size_t affected_flows = 0;
  std::size_t pending_commits = 0;
  bool complete = false;

  SimTime rd() const { return committed_at - failed_at; }
  SimTime components() const { return detection + hc + hs + rtt; }
};

struct FlowStats {
  TrafficDemand demand;
  bool admitted = false;
  bool satisfied = false;
  std::string initial_path;
  std::string final_path;  // data-plane path at the end, "" if blackholed
  double offered_bytes = 0.0;
  double delivered_bytes = 0.0;
  double dropped_bytes = 0.0;
  SimTime blackout{0};

  double loss_fraction() const {
    return offered_bytes > 0.0 ? dropped_bytes / offered_bytes : 0.0;
  }
};

struct LoadPoint {
  SimTime time{0};
  double load = 0.0;
};

struct Metrics {
  std::vector<LoadPoint> load_series;
  std::vector<RecoveryRecord> recoveries;
  std::map<FlowId, FlowStats> flows;
  std::vector<FlowId> blackholed;  // flows that found no backup path
  std::size_t satisfied_count = 0;
  double max_load = 0.0;
};

/// max |TL| over links divided by the mean |TL| over all links in `links`.
/// Returns 0 when every count is zero.
double load_metric(const LinkFlowRegistry& tl,
                   const std::vector<LinkKey>& links);

/// Read-only snapshot handed to observers after every event.
struct EngineView {
  SimTime now{0};
  const SimEvent& event;
  const NetworkGraph& physical;
  const FlowTables& tables;
  const ControlState& controller;
  const std::map<FlowId, TrafficDemand>& active_flows;
};

using EngineObserver = std::function<void(const EngineView&)>;

struct RunResult {
  Metrics metrics;
  std::vector<std::string> log;
};

/// Deterministic discrete-event run. Throws on malformed input.
RunResult run(const SimInput& input, const EngineObserver& observer = {});

}  // namespace sdffr
