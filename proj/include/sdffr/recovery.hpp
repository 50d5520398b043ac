#pragma once

#include <vector>

#include "sdffr/flow_state.hpp"
#include "sdffr/routing.hpp"
#include "sdffr/sim_time.hpp"

namespace sdffr {

struct PortStatusEvent {
  enum class Change { LinkRemoved, LinkAdd };

  LinkKey link;
  Change change = Change::LinkRemoved;
  SimTime detected_at{0};
};

const char* to_string(PortStatusEvent::Change change) noexcept;

struct Reroute {
  FlowId flow = 0;
  FlowPath path;
  RuleBatch rules;  // High-priority replace for this flow
};

struct FailoverResult {
  std::vector<FlowId> affected;
  std::vector<Reroute> reroutes;
  std::vector<FlowId> blackholed;
  /// Deletes of stale High rules for blackholed flows, per flow.
  std::vector<std::pair<FlowId, RuleBatch>> cleanups;
};

/// LINK REMOVED: every flow routed over the failed link gets a backup path
/// from post-recovery weights, recomputed between placements, in flow id
/// order. Marks the link down in the controller's view.
FailoverResult handle_link_removed(ControlState& state,
                                   const PortStatusEvent& event);

/// Make-before-break revert of one flow. Commit order that keeps the flow
/// deliverable: install_low before delete_high; delete_stale_low anywhere.
struct RevertPlan {
  FlowId flow = 0;
  FlowPath path;
  RuleBatch install_low;
  RuleBatch delete_stale_low;
  RuleBatch delete_high;
};

struct RevertResult {
  std::vector<RevertPlan> plans;
  std::vector<FlowId> unroutable;  // kept in AL until a later LINK ADD
};

/// LINK ADD: flows parked on backups for this link are re-routed with normal
/// weights (in flow id order) and their High rules scheduled for deletion.
RevertResult handle_link_add(ControlState& state, const PortStatusEvent& event);

/// Convenience wrappers that commit the produced rules immediately.
FailoverResult handle_link_removed(ControlState& state, FlowTables& tables,
                                   const PortStatusEvent& event);
RevertResult handle_link_add(ControlState& state, FlowTables& tables,
                             const PortStatusEvent& event);

}  // namespace sdffr
