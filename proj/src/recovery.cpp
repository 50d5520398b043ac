#include "sdffr/recovery.hpp"

#include <algorithm>
#include <limits>

#include "sdffr/error.hpp"

namespace sdffr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool on_path(const FlowPath& path, const NodeId& n) {
  return std::find(path.nodes.begin(), path.nodes.end(), n) != path.nodes.end();
}

std::vector<NodeId> nodes_not_on(const FlowPath& from, const FlowPath& keep) {
  std::vector<NodeId> out;
  for (const auto& n : from.nodes) {
    if (!on_path(keep, n)) out.push_back(n);
  }
  return out;
}

void require_link(const ControlState& state, const LinkKey& key) {
  state.graph.link(key);  // throws UnknownLink
}

}  // namespace

const char* to_string(PortStatusEvent::Change change) noexcept {
  return change == PortStatusEvent::Change::LinkRemoved ? "LinkRemoved"
                                                        : "LinkAdd";
}

FailoverResult handle_link_removed(ControlState& state,
                                   const PortStatusEvent& event) {
  if (event.change != PortStatusEvent::Change::LinkRemoved) {
    throw Error(ErrorKind::InvalidArgument, "expected a LINK REMOVED event");
  }
  require_link(state, event.link);
  state.graph.set_link_state(event.link.lo, event.link.hi, false);

  FailoverResult result;
  const std::set<FlowId> affected = state.tl.flows_on(event.link);
  result.affected.assign(affected.begin(), affected.end());

  state.weights.normal[event.link] = kInf;
  state.weights.recovery[event.link] = kInf;

  for (FlowId id : affected) {
    FlowRecord& record = state.flow(id);
    const FlowPath old_path = *record.routed_path();

    refresh_weights(state.weights, WeightMode::PostRecovery, state.graph,
                    state.params, nullptr, &state.tl);
    auto backup = shortest_path(state.graph, state.weights.recovery,
                                record.demand.src, record.demand.dst);

    state.al.add(event.link, id);
    state.tl.remove_path(old_path, id);

    if (!backup) {
      if (record.high_path) {
        result.cleanups.emplace_back(
            id, delete_ops(record.high_path->nodes, id, RulePriority::High));
        record.high_path.reset();
      }
      record.blackholed = true;
      result.blackholed.push_back(id);
      continue;
    }

    // A previous backup is replaced rather than stacked.
    RuleBatch rules;
    if (record.high_path) {
      rules = delete_ops(nodes_not_on(*record.high_path, *backup), id,
                         RulePriority::High);
    }
    RuleBatch install =
        path_rules(*backup, id, RulePriority::High, RuleOp::Kind::Modify);
    rules.insert(rules.end(), install.begin(), install.end());

    record.high_path = *backup;
    record.blackholed = false;
    state.tl.add_path(*backup, id);
    result.reroutes.push_back(Reroute{id, std::move(*backup), std::move(rules)});
  }
  return result;
}

RevertResult handle_link_add(ControlState& state,
                             const PortStatusEvent& event) {
  if (event.change != PortStatusEvent::Change::LinkAdd) {
    throw Error(ErrorKind::InvalidArgument, "expected a LINK ADD event");
  }
  require_link(state, event.link);
  state.graph.set_link_state(event.link.lo, event.link.hi, true);

  RevertResult result;
  const std::set<FlowId> affected = state.al.flows_on(event.link);
  const std::vector<NodeId> all(state.graph.nodes().begin(),
                                state.graph.nodes().end());

  for (FlowId id : affected) {
    FlowRecord& record = state.flow(id);
    auto outcome = plan_normal_route(state, record.demand);
    if (!outcome) {
      result.unroutable.push_back(id);
      continue;
    }

    RevertPlan plan;
    plan.flow = id;
    plan.path = outcome->path;
    plan.install_low =
        path_rules(outcome->path, id, RulePriority::Low, RuleOp::Kind::Modify);
    plan.delete_stale_low = delete_ops(nodes_not_on(record.low_path, outcome->path),
                                       id, RulePriority::Low);
    plan.delete_high = delete_ops(all, id, RulePriority::High);

    // The flow is back on a Low path, so it no longer waits on any failure.
    state.al.remove_everywhere(id);
    state.tl.remove_everywhere(id);
    state.tl.add_path(outcome->path, id);
    record.low_path = std::move(outcome->path);
    record.high_path.reset();
    record.blackholed = false;

    result.plans.push_back(std::move(plan));
  }
  return result;
}

FailoverResult handle_link_removed(ControlState& state, FlowTables& tables,
                                   const PortStatusEvent& event) {
  FailoverResult result = handle_link_removed(state, event);
  for (const auto& [id, batch] : result.cleanups) apply_batch(tables, batch);
  for (const auto& reroute : result.reroutes) apply_batch(tables, reroute.rules);
  return result;
}

RevertResult handle_link_add(ControlState& state, FlowTables& tables,
                             const PortStatusEvent& event) {
  RevertResult result = handle_link_add(state, event);
  for (const auto& plan : result.plans) {
    apply_batch(tables, plan.install_low);
    apply_batch(tables, plan.delete_stale_low);
    apply_batch(tables, plan.delete_high);
  }
  return result;
}

}  // namespace sdffr
