#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <ranges>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "sdffr/recovery.hpp"

using namespace sdffr;
using sdffr::testing::error_kind;
using sdffr::testing::fig2_graph;

namespace {

using Change = PortStatusEvent::Change;

FlowPath path(std::initializer_list<const char*> nodes) {
  FlowPath p;
  for (auto n : nodes) p.nodes.emplace_back(n);
  return p;
}

PortStatusEvent removed(const char* u, const char* v) {
  return PortStatusEvent{LinkKey(u, v), Change::LinkRemoved, SimTime{0}};
}

PortStatusEvent added(const char* u, const char* v) {
  return PortStatusEvent{LinkKey(u, v), Change::LinkAdd, SimTime{0}};
}

void admit_many(ControlState& state, FlowTables& tables, FlowId count,
                double rate = 20) {
  for (FlowId id = 1; id <= count; ++id) {
    admit_flow(state, tables, TrafficDemand{id, "AP1", "AP2", rate});
  }
}

// Controller bookkeeping and data plane agree.
void check_consistent(const ControlState& state, const FlowTables& tables) {
  LinkFlowRegistry expected;
  for (const auto& [id, rec] : state.flows) {
    const auto routed = rec.routed_path();
    if (routed) expected.add_path(*routed, id);
    CHECK(active_path(tables, state.graph, rec.demand) == routed);
    const bool parked = rec.high_path.has_value() || rec.blackholed;
    bool in_al = false;
    for (const auto& [key, flows] : state.al.entries()) in_al |= flows.contains(id);
    CHECK(parked == in_al);
  }
  CHECK(expected.entries() == state.tl.entries());
}

}  // namespace

TEST_CASE("wired uplink failure spreads the wired flows") {
  ControlState state(fig2_graph(), WeightParams{});
  FlowTables tables;
  admit_many(state, tables, 12);
  REQUIRE(state.tl.flows_on(LinkKey("AP1", "GW")) == std::set<FlowId>{1, 3, 7, 12});

  auto result = handle_link_removed(state, tables, removed("AP1", "GW"));
  CHECK(result.affected == std::vector<FlowId>{1, 3, 7, 12});
  CHECK(result.blackholed.empty());
  REQUIRE(result.reroutes.size() == 4);
  CHECK(result.reroutes[0].path == path({"AP1", "AP2"}));
  CHECK(result.reroutes[1].path == path({"AP1", "AP3", "AP2"}));
  CHECK(result.reroutes[2].path == path({"AP1", "AP4", "AP2"}));
  CHECK(result.reroutes[3].path == path({"AP1", "AP5", "GW", "AP2"}));

  std::set<NodeId> first_hops;
  for (const auto& r : result.reroutes) first_hops.insert(r.path.nodes[1]);
  CHECK(first_hops.size() == result.reroutes.size());

  for (const auto& r : result.reroutes) {
    for (const auto& op : r.rules) {
      CHECK(op.kind == RuleOp::Kind::Modify);
      CHECK(op.rule.priority == RulePriority::High);
    }
    CHECK(state.al.contains(LinkKey("AP1", "GW"), r.flow));
  }
  CHECK(state.tl.count(LinkKey("AP1", "GW")) == 0);
  CHECK(std::isinf(state.weights.recovery.at(LinkKey("AP1", "GW"))));
  for (const auto& [key, load] : state.current_loads()) {
    CHECK(load.tr_mbps <= state.graph.link(key).capacity_mbps);
  }
  check_consistent(state, tables);

  SUBCASE("revert") {
    auto revert = handle_link_add(state, tables, added("AP1", "GW"));
    CHECK(revert.unroutable.empty());
    REQUIRE(revert.plans.size() == 4);
    CHECK(revert.plans[0].path == path({"AP1", "GW", "AP2"}));
    CHECK(revert.plans[1].path == path({"AP1", "GW", "AP2"}));
    CHECK(revert.plans[2].path == path({"AP1", "GW", "AP2"}));
    CHECK(revert.plans[3].path == path({"AP1", "AP2"}));
    CHECK(state.al.empty());
    for (const auto& rec : state.flows | std::views::values) {
      CHECK_FALSE(rec.high_path);
    }
    for (FlowId id : {1, 3, 7, 12}) {
      for (const auto& rule : tables.rules_of(id)) {
        CHECK(rule.priority == RulePriority::Low);
      }
    }
    check_consistent(state, tables);
  }
}

TEST_CASE("failing an unused link changes no flow") {
  ControlState state(fig2_graph(), WeightParams{});
  FlowTables tables;
  admit_many(state, tables, 3);
  const auto before = state.tl.entries();
  auto result = handle_link_removed(state, tables, removed("AP4", "AP5"));
  CHECK(result.affected.empty());
  CHECK(result.reroutes.empty());
  CHECK(state.tl.entries() == before);
  CHECK(state.al.empty());
  CHECK_FALSE(state.graph.link(LinkKey("AP4", "AP5")).up);
}

TEST_CASE("mesh link failure falls back to the wired path") {
  NetworkGraph g;
  for (auto n : {"GW", "A", "B"}) g.add_node(n);
  g.add_link("A", "GW", LinkKind::Wired, 100, 0.37);
  g.add_link("B", "GW", LinkKind::Wired, 100, 0.37);
  g.add_link("A", "B", LinkKind::WirelessMesh, 71, 0.66);
  ControlState state(g, WeightParams{});
  FlowTables tables;
  CHECK(admit_flow(state, tables, TrafficDemand{1, "A", "B", 50}).path ==
        path({"A", "GW", "B"}));
  CHECK(admit_flow(state, tables, TrafficDemand{2, "A", "B", 10}).path ==
        path({"A", "B"}));

  auto result = handle_link_removed(state, tables, removed("A", "B"));
  CHECK(result.affected == std::vector<FlowId>{2});
  REQUIRE(result.reroutes.size() == 1);
  CHECK(result.reroutes[0].path == path({"A", "GW", "B"}));
  check_consistent(state, tables);
}

TEST_CASE("no backup blackholes the flow") {
  NetworkGraph g;
  g.add_node("A");
  g.add_node("B");
  g.add_link("A", "B", LinkKind::WirelessMesh, 71, 0.66);
  ControlState state(g, WeightParams{});
  FlowTables tables;
  admit_flow(state, tables, TrafficDemand{1, "A", "B", 10});

  auto result = handle_link_removed(state, tables, removed("A", "B"));
  CHECK(result.blackholed == std::vector<FlowId>{1});
  CHECK(state.flow(1).blackholed);
  CHECK(state.tl.empty());
  CHECK(state.al.contains(LinkKey("A", "B"), 1));
  check_consistent(state, tables);

  auto revert = handle_link_add(state, tables, added("A", "B"));
  REQUIRE(revert.plans.size() == 1);
  CHECK_FALSE(state.flow(1).blackholed);
  CHECK(state.al.empty());
  check_consistent(state, tables);
}

TEST_CASE("link add with nothing parked") {
  ControlState state(fig2_graph(), WeightParams{});
  FlowTables tables;
  admit_many(state, tables, 2);
  handle_link_removed(state, tables, removed("AP4", "AP5"));
  const auto rules = tables.size();
  auto revert = handle_link_add(state, tables, added("AP4", "AP5"));
  CHECK(revert.plans.empty());
  CHECK(revert.unroutable.empty());
  CHECK(tables.size() == rules);
  CHECK(state.graph.link(LinkKey("AP4", "AP5")).up);
}

TEST_CASE("second failure on a backup path") {
  ControlState state(fig2_graph(), WeightParams{});
  FlowTables tables;
  admit_many(state, tables, 12);
  handle_link_removed(state, tables, removed("AP1", "GW"));
  REQUIRE(state.flow(3).high_path == path({"AP1", "AP3", "AP2"}));

  auto second = handle_link_removed(state, tables, removed("AP1", "AP3"));
  CHECK(std::find(second.affected.begin(), second.affected.end(), 3) !=
        second.affected.end());
  CHECK(state.al.contains(LinkKey("AP1", "GW"), 3));
  CHECK(state.al.contains(LinkKey("AP1", "AP3"), 3));
  // The replacement backup is not stacked on top of the old one.
  CHECK(tables.find("AP3", 3, RulePriority::High) == nullptr);
  check_consistent(state, tables);

  handle_link_add(state, tables, added("AP1", "GW"));
  CHECK_FALSE(state.al.contains(LinkKey("AP1", "AP3"), 3));
  check_consistent(state, tables);
}

TEST_CASE("event kind is checked") {
  ControlState state(fig2_graph(), WeightParams{});
  CHECK(error_kind([&] { handle_link_removed(state, added("AP1", "GW")); }) ==
        ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { handle_link_add(state, removed("AP1", "GW")); }) ==
        ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { handle_link_removed(state, removed("AP1", "XX")); }) ==
        ErrorKind::UnknownLink);
}

TEST_CASE("random failure and restore sequences keep state consistent") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    ControlState state(fig2_graph(), WeightParams{});
    FlowTables tables;
    const std::vector<NodeId> nodes(state.graph.nodes().begin(),
                                    state.graph.nodes().end());
    for (FlowId id = 1; id <= 15; ++id) {
      const auto& src = nodes[rng() % nodes.size()];
      auto dst = nodes[rng() % nodes.size()];
      if (src == dst) continue;
      admit_flow(state, tables, TrafficDemand{id, src, dst, 5.0 + static_cast<double>(rng() % 20)});
    }
    std::vector<LinkKey> keys;
    for (const auto& [key, link] : state.graph.links()) keys.push_back(key);
    for (int step = 0; step < 25; ++step) {
      const auto& key = keys[rng() % keys.size()];
      const bool up = state.graph.link(key).up;
      const PortStatusEvent ev{key, up ? Change::LinkRemoved : Change::LinkAdd, SimTime{0}};
      std::size_t parked_before = 0, parked_after = 0;
      for (const auto& [k, f] : state.al.entries()) parked_before += f.size();
      if (up) {
        auto r = handle_link_removed(state, tables, ev);
        CHECK(r.reroutes.size() + r.blackholed.size() == r.affected.size());
        for (const auto& [k, f] : state.al.entries()) parked_after += f.size();
        CHECK(parked_after == parked_before + r.affected.size());
      } else {
        auto r = handle_link_add(state, tables, ev);
        const std::set<FlowId> left(r.unroutable.begin(), r.unroutable.end());
        CHECK(state.al.flows_on(key) == left);
      }
      check_consistent(state, tables);
    }
  }
}
