#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "sdffr/sim_engine.hpp"

using namespace sdffr;
using sdffr::testing::error_kind;
using sdffr::testing::fig2_graph;

namespace {

SimInput base_input(double duration_ms = 30000) {
  SimInput in;
  in.graph = fig2_graph();
  in.duration_ms = duration_ms;
  return in;
}

void arrive(SimInput& in, double t, FlowId id, const char* src, const char* dst,
            double rate) {
  in.actions.push_back({t, FlowArrival{{id, src, dst, rate}}});
}

}  // namespace

TEST_CASE("format_ms is exact") {
  CHECK(format_ms(from_ms(55.1)) == "55.100000");
  CHECK(format_ms(from_ms(15055.1)) == "15055.100000");
  CHECK(format_ms(SimTime{-1'500'000}) == "-1.500000");
  CHECK(from_ms(44.6) + from_ms(5) + from_ms(2) + from_ms(3.5) == from_ms(55.1));
}

TEST_CASE("load_metric") {
  LinkFlowRegistry tl;
  const std::vector<LinkKey> links{LinkKey("A", "B"), LinkKey("B", "C"),
                                   LinkKey("C", "D"), LinkKey("A", "D")};
  CHECK(load_metric(tl, links) == 0.0);
  tl.add(links[0], 1);
  CHECK(load_metric(tl, links) == 4.0);
  for (FlowId f : {2, 3, 4}) tl.add(links[f - 1], f);
  CHECK(load_metric(tl, links) == 1.0);
  tl.add(links[0], 5);
  tl.remove(links[3], 4);
  CHECK(load_metric(tl, {links[0], links[1], links[2]}) == 1.5);
  CHECK(load_metric(tl, links) == 2.0);
  CHECK(load_metric(tl, {}) == 0.0);
}

TEST_CASE("empty run") {
  auto result = run(base_input());
  CHECK(result.metrics.flows.empty());
  CHECK(result.metrics.recoveries.empty());
  CHECK(result.metrics.satisfied_count == 0);
  CHECK(result.metrics.max_load == 0.0);
  CHECK(result.log.empty());
}

TEST_CASE("wired failure recovery delay") {
  auto in = base_input();
  arrive(in, 0, 1, "AP1", "AP2", 10);
  in.actions.push_back({15000, LinkFail{LinkKey("AP1", "GW")}});
  auto result = run(in);

  REQUIRE(result.metrics.recoveries.size() == 1);
  const auto& rec = result.metrics.recoveries[0];
  CHECK(rec.complete);
  CHECK(rec.rd() == from_ms(55.1));
  CHECK(rec.rd() == rec.components());
  CHECK(rec.failed_at == from_ms(15000));
  CHECK(rec.detected_at == from_ms(15044.6));

  const auto& stats = result.metrics.flows.at(1);
  CHECK(stats.initial_path == "AP1-GW-AP2");
  CHECK(stats.final_path == "AP1-AP2");
  CHECK(stats.blackout == from_ms(55.1));
  CHECK(stats.loss_fraction() == doctest::Approx(55.1 / 30000).epsilon(1e-12));
  CHECK(stats.offered_bytes ==
        doctest::Approx(stats.delivered_bytes + stats.dropped_bytes));
}

TEST_CASE("delay components add up") {
  auto in = base_input();
  in.delays = DelayModel{10, 1, 0.25, 0.5, 0};
  arrive(in, 0, 1, "AP1", "AP2", 10);
  in.actions.push_back({100, LinkFail{LinkKey("AP1", "GW")}});
  auto result = run(in);
  REQUIRE(result.metrics.recoveries.size() == 1);
  CHECK(result.metrics.recoveries[0].rd() == from_ms(11.75));

  in.delays.detection_jitter_ms = 5;
  in.seed = 9;
  auto a = run(in), b = run(in);
  const auto& ra = a.metrics.recoveries.at(0);
  CHECK(ra.rd() == ra.components());
  CHECK(ra.detection >= from_ms(5));
  CHECK(ra.detection <= from_ms(15));
  CHECK(a.log == b.log);

  in.delays.hc_ms = -1;
  CHECK(error_kind([&] { run(in); }) == ErrorKind::InvalidParams);
}

TEST_CASE("failure of an unused link records nothing") {
  auto in = base_input();
  arrive(in, 0, 1, "AP1", "AP2", 10);
  in.actions.push_back({100, LinkFail{LinkKey("AP4", "AP5")}});
  in.actions.push_back({200, LinkFail{LinkKey("AP4", "AP5")}});
  auto result = run(in);
  CHECK(result.metrics.recoveries.empty());
  CHECK(result.metrics.flows.at(1).dropped_bytes == 0.0);
  CHECK(result.log.at(3).find("LinkFail link=AP4-AP5 ignored=no-change") !=
        std::string::npos);
}

TEST_CASE("oversubscribed link loss") {
  SimInput in;
  in.graph.add_node("A");
  in.graph.add_node("B");
  in.graph.add_link("A", "B", LinkKind::WirelessMesh, 71, 0.66);
  in.duration_ms = 1000;
  for (FlowId id = 1; id <= 4; ++id) arrive(in, 0, id, "A", "B", 20);
  auto result = run(in);
  CHECK(result.metrics.satisfied_count == 3);
  for (const auto& [id, stats] : result.metrics.flows) {
    CHECK(stats.loss_fraction() == doctest::Approx(0.1125).epsilon(1e-12));
  }
}

TEST_CASE("no loss without failures") {
  auto in = base_input(5000);
  for (FlowId id = 1; id <= 16; ++id) arrive(in, 100.0 * (id - 1), id, "AP1", "AP2", 20);
  auto result = run(in);
  CHECK(result.metrics.satisfied_count == 16);
  for (const auto& [id, stats] : result.metrics.flows) {
    CHECK(stats.dropped_bytes == 0.0);
    CHECK(stats.offered_bytes > 0.0);
  }
  CHECK(result.metrics.load_series.size() == 16);
}

TEST_CASE("departure and unreachable arrival") {
  auto in = base_input(1000);
  in.graph.add_node("ISLAND");
  arrive(in, 0, 1, "AP1", "AP2", 10);
  arrive(in, 10, 2, "AP1", "ISLAND", 10);
  in.actions.push_back({500, FlowDeparture{1}});
  in.actions.push_back({600, FlowDeparture{1}});
  auto result = run(in);
  CHECK_FALSE(result.metrics.flows.at(2).admitted);
  CHECK(result.log.at(1).find("rejected=unreachable") != std::string::npos);
  CHECK(result.log.at(3).find("ignored=not-active") != std::string::npos);
  CHECK(result.metrics.flows.at(1).offered_bytes ==
        doctest::Approx(10.0 * 500e6 / 8000.0));
}

TEST_CASE("events are processed in causal order") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto in = base_input(20000);
    for (FlowId id = 1; id <= 12; ++id) {
      arrive(in, static_cast<double>(rng() % 1000), id, "AP1", "AP2", 20);
    }
    std::vector<LinkKey> keys;
    for (const auto& [key, link] : in.graph.links()) keys.push_back(key);
    for (int k = 0; k < 6; ++k) {
      const auto& key = keys[rng() % keys.size()];
      const double t = 2000.0 + static_cast<double>(rng() % 15000);
      if (k % 2) in.actions.push_back({t, LinkRestore{key}});
      else in.actions.push_back({t, LinkFail{key}});
    }
    SimTime last{0};
    std::uint64_t last_seq = 0;
    bool first = true;
    auto result = run(in, [&](const EngineView& view) {
      CHECK(view.now == view.event.time);
      if (!first) {
        CHECK((view.event.time > last ||
               (view.event.time == last && view.event.seq > last_seq)));
      }
      first = false;
      last = view.event.time;
      last_seq = view.event.seq;
    });
    for (const auto& rec : result.metrics.recoveries) {
      CHECK(rec.detected_at >= rec.failed_at);
      if (rec.complete) CHECK(rec.committed_at >= rec.detected_at);
    }
    for (const auto& [id, stats] : result.metrics.flows) {
      CHECK(stats.offered_bytes ==
            doctest::Approx(stats.delivered_bytes + stats.dropped_bytes));
    }
  }
}
