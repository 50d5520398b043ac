#include "sdffr/sim_engine.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <queue>
#include <random>
#include <sstream>

#include "sdffr/error.hpp"

namespace sdffr {

std::string format_ms(SimTime t) {
  const std::int64_t ns = t.count();
  const std::int64_t mag = ns < 0 ? -ns : ns;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%" PRId64 ".%06" PRId64, ns < 0 ? "-" : "",
                mag / 1'000'000, mag % 1'000'000);
  return buf;
}

const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::FlowArrival: return "FlowArrival";
    case EventKind::FlowDeparture: return "FlowDeparture";
    case EventKind::LinkFail: return "LinkFail";
    case EventKind::LinkRestore: return "LinkRestore";
    case EventKind::PortStatusDetected: return "PortStatusDetected";
    case EventKind::RuleCommitted: return "RuleCommitted";
  }
  return "?";
}

void DelayModel::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"detection_ms", detection_ms},
      {"hc_ms", hc_ms},
      {"hs_ms", hs_ms},
      {"rtt_ms", rtt_ms},
      {"detection_jitter_ms", detection_jitter_ms}};
  for (const auto& [name, value] : fields) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw Error(ErrorKind::InvalidParams,
                  std::string(name) + " must be a finite value >= 0");
    }
  }
}

double load_metric(const LinkFlowRegistry& tl,
                   const std::vector<LinkKey>& links) {
  if (links.empty()) return 0.0;
  std::size_t total = 0;
  std::size_t peak = 0;
  for (const auto& key : links) {
    const std::size_t n = tl.count(key);
    total += n;
    peak = std::max(peak, n);
  }
  if (total == 0) return 0.0;
  const double mean =
      static_cast<double>(total) / static_cast<double>(links.size());
  return static_cast<double>(peak) / mean;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct QueueOrder {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

class Engine {
 public:
  Engine(const SimInput& input, const EngineObserver& observer)
      : input_(input),
        observer_(observer),
        physical_(input.graph),
        controller_(input.graph, input.params),
        rng_(input.seed),
        duration_(from_ms(input.duration_ms)) {
    input.delays.validate();
    if (!(input.duration_ms >= 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "duration must be >= 0");
    }
    for (const auto& [key, link] : physical_.links()) all_links_.push_back(key);
    hc_ = from_ms(input.delays.hc_ms);
    hs_ = from_ms(input.delays.hs_ms);
    rtt_ = from_ms(input.delays.rtt_ms);
  }

  RunResult run() {
    for (const auto& timed : input_.actions) {
      std::visit([&](const auto& a) { push(from_ms(timed.time_ms), a); },
                 timed.action);
    }
    while (!queue_.empty() && queue_.top().time <= duration_) {
      SimEvent event = queue_.top();
      queue_.pop();
      advance(event.time);
      dispatch(event);
      if (observer_) {
        observer_(EngineView{now_, event, physical_, tables_, controller_,
                             active_});
      }
    }
    advance(duration_);
    finish();
    return std::move(result_);
  }

 private:
  template <class Payload>
  void push(SimTime t, Payload payload) {
    queue_.push(SimEvent{t, next_seq_++, EventPayload(std::move(payload))});
  }

  void log(const SimEvent& event, const std::string& payload) {
    result_.log.push_back(format_ms(event.time) + " " +
                          to_string(event.kind()) + " " + payload);
  }

  void dispatch(const SimEvent& event) {
    std::visit(Overloaded{
                   [&](const FlowArrival& e) { on_arrival(event, e); },
                   [&](const FlowDeparture& e) { on_departure(event, e); },
                   [&](const LinkFail& e) { on_link_change(event, e.link, false); },
                   [&](const LinkRestore& e) { on_link_change(event, e.link, true); },
                   [&](const PortStatusDetected& e) { on_port_status(event, e); },
                   [&](const RuleCommitted& e) { on_commit(event, e); },
               },
               event.payload);
  }

  void on_arrival(const SimEvent& event, const FlowArrival& e) {
    const TrafficDemand& d = e.demand;
    FlowStats& stats = result_.metrics.flows[d.flow_id];
    stats.demand = d;
    std::string head = "flow=" + std::to_string(d.flow_id) + " src=" +
                       d.src.value + " dst=" + d.dst.value +
                       " rate=" + fixed6(d.rate_mbps);
    try {
      Admission admission = admit_flow(controller_, d);
      apply_batch(tables_, admission.rules);
      active_.emplace(d.flow_id, d);
      stats.admitted = true;
      stats.satisfied = admission.outcome.satisfied;
      stats.initial_path = to_string(admission.outcome.path);
      log(event, head + " path=" + stats.initial_path +
                     " satisfied=" + (stats.satisfied ? "1" : "0"));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::Unreachable) throw;
      log(event, head + " rejected=unreachable");
    }
    sample_load();
  }

  void on_departure(const SimEvent& event, const FlowDeparture& e) {
    auto it = active_.find(e.flow_id);
    if (it == active_.end()) {
      log(event, "flow=" + std::to_string(e.flow_id) + " ignored=not-active");
      return;
    }
    auto& stats = result_.metrics.flows[e.flow_id];
    stats.final_path = data_plane_path(it->second);
    remove_flow(controller_, tables_, e.flow_id);
    active_.erase(it);
    log(event, "flow=" + std::to_string(e.flow_id));
    sample_load();
  }

  void on_link_change(const SimEvent& event, const LinkKey& key, bool up) {
    const Link& link = physical_.link(key);
    if (link.up == up) {
      log(event, "link=" + to_string(key) + " ignored=no-change");
      return;
    }
    physical_.set_link_state(key.lo, key.hi, up);
    log(event, "link=" + to_string(key));

    SimTime detection = from_ms(input_.delays.detection_ms);
    if (input_.delays.detection_jitter_ms > 0.0) {
      const double u = static_cast<double>(rng_() >> 11) * 0x1p-53;
      const double ms = input_.delays.detection_ms +
                        (2.0 * u - 1.0) * input_.delays.detection_jitter_ms;
      detection = from_ms(std::max(0.0, ms));
    }
    PortStatusDetected detected;
    detected.status.link = key;
    detected.status.change = up ? PortStatusEvent::Change::LinkAdd
                                : PortStatusEvent::Change::LinkRemoved;
    detected.status.detected_at = event.time + detection;
    detected.physical_at = event.time;
    detected.detection = detection;
    push(event.time + detection, std::move(detected));
  }

  static std::string join_ids(const std::vector<FlowId>& ids) {
    if (ids.empty()) return "-";
    std::string out;
    for (FlowId id : ids) {
      if (!out.empty()) out += ',';
      out += std::to_string(id);
    }
    return out;
  }

  void on_port_status(const SimEvent& event, const PortStatusDetected& e) {
    const SimTime commit_at = event.time + hc_ + hs_ + rtt_;
    std::string head = "link=" + to_string(e.status.link) +
                       " change=" + to_string(e.status.change);

    if (e.status.change == PortStatusEvent::Change::LinkRemoved) {
      FailoverResult res = handle_link_removed(controller_, e.status);
      std::string reroutes;
      for (const auto& r : res.reroutes) {
        if (!reroutes.empty()) reroutes += ',';
        reroutes += std::to_string(r.flow) + ":" + to_string(r.path);
      }
      log(event, head + " affected=" + join_ids(res.affected) +
                     " backups=" + (reroutes.empty() ? "-" : reroutes) +
                     " blackholed=" + join_ids(res.blackholed));
      for (FlowId id : res.blackholed) result_.metrics.blackholed.push_back(id);

      std::optional<std::size_t> index;
      if (!res.reroutes.empty()) {
        RecoveryRecord record;
        record.link = e.status.link;
        record.failed_at = e.physical_at;
        record.detected_at = event.time;
        record.detection = e.detection;
        record.hc = hc_;
        record.hs = hs_;
        record.rtt = rtt_;
        record.affected_flows = res.affected.size();
        record.pending_commits = res.reroutes.size();
        index = result_.metrics.recoveries.size();
        result_.metrics.recoveries.push_back(record);
      }
      for (auto& [id, batch] : res.cleanups) {
        push(commit_at, RuleCommitted{id, "cleanup", std::move(batch), {}});
      }
      for (auto& r : res.reroutes) {
        push(commit_at, RuleCommitted{r.flow, "failover", std::move(r.rules), index});
      }
    } else {
      RevertResult res = handle_link_add(controller_, e.status);
      std::string paths;
      std::vector<FlowId> reverted;
      for (const auto& plan : res.plans) {
        if (!paths.empty()) paths += ',';
        paths += std::to_string(plan.flow) + ":" + to_string(plan.path);
        reverted.push_back(plan.flow);
      }
      log(event, head + " affected=" + join_ids(reverted) +
                     " paths=" + (paths.empty() ? "-" : paths) +
                     " unroutable=" + join_ids(res.unroutable));
      for (auto& plan : res.plans) {
        push(commit_at, RuleCommitted{plan.flow, "install-low",
                                      std::move(plan.install_low), {}});
        push(commit_at, RuleCommitted{plan.flow, "delete-stale-low",
                                      std::move(plan.delete_stale_low), {}});
        push(commit_at, RuleCommitted{plan.flow, "delete-high",
                                      std::move(plan.delete_high), {}});
      }
    }
    sample_load();
  }

  void on_commit(const SimEvent& event, const RuleCommitted& e) {
    apply_batch(tables_, e.rules);
    log(event, "flow=" + std::to_string(e.flow_id) + " op=" + e.label +
                   " rules=" + std::to_string(e.rules.size()));
    if (e.recovery_index) {
      RecoveryRecord& record = result_.metrics.recoveries[*e.recovery_index];
      if (record.pending_commits > 0 && --record.pending_commits == 0) {
        record.committed_at = event.time;
        record.complete = true;
      }
    }
  }

  void sample_load() {
    result_.metrics.load_series.push_back(
        LoadPoint{now_, load_metric(controller_.tl, all_links_)});
  }

  std::string data_plane_path(const TrafficDemand& d) const {
    auto path = active_path(tables_, physical_, d);
    return path ? to_string(*path) : std::string();
  }

  // Fluid accounting over [now_, to): blackholed flows drop everything;
  // otherwise a flow loses the worst overflow fraction along its path.
  void advance(SimTime to) {
    if (to <= now_) return;
    const double dt_ns = static_cast<double>((to - now_).count());
    std::map<FlowId, std::optional<FlowPath>> paths;
    std::map<LinkKey, double> offered;
    for (const auto& [id, demand] : active_) {
      auto path = active_path(tables_, physical_, demand);
      if (path) {
        for (const auto& key : path->edges()) offered[key] += demand.rate_mbps;
      }
      paths.emplace(id, std::move(path));
    }
    for (const auto& [id, demand] : active_) {
      FlowStats& stats = result_.metrics.flows[id];
      const double bytes = demand.rate_mbps * dt_ns / 8000.0;
      stats.offered_bytes += bytes;
      const auto& path = paths.at(id);
      if (!path) {
        stats.dropped_bytes += bytes;
        stats.blackout += to - now_;
        continue;
      }
      double drop = 0.0;
      for (const auto& key : path->edges()) {
        const double load = offered.at(key);
        const double cap = physical_.link(key).effective_capacity();
        if (load > cap) drop = std::max(drop, (load - cap) / load);
      }
      stats.dropped_bytes += bytes * drop;
      stats.delivered_bytes += bytes * (1.0 - drop);
    }
    now_ = to;
  }

  void finish() {
    Metrics& m = result_.metrics;
    for (const auto& [id, demand] : active_) {
      m.flows[id].final_path = data_plane_path(demand);
    }
    m.satisfied_count = 0;
    for (const auto& [id, stats] : m.flows) {
      if (stats.admitted && stats.satisfied) ++m.satisfied_count;
    }
    m.max_load = 0.0;
    for (const auto& p : m.load_series) m.max_load = std::max(m.max_load, p.load);
  }

  const SimInput& input_;
  const EngineObserver& observer_;
  NetworkGraph physical_;
  ControlState controller_;
  FlowTables tables_;
  std::map<FlowId, TrafficDemand> active_;
  std::vector<LinkKey> all_links_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, QueueOrder> queue_;
  std::uint64_t next_seq_ = 0;
  std::mt19937_64 rng_;
  SimTime now_{0};
  SimTime duration_;
  SimTime hc_{0};
  SimTime hs_{0};
  SimTime rtt_{0};
  RunResult result_;
};

}  // namespace

RunResult run(const SimInput& input, const EngineObserver& observer) {
  return Engine(input, observer).run();
}

}  // namespace sdffr
