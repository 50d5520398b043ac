#include "sdffr/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdffr/error.hpp"

namespace sdffr {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Validation, field + ": " + what);
}

// Walks a JSON object, tracking the pointer path for diagnostics and
// rejecting keys nobody asked for.
class Fields {
 public:
  Fields(const ojson& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(where(), "expected an object");
  }

  std::string where(const std::string& key = {}) const {
    std::string p = path_.empty() ? "/" : path_;
    if (key.empty()) return p;
    return (path_.empty() ? "" : path_) + "/" + key;
  }

  const ojson* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const ojson& require(const std::string& key) {
    const ojson* v = find(key);
    if (!v) invalid(where(key), "missing required field");
    return *v;
  }

  double number(const std::string& key) {
    const ojson& v = require(key);
    if (!v.is_number()) invalid(where(key), "expected a number");
    return v.get<double>();
  }

  double number_or(const std::string& key, double fallback) {
    const ojson* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) invalid(where(key), "expected a number");
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key) {
    const ojson& v = require(key);
    if (!v.is_number_integer()) invalid(where(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string text(const std::string& key) {
    const ojson& v = require(key);
    if (!v.is_string()) invalid(where(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) invalid(where(it.key()), "unknown field");
    }
  }

 private:
  const ojson& j_;
  std::string path_;
  std::set<std::string> seen_;
};

LinkKey read_link(Fields& f) {
  return LinkKey(NodeId(f.text("u")), NodeId(f.text("v")));
}

TimedAction read_event(const ojson& j, const std::string& path) {
  Fields f(j, path);
  TimedAction timed;
  timed.time_ms = f.number("time_ms");
  const std::string type = f.text("type");
  if (type == "flow_arrival") {
    TrafficDemand d;
    d.flow_id = f.integer("flow_id");
    d.src = NodeId(f.text("src"));
    d.dst = NodeId(f.text("dst"));
    d.rate_mbps = f.number("rate_mbps");
    timed.action = FlowArrival{d};
  } else if (type == "flow_departure") {
    timed.action = FlowDeparture{f.integer("flow_id")};
  } else if (type == "link_fail") {
    timed.action = LinkFail{read_link(f)};
  } else if (type == "link_restore") {
    timed.action = LinkRestore{read_link(f)};
  } else {
    invalid(f.where("type"), "unknown event type \"" + type + "\"");
  }
  f.finish();
  return timed;
}

Scenario from_json(const ojson& root) {
  Fields top(root, "");
  Scenario s;
  s.schema_version = static_cast<int>(top.integer("schema_version"));
  if (s.schema_version != kScenarioSchemaVersion) {
    invalid("/schema_version", "unsupported schema version " +
                                   std::to_string(s.schema_version));
  }
  s.name = top.text("name");
  s.duration_ms = top.number("duration_ms");
  if (const ojson* seed = top.find("seed")) {
    if (!seed->is_number_unsigned()) {
      invalid("/seed", "expected a nonnegative integer");
    }
    s.seed = seed->get<std::uint64_t>();
  }

  {
    Fields w(top.require("weights"), "/weights");
    s.weights.q0 = w.number("q0");
    s.weights.alpha = w.number("alpha");
    s.weights.q1 = w.number_or("q1", 1.0 - s.weights.q0);
    w.finish();
  }
  if (const ojson* d = top.find("delays")) {
    Fields f(*d, "/delays");
    DelayModel defaults;
    s.delays.detection_ms = f.number_or("detection_ms", defaults.detection_ms);
    s.delays.hc_ms = f.number_or("hc_ms", defaults.hc_ms);
    s.delays.hs_ms = f.number_or("hs_ms", defaults.hs_ms);
    s.delays.rtt_ms = f.number_or("rtt_ms", defaults.rtt_ms);
    s.delays.detection_jitter_ms =
        f.number_or("detection_jitter_ms", defaults.detection_jitter_ms);
    f.finish();
  }

  Fields topo(top.require("topology"), "/topology");
  const ojson& nodes = topo.require("nodes");
  if (!nodes.is_array()) invalid("/topology/nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_string()) {
      invalid("/topology/nodes/" + std::to_string(i), "expected a string");
    }
    s.nodes.emplace_back(nodes[i].get<std::string>());
  }
  const ojson& links = topo.require("links");
  if (!links.is_array()) invalid("/topology/links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string path = "/topology/links/" + std::to_string(i);
    Fields f(links[i], path);
    LinkSpec link;
    link.u = NodeId(f.text("u"));
    link.v = NodeId(f.text("v"));
    try {
      link.kind = parse_link_kind(f.text("kind"));
    } catch (const Error& err) {
      invalid(path + "/kind", err.what());
    }
    link.capacity_mbps = f.number("capacity_mbps");
    link.prop_delay_ms = f.number_or("prop_delay_ms", 0.0);
    f.finish();
    s.links.push_back(std::move(link));
  }
  topo.finish();

  if (const ojson* events = top.find("events")) {
    if (!events->is_array()) invalid("/events", "expected an array");
    for (std::size_t i = 0; i < events->size(); ++i) {
      s.events.push_back(read_event((*events)[i], "/events/" + std::to_string(i)));
    }
  }
  top.finish();
  return s;
}

ojson link_json(const LinkKey& key) {
  return ojson{{"u", key.lo.value}, {"v", key.hi.value}};
}

ojson event_json(const TimedAction& timed) {
  ojson j;
  j["time_ms"] = timed.time_ms;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, FlowArrival>) {
          j["type"] = "flow_arrival";
          j["flow_id"] = a.demand.flow_id;
          j["src"] = a.demand.src.value;
          j["dst"] = a.demand.dst.value;
          j["rate_mbps"] = a.demand.rate_mbps;
        } else if constexpr (std::is_same_v<T, FlowDeparture>) {
          j["type"] = "flow_departure";
          j["flow_id"] = a.flow_id;
        } else if constexpr (std::is_same_v<T, LinkFail>) {
          j["type"] = "link_fail";
          j.update(link_json(a.link));
        } else {
          j["type"] = "link_restore";
          j.update(link_json(a.link));
        }
      },
      timed.action);
  return j;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::Io, "unwritable output dir " + dir.string() +
                                   (ec ? ": " + ec.message() : ""));
  }
}

std::string join6(const std::vector<double>& values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ';';
    out += fixed6(v);
  }
  return out;
}

}  // namespace

void validate(const Scenario& s) {
  if (s.schema_version != kScenarioSchemaVersion) {
    invalid("/schema_version", "unsupported schema version");
  }
  if (s.name.empty()) invalid("/name", "must be nonempty");
  if (!(s.duration_ms >= 0.0) || !std::isfinite(s.duration_ms)) {
    invalid("/duration_ms", "must be a finite value >= 0");
  }
  try {
    s.weights.validate();
  } catch (const Error& err) {
    invalid("/weights", err.what());
  }
  try {
    s.delays.validate();
  } catch (const Error& err) {
    invalid("/delays", err.what());
  }

  NetworkGraph graph;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    try {
      graph.add_node(s.nodes[i]);
    } catch (const Error& err) {
      invalid("/topology/nodes/" + std::to_string(i), err.what());
    }
  }
  for (std::size_t i = 0; i < s.links.size(); ++i) {
    const auto& l = s.links[i];
    try {
      graph.add_link(l.u, l.v, l.kind, l.capacity_mbps, l.prop_delay_ms);
    } catch (const Error& err) {
      invalid("/topology/links/" + std::to_string(i), err.what());
    }
  }

  std::map<FlowId, double> arrivals;
  for (const auto& timed : s.events) {
    if (const auto* a = std::get_if<FlowArrival>(&timed.action)) {
      arrivals.emplace(a->demand.flow_id, timed.time_ms);
    }
  }
  std::set<FlowId> seen_ids;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const std::string path = "/events/" + std::to_string(i);
    const auto& timed = s.events[i];
    if (!(timed.time_ms >= 0.0 && timed.time_ms <= s.duration_ms)) {
      invalid(path + "/time_ms", "must lie within [0, duration_ms]");
    }
    auto node_known = [&](const NodeId& n, const std::string& field) {
      if (!graph.has_node(n)) {
        invalid(path + "/" + field, "node \"" + n.value + "\" is not declared");
      }
    };
    auto link_known = [&](const LinkKey& key) {
      node_known(key.lo, "u");
      node_known(key.hi, "v");
      if (!graph.has_link(key.lo, key.hi)) {
        invalid(path, "link " + to_string(key) + " is not declared");
      }
    };
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, FlowArrival>) {
            const auto& d = a.demand;
            node_known(d.src, "src");
            node_known(d.dst, "dst");
            if (d.src == d.dst) invalid(path, "src and dst must differ");
            if (!(d.rate_mbps > 0.0)) invalid(path + "/rate_mbps", "must be > 0");
            if (!seen_ids.insert(d.flow_id).second) {
              invalid(path + "/flow_id", "duplicate flow id " +
                                             std::to_string(d.flow_id));
            }
          } else if constexpr (std::is_same_v<T, FlowDeparture>) {
            auto it = arrivals.find(a.flow_id);
            if (it == arrivals.end()) {
              invalid(path + "/flow_id", "no arrival for flow " +
                                             std::to_string(a.flow_id));
            }
            if (timed.time_ms < it->second) {
              invalid(path + "/time_ms", "departure precedes arrival");
            }
          } else {
            link_known(a.link);
          }
        },
        timed.action);
  }
}

NetworkGraph build_graph(const Scenario& s) {
  NetworkGraph graph;
  for (const auto& n : s.nodes) graph.add_node(n);
  for (const auto& l : s.links) {
    graph.add_link(l.u, l.v, l.kind, l.capacity_mbps, l.prop_delay_ms);
  }
  return graph;
}

SimInput to_sim_input(const Scenario& s) {
  validate(s);
  SimInput input;
  input.graph = build_graph(s);
  input.params = s.weights;
  input.delays = s.delays;
  input.seed = s.seed;
  input.duration_ms = s.duration_ms;
  input.actions = s.events;
  return input;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  ojson root;
  try {
    root = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    auto [line, column] = line_column(text, err.byte);
    throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line) + ":" +
                                      std::to_string(column) + ": " + err.what());
  }
  try {
    Scenario s = from_json(root);
    validate(s);
    return s;
  } catch (const Error& err) {
    throw Error(err.kind(), origin + ": " + err.what());
  }
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.string());
}

std::string serialize(const Scenario& s) {
  ojson root;
  root["schema_version"] = s.schema_version;
  root["name"] = s.name;
  root["duration_ms"] = s.duration_ms;
  root["seed"] = s.seed;
  root["weights"] = {{"q0", s.weights.q0}, {"q1", s.weights.q1},
                     {"alpha", s.weights.alpha}};
  root["delays"] = {{"detection_ms", s.delays.detection_ms},
                    {"hc_ms", s.delays.hc_ms},
                    {"hs_ms", s.delays.hs_ms},
                    {"rtt_ms", s.delays.rtt_ms},
                    {"detection_jitter_ms", s.delays.detection_jitter_ms}};
  ojson nodes = ojson::array();
  for (const auto& n : s.nodes) nodes.push_back(n.value);
  ojson links = ojson::array();
  for (const auto& l : s.links) {
    links.push_back({{"u", l.u.value},
                     {"v", l.v.value},
                     {"kind", to_string(l.kind)},
                     {"capacity_mbps", l.capacity_mbps},
                     {"prop_delay_ms", l.prop_delay_ms}});
  }
  root["topology"] = {{"nodes", nodes}, {"links", links}};
  ojson events = ojson::array();
  for (const auto& e : s.events) events.push_back(event_json(e));
  root["events"] = events;
  return root.dump(2) + "\n";
}

std::string ReportRow::csv_header() {
  return "scenario,satisfied,max_load,rd_ms,loss_pct";
}

std::string ReportRow::csv() const {
  return key + "," + std::to_string(satisfied) + "," + fixed6(max_load) + "," +
         join6(rd_ms) + "," + join6(loss_pct);
}

ReportRow make_report_row(const std::string& key, const Metrics& m) {
  ReportRow row;
  row.key = key;
  row.satisfied = m.satisfied_count;
  row.max_load = m.max_load;
  for (const auto& r : m.recoveries) {
    if (r.complete) row.rd_ms.push_back(to_ms(r.rd()));
  }
  for (const auto& [id, stats] : m.flows) {
    if (stats.admitted) row.loss_pct.push_back(100.0 * stats.loss_fraction());
  }
  return row;
}

std::string metrics_csv(const Metrics& m) {
  std::string out =
      "flow_id,src,dst,rate_mbps,admitted,satisfied,initial_path,final_path,"
      "offered_bytes,delivered_bytes,dropped_bytes,blackout_ms,loss_pct\n";
  for (const auto& [id, st] : m.flows) {
    out += std::to_string(id) + "," + st.demand.src.value + "," +
           st.demand.dst.value + "," + fixed6(st.demand.rate_mbps) + "," +
           (st.admitted ? "1" : "0") + "," + (st.satisfied ? "1" : "0") + "," +
           st.initial_path + "," + st.final_path + "," +
           fixed6(st.offered_bytes) + "," + fixed6(st.delivered_bytes) + "," +
           fixed6(st.dropped_bytes) + "," + format_ms(st.blackout) + "," +
           fixed6(100.0 * st.loss_fraction()) + "\n";
  }
  return out;
}

std::string metrics_json(const std::string& key, const Metrics& m) {
  ojson root;
  root["scenario"] = key;
  root["satisfied"] = m.satisfied_count;
  root["max_load"] = m.max_load;
  ojson recoveries = ojson::array();
  for (const auto& r : m.recoveries) {
    recoveries.push_back({{"link", to_string(r.link)},
                          {"failed_at_ms", to_ms(r.failed_at)},
                          {"detected_at_ms", to_ms(r.detected_at)},
                          {"committed_at_ms", to_ms(r.committed_at)},
                          {"rd_ms", to_ms(r.rd())},
                          {"detection_ms", to_ms(r.detection)},
                          {"hc_ms", to_ms(r.hc)},
                          {"hs_ms", to_ms(r.hs)},
                          {"rtt_ms", to_ms(r.rtt)},
                          {"affected_flows", r.affected_flows},
                          {"complete", r.complete}});
  }
  root["recoveries"] = recoveries;
  root["blackholed"] = m.blackholed;
  ojson flows = ojson::array();
  for (const auto& [id, st] : m.flows) {
    flows.push_back({{"flow_id", id},
                     {"src", st.demand.src.value},
                     {"dst", st.demand.dst.value},
                     {"rate_mbps", st.demand.rate_mbps},
                     {"admitted", st.admitted},
                     {"satisfied", st.satisfied},
                     {"initial_path", st.initial_path},
                     {"final_path", st.final_path},
                     {"offered_bytes", st.offered_bytes},
                     {"delivered_bytes", st.delivered_bytes},
                     {"dropped_bytes", st.dropped_bytes},
                     {"loss_pct", 100.0 * st.loss_fraction()}});
  }
  root["flows"] = flows;
  ojson series = ojson::array();
  for (const auto& p : m.load_series) {
    series.push_back({{"time_ms", to_ms(p.time)}, {"load", p.load}});
  }
  root["load_series"] = series;
  return root.dump(2) + "\n";
}

std::string events_log(const std::vector<std::string>& log) {
  std::string out;
  for (const auto& line : log) out += line + "\n";
  return out;
}

RunArtifacts run_scenario(const Scenario& scenario, const fs::path& out_dir) {
  SimInput input = to_sim_input(scenario);
  ensure_dir(out_dir);
  RunArtifacts artifacts;
  artifacts.result = run(input);
  artifacts.row = make_report_row(scenario.name, artifacts.result.metrics);
  write_file(out_dir / "events.log", events_log(artifacts.result.log));
  write_file(out_dir / "metrics.csv", metrics_csv(artifacts.result.metrics));
  write_file(out_dir / "metrics.json",
             metrics_json(scenario.name, artifacts.result.metrics));
  return artifacts;
}

std::string cell_dir_name(double q0, double alpha) {
  return "q0_" + fixed6(q0) + "_alpha_" + fixed6(alpha);
}

std::string SweepGrid::csv() const {
  std::string out = "q0/alpha";
  for (double a : alphas) out += "," + fixed6(a);
  out += "\n";
  for (std::size_t i = 0; i < q0s.size(); ++i) {
    out += fixed6(q0s[i]);
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const SweepCell& cell = at(i, j);
      out += ",";
      out += cell.row ? std::to_string(cell.row->satisfied) : "invalid";
    }
    out += "\n";
  }
  return out;
}

SweepGrid run_sweep(const SweepSpec& spec, const fs::path& out_dir) {
  if (spec.q0s.empty() || spec.alphas.empty()) {
    throw Error(ErrorKind::InvalidArgument, "sweep needs nonempty q0 and alpha lists");
  }
  ensure_dir(out_dir);

  SweepGrid grid;
  grid.q0s = spec.q0s;
  grid.alphas = spec.alphas;

  std::vector<std::future<SweepCell>> pending;
  for (double q0 : spec.q0s) {
    for (double alpha : spec.alphas) {
      pending.push_back(std::async(std::launch::async, [&spec, &out_dir, q0, alpha] {
        SweepCell cell{q0, alpha, std::nullopt, {}};
        try {
          Scenario s = spec.base;
          s.weights = WeightParams::from_q0(q0, alpha);
          s.name = spec.base.name + "/" + cell_dir_name(q0, alpha);
          cell.row = run_scenario(s, out_dir / cell_dir_name(q0, alpha)).row;
        } catch (const Error& err) {
          cell.error = err.what();
        }
        return cell;
      }));
    }
  }
  for (auto& f : pending) grid.cells.push_back(f.get());
  write_file(out_dir / "grid.csv", grid.csv());
  return grid;
}

}  // namespace sdffr
