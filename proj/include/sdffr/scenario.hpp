#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdffr/sim_engine.hpp"
#include "sdffr/topology.hpp"
#include "sdffr/weighting.hpp"

namespace sdffr {

inline constexpr int kScenarioSchemaVersion = 1;

struct LinkSpec {
  NodeId u;
  NodeId v;
  LinkKind kind = LinkKind::Wired;
  double capacity_mbps = 0.0;
  double prop_delay_ms = 0.0;

  bool operator==(const LinkSpec&) const = default;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  double duration_ms = 0.0;
  std::uint64_t seed = 1;
  WeightParams weights;
  DelayModel delays;
  std::vector<NodeId> nodes;
  std::vector<LinkSpec> links;
  std::vector<TimedAction> events;

  bool operator==(const Scenario&) const = default;
};

/// Throws Validation with the failing constraint and its field path.
void validate(const Scenario& scenario);

NetworkGraph build_graph(const Scenario& scenario);
SimInput to_sim_input(const Scenario& scenario);

/// Parses JSON text; `origin` prefixes diagnostics (usually the file path).
Scenario parse_scenario(const std::string& text,
                        const std::string& origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize(const Scenario& scenario);

struct ReportRow {
  std::string key;
  std::size_t satisfied = 0;
  double max_load = 0.0;
  std::vector<double> rd_ms;
  std::vector<double> loss_pct;  // per admitted flow, flow id order

  static std::string csv_header();
  std::string csv() const;
};

ReportRow make_report_row(const std::string& key, const Metrics& metrics);

/// Per-flow CSV (fixed header and six-decimal numbers).
std::string metrics_csv(const Metrics& metrics);
std::string metrics_json(const std::string& key, const Metrics& metrics);
std::string events_log(const std::vector<std::string>& log);

struct RunArtifacts {
  ReportRow row;
  RunResult result;
};

/// Runs and writes events.log, metrics.csv and metrics.json into `out_dir`.
RunArtifacts run_scenario(const Scenario& scenario,
                          const std::filesystem::path& out_dir);

struct SweepSpec {
  Scenario base;
  std::vector<double> q0s;
  std::vector<double> alphas;
};

struct SweepCell {
  double q0 = 0.0;
  double alpha = 0.0;
  std::optional<ReportRow> row;
  std::string error;  // set when the cell could not run
};

struct SweepGrid {
  std::vector<double> q0s;
  std::vector<double> alphas;
  std::vector<SweepCell> cells;  // row-major: q0 outer, alpha inner

  const SweepCell& at(std::size_t q0_index, std::size_t alpha_index) const {
    return cells[q0_index * alphas.size() + alpha_index];
  }
  std::string csv() const;
};

/// One run per (q0, alpha) cell, concurrently, each in its own
/// subdirectory; writes grid.csv with q0 rows and alpha columns. Invalid
/// cells are reported, not fatal.
SweepGrid run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

std::string cell_dir_name(double q0, double alpha);

}  // namespace sdffr
