#pragma once

#include "crowdctl/control.hpp"
#include "crowdctl/field.hpp"
#include "crowdctl/minimal_time.hpp"
#include "crowdctl/pipeline.hpp"
#include "crowdctl/region.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace crowdctl {

/// Numeric settings of a scenario. All quantities are in dimensionless model units.
struct ScenarioParams {
  double step = 1e-3;
  double t_max = 100.0;
  double delta = 0.1;
  double epsilon = 1e-2;
  std::optional<BoxX> working_box;  // default: cube of half-width 1e6
  double interior_margin = ConvexRegion::kDefaultInteriorMargin;
  double boundary_tol = ConvexRegion::kDefaultBoundaryTol;
  int output_stride = 10;
  std::uint64_t seed = 0;
};

struct Scenario {
  Index dimension = 0;
  VectorField field;
  ConvexRegion region;
  Configuration initial;
  Configuration target;
  ScenarioParams params;

  FlowSettings flow_settings() const;
  PlannerParams planner_params() const;
};

/// Parses and validates a scenario document; defaults are applied to missing params.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON form (defaults filled in).
nlohmann::json scenario_to_json(const Scenario& scenario);

/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);

nlohmann::json report_to_json(const MinimalTimeReport& report);
MinimalTimeReport report_from_json(const nlohmann::json& doc);

nlohmann::json plan_to_json(const ControlPlan& plan);
ControlPlan plan_from_json(const nlohmann::json& doc);

/// Plan file contents: the plan, the report that produced it and the scenario hash.
struct PlanFile {
  std::string scenario_hash;
  ControlMode mode = ControlMode::Exact;
  MinimalTimeReport report;
  ControlPlan plan;
};

nlohmann::json plan_file_to_json(const PlanFile& file);
PlanFile plan_file_from_json(const nlohmann::json& doc);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// CSV rows `t,agent,x0,...,x{d-1}` with 17 significant digits.
std::string trajectory_csv(const SimulationResult& result);

nlohmann::json simulation_summary(const ControlPlan& plan, const SimulationResult& result);

}  // namespace crowdctl
