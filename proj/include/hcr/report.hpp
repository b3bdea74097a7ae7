#pragma once

#include "hcr/allocation.hpp"
#include "hcr/engine.hpp"

#include <filesystem>
#include <string>

namespace hcr {

/// Certification of every coalition against every evader at the initial state.
struct CheckResult {
  GameGraph graph;  ///< rejected candidates included
  Matching matching;
  bool covers_all = false;  ///< every active evader has a certified assignment
};

CheckResult check_scenario(const Scenario& s);

/// Per-edge {coalition, evader, alpha, r, kappa, cm, threshold, rho, verdict, theorem}.
std::string certificate_report_json(const Scenario& s, const CheckResult& check);

/// Graph edges, conflicts and the optimal matching.
std::string allocation_json(const Scenario& s, const CheckResult& check);

/// Array of {t, kind, actors}.
std::string events_json(const TrajectoryLog& log);

/// One row per tick; edge columns cover every coalition-evader pair and are
/// empty when the edge is absent on that tick.
std::string trajectory_csv(const Scenario& s, const TrajectoryLog& log);

/// Goal, trajectories, capture circles and enclosure snapshots.
std::string plot_svg(const Scenario& s, const TrajectoryLog& log);

/// Writes trajectory.csv, events.json, plot.svg and certificate_report.json
/// into dir. Files already written are removed if a later step fails.
void write_run_outputs(const Scenario& s, const TrajectoryLog& log, const CheckResult& check,
                       const std::filesystem::path& dir);

}  // namespace hcr
