#pragma once

#include "hcr/allocation.hpp"
#include "hcr/erp.hpp"
#include "hcr/world.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hcr {

enum class EvaderPolicy { GreedyToGoal, ConstantHeading, Scripted, RandomWalk };

const char* to_string(EvaderPolicy p) noexcept;

struct ScriptStep {
  double t = 0.0;  ///< control applies from this time on
  Vec2 u = Vec2::Zero();

  bool operator==(const ScriptStep&) const = default;
};

struct EvaderStrategySpec {
  EvaderPolicy kind = EvaderPolicy::GreedyToGoal;
  double heading = 0.0;           ///< ConstantHeading direction, radians
  std::vector<ScriptStep> script;  ///< Scripted, sorted by t
  double sigma = 1.0;              ///< RandomWalk heading diffusion, rad / sqrt(s)

  bool operator==(const EvaderStrategySpec&) const = default;
};

/// What an evader sees when choosing its control.
struct WorldSnapshot {
  double t = 0.0;
  std::span<const PursuerState> pursuers;
  std::span<const EvaderState> evaders;
  const GoalRegion* goal = nullptr;
  int self = 0;
};

class EvaderStrategy {
 public:
  virtual ~EvaderStrategy() = default;
  /// Returns a control with norm <= 1.
  virtual Vec2 control(const WorldSnapshot& w) = 0;
};

/// RandomWalk draws from std::mt19937_64 seeded with seed + index.
std::unique_ptr<EvaderStrategy> make_evader_strategy(const EvaderStrategySpec& spec, std::uint64_t seed,
                                                     int index, double dt);

struct Scenario {
  std::string name;
  std::vector<std::string> pursuer_ids;
  std::vector<PursuerState> pursuers;
  std::vector<std::string> evader_ids;
  std::vector<EvaderState> evaders;
  std::vector<EvaderStrategySpec> strategies;  ///< one per evader
  GoalRegion goal = GoalRegion::disk(Vec2::Zero(), 1.0);
  double dt = 0.005;
  double max_time = 60.0;
  ZMode z_mode = ZMode::Zero;
  NumericConfig numeric;
  std::uint64_t seed = 0;
  bool relaxed = true;    ///< accept on-manifold 1v1 states under the relaxed bound
  unsigned threads = 1;   ///< certification workers per tick
  std::vector<double> snapshot_times;  ///< enclosure snapshots in the plot

  void validate() const;
};

struct EdgeRecord {
  std::vector<int> coalition;
  int evader = -1;
  double rho = 0.0;
  Theorem which = Theorem::None;
  bool committed = false;  ///< kept from the previous tick while rho > 0
};

struct TickRecord {
  double t = 0.0;
  std::vector<Vec2> pursuer_pos;
  std::vector<double> pursuer_heading;
  std::vector<double> pursuer_u;
  std::vector<Vec2> evader_pos;
  std::vector<Vec2> evader_u;
  std::vector<EvaderStatus> evader_status;
  std::vector<EdgeRecord> edges;
  std::vector<int> matched;  ///< indices into edges
};

enum class EventKind { Capture, Arrival, MatchChange, SolverFailure };

const char* to_string(EventKind k) noexcept;

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::Capture;
  std::vector<std::string> actors;
  std::string detail;
};

struct TrajectoryLog {
  std::vector<std::string> pursuer_ids;
  std::vector<std::string> evader_ids;
  std::vector<TickRecord> ticks;
  std::vector<Event> events;
};

/// Receding-horizon loop: certify, allocate, act, integrate, retire.
TrajectoryLog run_simulation(const Scenario& s);

/// Pure pursuit toward the target bearing. With dt > 0, a bearing error
/// smaller than one step of turning is removed exactly.
double fallback_pursuit(const PursuerState& p, const EvaderState& target, double dt = 0.0);

/// Label of a coalition-evader edge, e.g. "P1+P2-E1".
std::string edge_label(const std::vector<int>& coalition, int evader, const std::vector<std::string>& pursuer_ids,
                       const std::vector<std::string>& evader_ids);

}  // namespace hcr
