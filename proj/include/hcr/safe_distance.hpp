#pragma once

#include "hcr/geometry.hpp"
#include "hcr/pef.hpp"
#include "hcr/world.hpp"

#include <utility>
#include <vector>

namespace hcr {

/// A pursuit coalition against one evader.
struct CoalitionState {
  std::vector<PursuerState> pursuers;
  EvaderState evader;

  std::size_t size() const { return pursuers.size(); }
  PairState pair(std::size_t i) const { return {pursuers.at(i), evader}; }
  double alpha(std::size_t i) const { return speed_ratio(pursuers.at(i), evader); }
  CoalitionState subset(const std::vector<int>& indices) const;

  /// Nonempty, valid players, evader outside every capture radius.
  void validate() const;
};

/// Closest pair between the enclosure region and the goal region.
struct EnclosureSolution {
  Vec2 x_I = Vec2::Zero();
  Vec2 x_G = Vec2::Zero();
  double rho = 0.0;
  std::vector<int> active;       ///< coalition indices with |f_i(x_I)| <= eps_active
  std::vector<double> lambdas;   ///< one per coalition member; zero when inactive
  double lambda_g = 0.0;
  bool multipliers_valid = false;
};

enum class SolverMethod {
  BoundarySearch,         ///< minimise the goal distance along the enclosure boundary
  AlternatingProjections  ///< alternate projections, Dykstra for the intersection
};

EnclosureSolution solve_safe_distance(const CoalitionState& X, const GoalRegion& G,
                                      const NumericConfig& cfg = {},
                                      SolverMethod method = SolverMethod::BoundarySearch,
                                      const Pef& pef = positional_pef());

/// Fills lambdas and lambda_g from stationarity at (x_I, x_G).
EnclosureSolution recover_multipliers(EnclosureSolution sol, const CoalitionState& X, const GoalRegion& G,
                                      const Pef& pef = positional_pef());

/// Time derivative of the safe distance for the given pursuer turn controls
/// and evader control, by the envelope formula over the active constraints.
double safe_distance_rate(const EnclosureSolution& sol, const CoalitionState& X, const GoalRegion& G,
                          const std::vector<double>& pursuer_controls, const Vec2& evader_control,
                          const Pef& pef = positional_pef());

/// Same rate with explicit player velocities: pursuer i moves at xdot_P[i]
/// with heading rate theta_dot[i], the evader at xdot_E.
double safe_distance_rate(const EnclosureSolution& sol, const CoalitionState& X,
                          const std::vector<Vec2>& xdot_P, const std::vector<double>& theta_dot,
                          const Vec2& xdot_E, const Pef& pef = positional_pef());

struct Reduction {
  std::vector<int> indices;  ///< size 1 or 2
  double value = 0.0;        ///< program value of the subcoalition
  double full_value = 0.0;
};

/// Smallest subcoalition (singletons first, then pairs) whose program value
/// matches the full coalition. NotApplicable when the full value is zero.
Reduction reduce_coalition(const CoalitionState& X, const GoalRegion& G, const NumericConfig& cfg = {},
                           double tol = 1e-6);

/// Indices whose removal lowers the program value by more than tol.
std::vector<int> support_constraints(const CoalitionState& X, const GoalRegion& G,
                                     const NumericConfig& cfg = {}, double tol = 1e-7);

}  // namespace hcr
