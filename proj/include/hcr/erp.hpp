#pragma once

#include "hcr/geometry.hpp"
#include "hcr/pef.hpp"
#include "hcr/safe_distance.hpp"
#include "hcr/world.hpp"

#include <array>
#include <limits>
#include <vector>

namespace hcr {

/// CM_1(alpha) = 1 + (3a^2 + 4a - 3) / ((a - 1)^2 (a - 3)). Requires alpha > 3.
double cm1(double alpha);

/// 1 + the smaller of the two CM_1 fractions. Requires both alphas > 3.
double cm2(double alpha1, double alpha2);

/// (5a^2 - 9a + 8) / ((a - 1)(a - 2)^2), the on-manifold bound on r / kappa.
double relaxed_bound(double alpha);

/// Safe distance required for one pursuer: (2 pi r / (alpha - 1)) / (r / kappa - CM_1).
double threshold_1v1(double alpha, double r, double kappa);

/// min over i' of max over i of
/// (2 pi r_i v_i' / ((alpha_i' - 1) v_i)) / (r_i / kappa_i - CM_2).
double threshold_2v1(const CoalitionState& X);

enum class Verdict { ErpWin1v1, ErpWin2v1, NotCertified };
enum class Theorem { None, OneVsOne, TwoVsOne_Scenario1, TwoVsOne_Scenario2, Relaxed };

const char* to_string(Verdict v) noexcept;
const char* to_string(Theorem t) noexcept;

struct WinningParams {
  double alpha = 0.0;
  double r_over_kappa = 0.0;
  double cm_bound = std::numeric_limits<double>::infinity();
  double margin = -std::numeric_limits<double>::infinity();  ///< r_over_kappa - cm_bound

  bool passes() const { return alpha > 3.0 && margin > 0.0; }
};

WinningParams winning_params(const PursuerState& p, const EvaderState& e);

struct Certificate {
  Verdict winner = Verdict::NotCertified;
  int pursuer_index = -1;  ///< coalition index of the winning pursuer for ErpWin1v1
  double threshold = std::numeric_limits<double>::infinity();
  double observed_rho = 0.0;
  Theorem which = Theorem::None;
  std::vector<WinningParams> params;  ///< one per coalition member
  std::vector<int> supports;          ///< support constraints (two-pursuer checks only)
  EnclosureSolution solution;

  bool certified() const { return winner != Verdict::NotCertified; }
};

/// Heading tolerance deciding the on-manifold branch of the strategy.
inline constexpr double kDefaultAlignTol = 1e-6;

struct StrategyConfig {
  double eps_align = kDefaultAlignTol;
  /// Control period. When positive, headings within one step of sigma are
  /// steered onto it exactly instead of chattering between the extremes.
  double dt = 0.0;
};

/// With relaxed = true, a state already aimed at x_I with positive safe
/// distance is also certified under the relaxed parameter bound.
Certificate certify_1v1(const PairState& pair, const GoalRegion& G, bool relaxed = false,
                        const NumericConfig& cfg = {}, double eps_align = kDefaultAlignTol);

Certificate certify_2v1(const CoalitionState& X, const GoalRegion& G, bool relaxed = false,
                        const NumericConfig& cfg = {}, double eps_align = kDefaultAlignTol);

struct HeadingTarget {
  std::vector<double> sigma;  ///< radians in [0, 2 pi), one per pursuer
};

HeadingTarget sigma_heading(const CoalitionState& X, const EnclosureSolution& sol);

/// d(x_I)/dt for one active pursuer constraint and arbitrary player velocities.
Vec2 xI_velocity_1v1(const EnclosureSolution& sol, const PairState& pair, const GoalRegion& G,
                     const Vec2& pursuer_velocity, const Vec2& evader_velocity);

/// Same, with the pursuer moving along its current heading at full speed.
Vec2 xI_velocity_1v1(const EnclosureSolution& sol, const PairState& pair, const GoalRegion& G,
                     const Vec2& evader_velocity);

/// d(x_I)/dt for two active pursuer constraints and arbitrary velocities.
Vec2 xI_velocity_2v1(const EnclosureSolution& sol, const CoalitionState& X,
                     const std::array<Vec2, 2>& pursuer_velocities, const Vec2& evader_velocity);

/// Same, with both pursuers moving along their current headings at full speed.
Vec2 xI_velocity_2v1(const EnclosureSolution& sol, const CoalitionState& X, const Vec2& evader_velocity);

/// Turn control keeping the heading on the ray to x_I: -(kappa / v) e_IP^o' xdot_I / d_IP.
double manifold_control(const PursuerState& p, const Vec2& x_I, const Vec2& xI_velocity);

/// Strategy switch: on-manifold control when aligned, else full turn toward sigma.
double steer_control(const PursuerState& p, double sigma, double u_manifold, const StrategyConfig& scfg);

/// Full turn toward sigma; sgn(0) resolves to +1.
double bang_bang(double sigma, double heading);

double pursuit_control_1v1(const PairState& pair, const EnclosureSolution& sol, const GoalRegion& G,
                           const Vec2& evader_control, const StrategyConfig& scfg = {});

double pursuit_control_1v1(const PairState& pair, const GoalRegion& G, const Vec2& evader_control,
                           const StrategyConfig& scfg = {}, const NumericConfig& cfg = {});

std::array<double, 2> pursuit_control_2v1(const CoalitionState& X, const EnclosureSolution& sol,
                                          const GoalRegion& G, const Vec2& evader_control,
                                          const StrategyConfig& scfg = {});

std::array<double, 2> pursuit_control_2v1(const CoalitionState& X, const GoalRegion& G,
                                          const Vec2& evader_control, const StrategyConfig& scfg = {},
                                          const NumericConfig& cfg = {});

}  // namespace hcr
