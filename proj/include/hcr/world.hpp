#pragma once

#include "hcr/geometry.hpp"

#include <functional>
#include <span>
#include <variant>

namespace hcr {

/// Dubins-car pursuer: constant speed, turn rate bounded by v_max / kappa.
struct PursuerState {
  Vec2 pos = Vec2::Zero();
  double heading = 0.0;  ///< radians, kept in [0, 2*pi)
  double v_max = 1.0;
  double kappa = 1.0;           ///< minimum turning radius
  double capture_radius = 1.0;

  void validate() const;
};

enum class EvaderStatus { Active, Captured, Arrived };

/// Simple-motion evader.
struct EvaderState {
  Vec2 pos = Vec2::Zero();
  double v_max = 1.0;
  EvaderStatus status = EvaderStatus::Active;

  void validate() const;
};

/// Speed ratio v_P / v_E between a pursuer and an evader.
inline double speed_ratio(const PursuerState& p, const EvaderState& e) {
  return p.v_max / e.v_max;
}

/// Value, gradient and Hessian of the goal function g at a point.
struct GoalSample {
  double g = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

/// Convex goal region {y : g(y) <= 0}.
class GoalRegion {
 public:
  struct Disk {
    Vec2 center = Vec2::Zero();
    double radius = 1.0;
  };
  /// Axis-aligned ellipse ((y-c)_x / a)^2 + ((y-c)_y / b)^2 <= 1.
  struct Ellipse {
    Vec2 center = Vec2::Zero();
    Vec2 semi_axes = Vec2::Ones();
  };
  /// User-supplied g with derivatives. Callables must be reentrant; `interior`
  /// must satisfy g(interior) < 0 and seeds the projection ray march.
  struct Custom {
    std::function<double(const Vec2&)> g;
    std::function<Vec2(const Vec2&)> grad;
    std::function<Mat2(const Vec2&)> hess;
    Vec2 interior = Vec2::Zero();
  };
  using Kind = std::variant<Disk, Ellipse, Custom>;

  static GoalRegion disk(const Vec2& center, double radius);
  static GoalRegion ellipse(const Vec2& center, const Vec2& semi_axes);
  static GoalRegion custom(Custom region);

  const Kind& kind() const noexcept { return kind_; }

  GoalSample eval(const Vec2& y) const;
  double value(const Vec2& y) const;

 private:
  explicit GoalRegion(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

GoalSample goal_eval(const GoalRegion& goal, const Vec2& y);

/// Euclidean projection onto the goal region. Points inside are returned as is.
Vec2 project_to_goal(const GoalRegion& goal, const Vec2& z, const NumericConfig& cfg = {});

double distance_to_goal(const GoalRegion& goal, const Vec2& z, const NumericConfig& cfg = {});

/// Central-difference check of grad/hess against g at the given points.
bool goal_derivatives_consistent(const GoalRegion& goal, std::span<const Vec2> points,
                                 double tol = 1e-5);

/// Advances the pursuer by dt under constant control u, integrating the arc exactly.
PursuerState step_pursuer(const PursuerState& s, double u, double dt);

EvaderState step_evader(const EvaderState& s, const Vec2& u, double dt);

/// True iff the evader lies within the pursuer's capture radius (inclusive).
bool capture_check(const PursuerState& p, const EvaderState& e);

}  // namespace hcr
