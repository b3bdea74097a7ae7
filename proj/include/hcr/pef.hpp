#pragma once

#include "hcr/geometry.hpp"
#include "hcr/world.hpp"

namespace hcr {

/// One pursuer against one evader.
struct PairState {
  PursuerState pursuer;
  EvaderState evader;

  double alpha() const { return speed_ratio(pursuer, evader); }
  /// Checks both players and the separation ||x_P - x_E|| > r.
  void validate() const;
};

struct PefGradients {
  Vec2 f_x = Vec2::Zero();
  Vec2 f_P = Vec2::Zero();
  double f_theta = 0.0;
  Vec2 f_E = Vec2::Zero();
};

/// Pursuit enclosure function. The enclosure {x : f(x) >= 0} must be compact,
/// strictly convex, contain x_E and be star-shaped about it.
class Pef {
 public:
  virtual ~Pef() = default;

  virtual double value(const Vec2& x, const PairState& X) const = 0;
  virtual PefGradients gradients(const Vec2& x, const PairState& X) const = 0;

  /// Distance from x_E to the zero level set along direction psi. The default
  /// bisects f along the ray.
  virtual double boundary_radius(double psi, const PairState& X) const;

  /// d(rho)/d(psi) from implicit differentiation of f(x_E + rho e) = 0.
  double boundary_radius_derivative(double psi, const PairState& X) const;

  Vec2 boundary_point(double psi, const PairState& X) const {
    return X.evader.pos + boundary_radius(psi, X) * polar_dir(psi);
  }
};

/// f = ||x - x_P|| - alpha ||x - x_E|| - r.
class PositionalPef final : public Pef {
 public:
  double value(const Vec2& x, const PairState& X) const override;
  PefGradients gradients(const Vec2& x, const PairState& X) const override;
  double boundary_radius(double psi, const PairState& X) const override;
};

/// Shared stateless instance.
const Pef& positional_pef();

double positional_value(const Vec2& x, const PairState& X);

/// Throws InvalidArgument when x coincides with x_P or x_E.
PefGradients positional_gradients(const Vec2& x, const PairState& X);

/// Closed-form polar boundary rho = (h1 + h2) / (alpha^2 - 1) along angle psi + psi0.
double boundary_radius(double psi, double psi0, const PairState& X);

/// Euclidean projection of z onto {f >= 0}.
Vec2 project_to_enclosure(const Vec2& z, const PairState& X, const Pef& pef = positional_pef(),
                          const NumericConfig& cfg = {});

}  // namespace hcr
