#include "hcr/pef.hpp"

#include "hcr/detail/scalar_search.hpp"
#include "hcr/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace hcr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kGrid = 256;

}  // namespace

void PairState::validate() const {
  pursuer.validate();
  evader.validate();
  if (!(alpha() > 1.0)) throw Error(Errc::InvalidState, "PairState: pursuer must be faster than the evader");
  if (!((pursuer.pos - evader.pos).norm() > pursuer.capture_radius)) {
    throw Error(Errc::InvalidState, "PairState: evader within capture radius");
  }
}

double Pef::boundary_radius(double psi, const PairState& X) const {
  const Vec2 e = polar_dir(psi);
  auto f = [&](double rho) { return value(X.evader.pos + rho * e, X); };
  double lo = 0.0;
  double hi = std::max(1.0, (X.pursuer.pos - X.evader.pos).norm());
  for (int i = 0; i < 200 && f(hi) >= 0.0; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  if (f(hi) >= 0.0) throw Error(Errc::MaxIterExceeded, "Pef::boundary_radius: enclosure unbounded along ray");
  const auto root = detail::brent_root(f, lo, hi);
  return root ? *root : 0.5 * (lo + hi);
}

double Pef::boundary_radius_derivative(double psi, const PairState& X) const {
  const Vec2 e = polar_dir(psi);
  const Vec2 e_perp(-e.y(), e.x());
  const double rho = boundary_radius(psi, X);
  const Vec2 fx = gradients(X.evader.pos + rho * e, X).f_x;
  const double radial = fx.dot(e);
  if (radial == 0.0) throw Error(Errc::DegenerateDenominator, "boundary_radius_derivative: tangential ray");
  return -rho * fx.dot(e_perp) / radial;
}

double PositionalPef::value(const Vec2& x, const PairState& X) const { return positional_value(x, X); }

PefGradients PositionalPef::gradients(const Vec2& x, const PairState& X) const {
  return positional_gradients(x, X);
}

double PositionalPef::boundary_radius(double psi, const PairState& X) const {
  return hcr::boundary_radius(psi, 0.0, X);
}

const Pef& positional_pef() {
  static const PositionalPef instance;
  return instance;
}

double positional_value(const Vec2& x, const PairState& X) {
  return (x - X.pursuer.pos).norm() - X.alpha() * (x - X.evader.pos).norm() - X.pursuer.capture_radius;
}

PefGradients positional_gradients(const Vec2& x, const PairState& X) {
  constexpr double eps = 1e-12;
  const Vec2 dp = x - X.pursuer.pos;
  const Vec2 de = x - X.evader.pos;
  const double np = dp.norm();
  const double ne = de.norm();
  if (np <= eps || ne <= eps) {
    throw Error(Errc::InvalidArgument, "positional_gradients: x coincides with a player position");
  }
  const double alpha = X.alpha();
  PefGradients g;
  g.f_P = -dp / np;
  g.f_E = alpha * de / ne;
  g.f_x = -g.f_P - g.f_E;
  g.f_theta = 0.0;
  return g;
}

double boundary_radius(double psi, double psi0, const PairState& X) {
  const double alpha = X.alpha();
  const double r = X.pursuer.capture_radius;
  const Vec2 w = X.evader.pos - X.pursuer.pos;
  const double k = alpha * alpha - 1.0;
  const double c = w.squaredNorm() - r * r;
  const double h1 = w.dot(polar_dir(psi, psi0)) - alpha * r;
  const double h2 = std::sqrt(h1 * h1 + k * c);
  // Both forms are algebraically equal; pick the one without cancellation.
  if (h1 >= 0.0) return (h1 + h2) / k;
  return c / (h2 - h1);
}

Vec2 project_to_enclosure(const Vec2& z, const PairState& X, const Pef& pef, const NumericConfig& cfg) {
  if (pef.value(z, X) >= 0.0) return z;
  const Vec2& xe = X.evader.pos;
  auto dist2 = [&](double psi) { return (z - pef.boundary_point(psi, X)).squaredNorm(); };
  auto slope = [&](double psi) {
    const Vec2 e = polar_dir(psi);
    const Vec2 e_perp(-e.y(), e.x());
    const double rho = pef.boundary_radius(psi, X);
    const double drho = pef.boundary_radius_derivative(psi, X);
    return -(z - xe - rho * e).dot(drho * e + rho * e_perp);
  };

  const double h = kTwoPi / kGrid;
  int best = 0;
  double best_val = dist2(0.0);
  for (int k = 1; k < kGrid; ++k) {
    const double v = dist2(k * h);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  const double a = (best - 1) * h;
  const double b = (best + 1) * h;
  const auto root = detail::brent_root(slope, a, b, 1e-15, cfg.max_iter);
  const auto [gpsi, gval] = detail::golden_min(dist2, a, b, 1e-14, std::min(cfg.max_iter, 300));
  // The slope root is exact; golden section only wins by more than rounding
  // on a flat minimum, which places psi poorly.
  double psi = gpsi;
  if (root && dist2(*root) <= gval + 1e-12 * (1.0 + gval)) psi = *root;
  return pef.boundary_point(psi, X);
}

}  // namespace hcr
