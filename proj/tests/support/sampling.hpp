#pragma once

// Random state generators shared by the test binaries.

#include <hcr/erp.hpp>
#include <hcr/error.hpp>
#include <hcr/safe_distance.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace sampling {

using namespace hcr;

inline constexpr double kPi = std::numbers::pi;

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  double angle() { return uni(0.0, 2.0 * std::numbers::pi); }
  Vec2 on_circle(double radius) {
    const double a = angle();
    return radius * Vec2(std::cos(a), std::sin(a));
  }
  // Admissible evader control, norm in [0, 1].
  Vec2 control() { return uni(0.0, 1.0) * polar_dir(angle()); }
};

inline PursuerState pursuer(const Vec2& pos, double heading, double v, double kappa, double r) {
  PursuerState p;
  p.pos = pos;
  p.heading = heading;
  p.v_max = v;
  p.kappa = kappa;
  p.capture_radius = r;
  return p;
}

inline EvaderState evader(const Vec2& pos, double v = 1.0) {
  EvaderState e;
  e.pos = pos;
  e.v_max = v;
  return e;
}

struct Sample1v1 {
  PairState pair;
  GoalRegion goal = GoalRegion::disk(Vec2::Zero(), 1.0);
  EnclosureSolution sol;
};

struct Sample2v1 {
  CoalitionState X;
  GoalRegion goal = GoalRegion::disk(Vec2::Zero(), 1.0);
  EnclosureSolution sol;
};

// Pursuer between the evader and the goal, heading aimed at x_I.
// r_over_kappa is drawn as factor * bound(alpha).
// With tight set, parameters sit near the bound and players near the goal
// and each other, which is where the turn-rate bound is sharpest.
template <class Bound>
inline std::optional<Sample1v1> draw_1v1(Rng& rng, Bound bound, double fmin, double fmax, bool tight = false) {
  const double R = rng.uni(5.0, 30.0);
  const double alpha = tight ? rng.uni(3.02, 8.0) : rng.uni(3.3, 6.0);
  const double kappa = tight ? rng.uni(0.05, 3.0) : rng.uni(0.2, 2.0);
  const double r = kappa * bound(alpha) * rng.uni(fmin, fmax);
  const Vec2 c = rng.on_circle(rng.uni(0.0, 20.0));
  const double D = R + (tight ? rng.uni(0.1, 40.0) : rng.uni(10.0, 120.0));
  const double a = rng.angle();
  const Vec2 xE = c + D * polar_dir(a);
  const double off = tight ? rng.uni(-kPi, kPi) : rng.uni(-1.0, 1.0);
  const double dPE = tight ? r + rng.uni(0.01, 30.0) : rng.uni(r + 0.5, std::max(r + 1.0, 0.9 * D));
  const Vec2 xP = xE + dPE * polar_dir(a + std::numbers::pi + off);
  Sample1v1 s;
  s.goal = GoalRegion::disk(c, R);
  s.pair = {pursuer(xP, 0.0, alpha, kappa, r), evader(xE)};
  try {
    s.sol = solve_safe_distance(CoalitionState{{s.pair.pursuer}, s.pair.evader}, s.goal);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!(s.sol.rho > 0.0) || s.sol.active.size() != 1) return std::nullopt;
  s.pair.pursuer.heading = heading_of(s.sol.x_I - xP);
  return s;
}

// Certified under the 1v1 theorem (threshold), aligned.
inline Sample1v1 certified_1v1(Rng& rng) {
  for (;;) {
    auto s = draw_1v1(rng, [](double a) { return cm1(a); }, 1.1, 2.5);
    if (!s) continue;
    const double thr = threshold_1v1(s->pair.alpha(), s->pair.pursuer.capture_radius, s->pair.pursuer.kappa);
    if (s->sol.rho > thr) return *s;
  }
}

// Satisfies the relaxed parameter bound, aligned, positive safe distance.
inline Sample1v1 relaxed_1v1(Rng& rng, bool tight = false) {
  for (;;) {
    auto s = draw_1v1(rng, [](double a) { return relaxed_bound(a); }, 1.0, tight ? 1.1 : 2.0, tight);
    if (s) return *s;
  }
}

// Two pursuers flanking the evader-goal line with both constraints active.
// When certified is set the state must also pass the two-pursuer theorem.
inline Sample2v1 draw_2v1(Rng& rng, bool certified, bool tight = false) {
  for (;;) {
    const double R = rng.uni(5.0, 30.0);
    const Vec2 c = rng.on_circle(rng.uni(0.0, 20.0));
    const double D = R + (tight ? rng.uni(0.5, 60.0) : rng.uni(30.0, 150.0));
    const double a = rng.angle();
    const Vec2 xE = c + D * polar_dir(a);
    CoalitionState X;
    X.evader = evader(xE);
    const double lo = tight ? 3.02 : 3.3;
    const double hi = tight ? 8.0 : 6.0;
    std::array<double, 2> alpha{rng.uni(lo, hi), rng.uni(lo, hi)};
    const double bound = cm2(alpha[0], alpha[1]);
    for (int i = 0; i < 2; ++i) {
      const double kappa = tight ? rng.uni(0.05, 3.0) : rng.uni(0.2, 2.0);
      const double r = kappa * bound * (tight ? rng.uni(1.0, 1.1) : rng.uni(1.05, 2.5));
      const double side = i == 0 ? 1.0 : -1.0;
      const double off = side * (tight ? rng.uni(0.05, kPi) : rng.uni(0.3, 1.4));
      const double dPE = tight ? r + rng.uni(0.01, 30.0) : rng.uni(r + 0.5, std::max(r + 1.0, 0.8 * D));
      X.pursuers.push_back(pursuer(xE + dPE * polar_dir(a + std::numbers::pi + off), 0.0, alpha[static_cast<std::size_t>(i)],
                                   kappa, r));
    }
    Sample2v1 s;
    s.goal = GoalRegion::disk(c, R);
    s.X = X;
    try {
      s.sol = solve_safe_distance(X, s.goal);
    } catch (const Error&) {
      continue;
    }
    if (!(s.sol.rho > 0.0) || s.sol.active.size() != 2 || !s.sol.multipliers_valid) continue;
    if (certified && !(s.sol.rho > threshold_2v1(X))) continue;
    for (auto& p : s.X.pursuers) p.heading = heading_of(s.sol.x_I - p.pos);
    return s;
  }
}

}  // namespace sampling
