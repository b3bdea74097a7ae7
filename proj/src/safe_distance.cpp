#include "hcr/safe_distance.hpp"

#include "hcr/detail/scalar_search.hpp"
#include "hcr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace hcr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kGrid = 256;

EnclosureSolution touching(const CoalitionState& X, const Vec2& p, const NumericConfig& cfg, const Pef& pef) {
  EnclosureSolution sol;
  sol.x_I = p;
  sol.x_G = p;
  sol.rho = 0.0;
  sol.lambdas.assign(X.size(), 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (std::abs(pef.value(p, X.pair(i))) <= cfg.eps_active) sol.active.push_back(static_cast<int>(i));
  }
  return sol;
}

void mark_active(EnclosureSolution& sol, const CoalitionState& X, const NumericConfig& cfg, const Pef& pef) {
  std::vector<std::pair<double, int>> near;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double f = std::abs(pef.value(sol.x_I, X.pair(i)));
    if (f <= cfg.eps_active) near.emplace_back(f, static_cast<int>(i));
  }
  std::sort(near.begin(), near.end());
  if (near.size() > 2) near.resize(2);
  sol.active.clear();
  for (const auto& [f, i] : near) sol.active.push_back(i);
  std::sort(sol.active.begin(), sol.active.end());
}

EnclosureSolution finish(EnclosureSolution sol, const CoalitionState& X, const GoalRegion& G,
                         const NumericConfig& cfg, const Pef& pef) {
  sol.lambdas.assign(X.size(), 0.0);
  if (sol.rho <= cfg.eps_dist) {
    sol.rho = 0.0;
    mark_active(sol, X, cfg, pef);
    return sol;
  }
  mark_active(sol, X, cfg, pef);
  if (sol.active.empty() || sol.active.size() > 2) return sol;
  try {
    sol = recover_multipliers(std::move(sol), X, G, pef);
  } catch (const Error& err) {
    if (err.code() != Errc::SingularActiveSet && err.code() != Errc::InvalidArgument) throw;
    sol.multipliers_valid = false;
  }
  return sol;
}

EnclosureSolution solve_boundary(const CoalitionState& X, const GoalRegion& G, const NumericConfig& cfg,
                                 const Pef& pef) {
  const std::size_t n = X.size();
  const Vec2& xe = X.evader.pos;
  std::vector<PairState> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.push_back(X.pair(i));

  auto rho_min = [&](double psi) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& p : pairs) r = std::min(r, pef.boundary_radius(psi, p));
    return r;
  };
  auto point = [&](double psi) -> Vec2 { return xe + rho_min(psi) * polar_dir(psi); };
  auto phi = [&](double psi) { return distance_to_goal(G, point(psi), cfg); };

  const double h = kTwoPi / kGrid;
  int best = 0;
  double best_val = phi(0.0);
  for (int k = 1; k < kGrid; ++k) {
    const double v = phi(k * h);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  const double a = (best - 1) * h;
  const double b = (best + 1) * h;

  // Sampled candidates only win if clearly better than a stationary point or
  // a vertex, which are located to full precision.
  const double coarse_psi = detail::golden_min(phi, a, b, 1e-15, std::min(cfg.max_iter, 300)).first;
  std::vector<double> exact;

  // Stationary points of the distance along each individual boundary.
  for (const auto& p : pairs) {
    auto slope = [&](double psi) {
      const Vec2 e = polar_dir(psi);
      const Vec2 e_perp(-e.y(), e.x());
      const double rho = pef.boundary_radius(psi, p);
      const Vec2 x = xe + rho * e;
      const Vec2 d = x - project_to_goal(G, x, cfg);
      const double drho = pef.boundary_radius_derivative(psi, p);
      return d.dot(drho * e + rho * e_perp);
    };
    if (const auto root = detail::brent_root(slope, a, b, 1e-15, cfg.max_iter)) exact.push_back(*root);
  }
  // Vertices where two boundaries cross.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto gap = [&](double psi) {
        return pef.boundary_radius(psi, pairs[i]) - pef.boundary_radius(psi, pairs[j]);
      };
      if (const auto root = detail::brent_root(gap, a, b, 1e-15, cfg.max_iter)) exact.push_back(*root);
    }
  }

  double psi_star = coarse_psi;
  double phi_star = phi(coarse_psi);
  const double slack = 1e-10 * (1.0 + phi_star);
  double exact_best = std::numeric_limits<double>::infinity();
  double exact_psi = 0.0;
  for (double c : exact) {
    const double v = phi(c);
    if (v < exact_best) {
      exact_best = v;
      exact_psi = c;
    }
  }
  if (exact_best <= phi_star + slack) {
    psi_star = exact_psi;
    phi_star = exact_best;
  }

  EnclosureSolution sol;
  sol.x_I = point(psi_star);
  sol.x_G = project_to_goal(G, sol.x_I, cfg);
  sol.rho = (sol.x_I - sol.x_G).norm();
  return sol;
}

Vec2 project_intersection(const Vec2& z, const std::vector<PairState>& pairs, const Pef& pef,
                          const NumericConfig& cfg) {
  if (pairs.size() == 1) return project_to_enclosure(z, pairs[0], pef, cfg);
  bool inside = true;
  for (const auto& p : pairs) inside = inside && pef.value(z, p) >= 0.0;
  if (inside) return z;
  // Dykstra's scheme.
  Vec2 x = z;
  std::vector<Vec2> incr(pairs.size(), Vec2::Zero());
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Vec2 prev = x;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const Vec2 y = project_to_enclosure(x + incr[i], pairs[i], pef, cfg);
      incr[i] = x + incr[i] - y;
      x = y;
    }
    if ((x - prev).norm() <= cfg.eps_dist) return x;
  }
  throw Error(Errc::MaxIterExceeded, "project_intersection: Dykstra iteration did not converge");
}

EnclosureSolution solve_alternating(const CoalitionState& X, const GoalRegion& G, const NumericConfig& cfg,
                                    const Pef& pef) {
  std::vector<PairState> pairs;
  for (std::size_t i = 0; i < X.size(); ++i) pairs.push_back(X.pair(i));
  auto inside_all = [&](const Vec2& p) {
    for (const auto& pr : pairs) {
      if (pef.value(p, pr) < 0.0) return false;
    }
    return true;
  };

  Vec2 x = X.evader.pos;
  Vec2 y = project_to_goal(G, x, cfg);
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (inside_all(y)) {
      EnclosureSolution sol;
      sol.x_I = y;
      sol.x_G = y;
      return sol;
    }
    const Vec2 x_new = project_intersection(y, pairs, pef, cfg);
    const Vec2 y_new = project_to_goal(G, x_new, cfg);
    const double change = (x_new - x).norm() + (y_new - y).norm();
    x = x_new;
    y = y_new;
    // Overlapping sets: the iterates meet, but only sublinearly.
    if ((x - y).norm() <= cfg.eps_dist) {
      EnclosureSolution sol;
      sol.x_I = x;
      sol.x_G = y;
      return sol;
    }
    if (change <= cfg.eps_dist) {
      EnclosureSolution sol;
      sol.x_I = x;
      sol.x_G = y;
      sol.rho = (x - y).norm();
      return sol;
    }
  }
  throw Error(Errc::MaxIterExceeded, "solve_safe_distance: alternating projections did not converge");
}

}  // namespace

CoalitionState CoalitionState::subset(const std::vector<int>& indices) const {
  CoalitionState out;
  out.evader = evader;
  for (int i : indices) out.pursuers.push_back(pursuers.at(static_cast<std::size_t>(i)));
  return out;
}

void CoalitionState::validate() const {
  if (pursuers.empty()) throw Error(Errc::InvalidArgument, "CoalitionState: empty coalition");
  for (std::size_t i = 0; i < pursuers.size(); ++i) pair(i).validate();
}

EnclosureSolution solve_safe_distance(const CoalitionState& X, const GoalRegion& G, const NumericConfig& cfg,
                                      SolverMethod method, const Pef& pef) {
  cfg.validate();
  X.validate();
  const Vec2& xe = X.evader.pos;
  if (G.value(xe) <= 0.0) return touching(X, xe, cfg, pef);
  const Vec2 y0 = project_to_goal(G, xe, cfg);
  bool y0_inside = true;
  for (std::size_t i = 0; i < X.size(); ++i) y0_inside = y0_inside && pef.value(y0, X.pair(i)) >= 0.0;
  if (y0_inside) return touching(X, y0, cfg, pef);

  EnclosureSolution sol = method == SolverMethod::BoundarySearch ? solve_boundary(X, G, cfg, pef)
                                                                 : solve_alternating(X, G, cfg, pef);
  return finish(std::move(sol), X, G, cfg, pef);
}

EnclosureSolution recover_multipliers(EnclosureSolution sol, const CoalitionState& X, const GoalRegion& G,
                                      const Pef& pef) {
  if (!(sol.rho > 0.0)) throw Error(Errc::NotApplicable, "recover_multipliers: safe distance is zero");
  if (sol.active.empty() || sol.active.size() > 2) {
    throw Error(Errc::InvalidState, "recover_multipliers: need one or two active constraints");
  }
  const Vec2 e_IG = (sol.x_I - sol.x_G) / sol.rho;
  sol.lambdas.assign(X.size(), 0.0);
  if (sol.active.size() == 1) {
    const int i = sol.active[0];
    const Vec2 fx = pef.gradients(sol.x_I, X.pair(static_cast<std::size_t>(i))).f_x;
    sol.lambdas[static_cast<std::size_t>(i)] = -1.0 / fx.norm();
  } else {
    const auto i = static_cast<std::size_t>(sol.active[0]);
    const auto j = static_cast<std::size_t>(sol.active[1]);
    Mat2 F;
    F.col(0) = pef.gradients(sol.x_I, X.pair(i)).f_x;
    F.col(1) = pef.gradients(sol.x_I, X.pair(j)).f_x;
    const double det = F.determinant();
    if (std::abs(det) <= 1e-10 * F.col(0).norm() * F.col(1).norm()) {
      throw Error(Errc::SingularActiveSet, "recover_multipliers: active gradients are parallel");
    }
    Vec2 lam = F.inverse() * (-e_IG);
    for (int k = 0; k < 2; ++k) {
      if (lam(k) > 0.0 && lam(k) < 1e-8) lam(k) = 0.0;
    }
    sol.lambdas[i] = lam(0);
    sol.lambdas[j] = lam(1);
  }
  const Vec2 gy = G.eval(sol.x_G).grad;
  sol.lambda_g = e_IG.dot(gy) / gy.squaredNorm();
  sol.multipliers_valid = true;
  return sol;
}

double safe_distance_rate(const EnclosureSolution& sol, const CoalitionState& X,
                          const std::vector<Vec2>& xdot_P, const std::vector<double>& theta_dot,
                          const Vec2& xdot_E, const Pef& pef) {
  if (!sol.multipliers_valid) throw Error(Errc::InvalidState, "safe_distance_rate: multipliers not recovered");
  if (xdot_P.size() != X.size() || theta_dot.size() != X.size()) {
    throw Error(Errc::InvalidArgument, "safe_distance_rate: one velocity per pursuer required");
  }
  double rate = 0.0;
  for (int idx : sol.active) {
    const auto i = static_cast<std::size_t>(idx);
    const PefGradients g = pef.gradients(sol.x_I, X.pair(i));
    rate += sol.lambdas[i] * (g.f_P.dot(xdot_P[i]) + g.f_theta * theta_dot[i] + g.f_E.dot(xdot_E));
  }
  return rate;
}

double safe_distance_rate(const EnclosureSolution& sol, const CoalitionState& X, const GoalRegion& /*G*/,
                          const std::vector<double>& pursuer_controls, const Vec2& evader_control,
                          const Pef& pef) {
  if (pursuer_controls.size() != X.size()) {
    throw Error(Errc::InvalidArgument, "safe_distance_rate: one control per pursuer required");
  }
  std::vector<Vec2> xdot_P;
  std::vector<double> theta_dot;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto& p = X.pursuers[i];
    xdot_P.push_back(p.v_max * polar_dir(p.heading));
    theta_dot.push_back(p.v_max * pursuer_controls[i] / p.kappa);
  }
  return safe_distance_rate(sol, X, xdot_P, theta_dot, X.evader.v_max * evader_control, pef);
}

Reduction reduce_coalition(const CoalitionState& X, const GoalRegion& G, const NumericConfig& cfg, double tol) {
  const double full = solve_safe_distance(X, G, cfg).rho;
  if (!(full > 0.0)) throw Error(Errc::NotApplicable, "reduce_coalition: safe distance is zero");
  const int n = static_cast<int>(X.size());
  if (n == 1) return {{0}, full, full};
  for (int i = 0; i < n; ++i) {
    const double v = solve_safe_distance(X.subset({i}), G, cfg).rho;
    if (std::abs(v - full) <= tol) return {{i}, v, full};
  }
  Reduction best{{}, -1.0, full};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = solve_safe_distance(X.subset({i, j}), G, cfg).rho;
      if (std::abs(v - full) <= tol) return {{i, j}, v, full};
      if (v > best.value) best = {{i, j}, v, full};
    }
  }
  // No pair reproduces the full value within tol; report the closest one.
  return best;
}

std::vector<int> support_constraints(const CoalitionState& X, const GoalRegion& G, const NumericConfig& cfg,
                                     double tol) {
  const int n = static_cast<int>(X.size());
  if (n == 1) return {0};
  const double full = solve_safe_distance(X, G, cfg).rho;
  std::vector<int> out;
  for (int k = 0; k < n; ++k) {
    std::vector<int> rest(static_cast<std::size_t>(n));
    std::iota(rest.begin(), rest.end(), 0);
    rest.erase(rest.begin() + k);
    if (solve_safe_distance(X.subset(rest), G, cfg).rho < full - tol) out.push_back(k);
  }
  return out;
}

}  // namespace hcr
