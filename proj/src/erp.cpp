#include "hcr/erp.hpp"

#include "hcr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hcr {

namespace {

constexpr double kPi = std::numbers::pi;

double cm1_fraction(double alpha) {
  return (3.0 * alpha * alpha + 4.0 * alpha - 3.0) / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 3.0));
}

void require_alpha_above_3(double alpha, const char* who) {
  if (!(alpha > 3.0)) {
    std::ostringstream os;
    os << who << ": alpha must exceed 3, got " << alpha;
    throw Error(Errc::InvalidArgument, os.str());
  }
}

// Relative guard on the closed-form denominators.
constexpr double kDenomEps = 1e-10;

}  // namespace

double cm1(double alpha) {
  require_alpha_above_3(alpha, "cm1");
  return 1.0 + cm1_fraction(alpha);
}

double cm2(double alpha1, double alpha2) {
  require_alpha_above_3(alpha1, "cm2");
  require_alpha_above_3(alpha2, "cm2");
  return 1.0 + std::min(cm1_fraction(alpha1), cm1_fraction(alpha2));
}

double relaxed_bound(double alpha) {
  if (!(alpha > 2.0)) throw Error(Errc::InvalidArgument, "relaxed_bound: alpha must exceed 2");
  return (5.0 * alpha * alpha - 9.0 * alpha + 8.0) / ((alpha - 1.0) * (alpha - 2.0) * (alpha - 2.0));
}

double threshold_1v1(double alpha, double r, double kappa) {
  const double gap = r / kappa - cm1(alpha);
  if (!(gap > 0.0)) throw Error(Errc::InvalidArgument, "threshold_1v1: r / kappa must exceed CM1(alpha)");
  return (2.0 * kPi * r / (alpha - 1.0)) / gap;
}

double threshold_2v1(const CoalitionState& X) {
  if (X.size() != 2) throw Error(Errc::InvalidArgument, "threshold_2v1: coalition of two required");
  const double c2 = cm2(X.alpha(0), X.alpha(1));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t ip = 0; ip < 2; ++ip) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& p = X.pursuers[i];
      const double gap = p.capture_radius / p.kappa - c2;
      if (!(gap > 0.0)) throw Error(Errc::InvalidArgument, "threshold_2v1: r / kappa must exceed CM2");
      const double num = 2.0 * kPi * p.capture_radius * X.pursuers[ip].v_max /
                         ((X.alpha(ip) - 1.0) * p.v_max);
      worst = std::max(worst, num / gap);
    }
    best = std::min(best, worst);
  }
  return best;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::ErpWin1v1: return "ErpWin1v1";
    case Verdict::ErpWin2v1: return "ErpWin2v1";
    case Verdict::NotCertified: return "NotCertified";
  }
  return "Unknown";
}

const char* to_string(Theorem t) noexcept {
  switch (t) {
    case Theorem::None: return "None";
    case Theorem::OneVsOne: return "OneVsOne";
    case Theorem::TwoVsOne_Scenario1: return "TwoVsOne_Scenario1";
    case Theorem::TwoVsOne_Scenario2: return "TwoVsOne_Scenario2";
    case Theorem::Relaxed: return "Relaxed";
  }
  return "Unknown";
}

WinningParams winning_params(const PursuerState& p, const EvaderState& e) {
  WinningParams wp;
  wp.alpha = speed_ratio(p, e);
  wp.r_over_kappa = p.capture_radius / p.kappa;
  if (wp.alpha > 3.0) {
    wp.cm_bound = cm1(wp.alpha);
    wp.margin = wp.r_over_kappa - wp.cm_bound;
  }
  return wp;
}

Certificate certify_1v1(const PairState& pair, const GoalRegion& G, bool relaxed, const NumericConfig& cfg,
                        double eps_align) {
  pair.validate();
  Certificate cert;
  const WinningParams wp = winning_params(pair.pursuer, pair.evader);
  cert.params = {wp};
  cert.solution = solve_safe_distance(CoalitionState{{pair.pursuer}, pair.evader}, G, cfg);
  cert.observed_rho = cert.solution.rho;

  if (wp.passes()) {
    cert.threshold = threshold_1v1(wp.alpha, pair.pursuer.capture_radius, pair.pursuer.kappa);
    if (cert.observed_rho > cert.threshold) {
      cert.winner = Verdict::ErpWin1v1;
      cert.pursuer_index = 0;
      cert.which = Theorem::OneVsOne;
      return cert;
    }
  }
  if (relaxed && wp.alpha > 3.0 && wp.r_over_kappa >= relaxed_bound(wp.alpha) && cert.observed_rho > 0.0) {
    const double sigma = heading_of(cert.solution.x_I - pair.pursuer.pos);
    if (std::abs(wrap_to_pi(sigma - pair.pursuer.heading)) <= eps_align) {
      cert.winner = Verdict::ErpWin1v1;
      cert.pursuer_index = 0;
      cert.which = Theorem::Relaxed;
      cert.threshold = 0.0;
    }
  }
  return cert;
}

Certificate certify_2v1(const CoalitionState& X, const GoalRegion& G, bool relaxed, const NumericConfig& cfg,
                        double eps_align) {
  if (X.size() != 2) throw Error(Errc::InvalidArgument, "certify_2v1: coalition of two required");
  X.validate();
  Certificate cert;
  cert.params = {winning_params(X.pursuers[0], X.evader), winning_params(X.pursuers[1], X.evader)};
  cert.solution = solve_safe_distance(X, G, cfg);
  cert.observed_rho = cert.solution.rho;
  if (!(cert.observed_rho > 0.0)) return cert;

  cert.supports = support_constraints(X, G, cfg);
  if (cert.supports.size() < 2) {
    // One support constraint: the coalition reduces to a single pursuer.
    std::vector<int> order{0, 1};
    if (cert.supports.size() == 1 && cert.supports[0] == 1) order = {1, 0};
    for (int i : order) {
      Certificate single = certify_1v1(X.pair(static_cast<std::size_t>(i)), G, relaxed, cfg, eps_align);
      if (single.certified()) {
        cert.winner = Verdict::ErpWin1v1;
        cert.pursuer_index = i;
        cert.which = Theorem::TwoVsOne_Scenario1;
        cert.threshold = single.threshold;
        return cert;
      }
      if (i == order.front()) cert.threshold = single.threshold;
    }
    return cert;
  }

  if (!cert.params[0].passes() || !cert.params[1].passes()) return cert;
  cert.threshold = threshold_2v1(X);
  if (cert.observed_rho > cert.threshold) {
    cert.winner = Verdict::ErpWin2v1;
    cert.which = Theorem::TwoVsOne_Scenario2;
  }
  return cert;
}

HeadingTarget sigma_heading(const CoalitionState& X, const EnclosureSolution& sol) {
  HeadingTarget out;
  for (const auto& p : X.pursuers) {
    const Vec2 d = sol.x_I - p.pos;
    if (d.norm() <= 1e-12) throw Error(Errc::InvalidState, "sigma_heading: x_I coincides with a pursuer");
    out.sigma.push_back(heading_of(d));
  }
  return out;
}

Vec2 xI_velocity_1v1(const EnclosureSolution& sol, const PairState& pair, const GoalRegion& G,
                     const Vec2& pursuer_velocity, const Vec2& evader_velocity) {
  if (!(sol.rho > 0.0)) throw Error(Errc::NotApplicable, "xI_velocity_1v1: safe distance is zero");
  const double alpha = pair.alpha();
  const Vec2 dIP_vec = sol.x_I - pair.pursuer.pos;
  const Vec2 dIE_vec = sol.x_I - pair.evader.pos;
  const double d_IP = dIP_vec.norm();
  const double d_IE = dIE_vec.norm();
  const Vec2 e_IP = dIP_vec / d_IP;
  const Vec2 e_IE = dIE_vec / d_IE;
  const double d_f = (e_IP - alpha * e_IE).norm();

  const GoalSample gs = G.eval(sol.x_G);
  const double gnorm = gs.grad.norm();
  const Vec2 e_IG = gs.grad / gnorm;
  const Vec2 e_IG_o = rotate_cw(e_IG);
  const Vec2 e_IP_o = rotate_cw(e_IP);
  const Vec2 e_IE_o = rotate_cw(e_IE);

  const double a2 = e_IG_o.dot(gs.hess * e_IG_o) / gnorm;
  const Vec2 c1 = e_IP_o * e_IP.dot(e_IG) / d_IP - alpha * e_IE_o * e_IE.dot(e_IG) / d_IE;
  const Vec2 c2 = -e_IP_o * e_IP.dot(e_IG) / d_IP;
  const Vec2 c3 = alpha * e_IE_o * e_IE.dot(e_IG) / d_IE;
  const Vec2 c5 = -d_f * a2 * e_IG_o / (1.0 + sol.rho * a2);
  const Vec2 a1 = c1 + c5;

  const double k1 = alpha * e_IE.dot(evader_velocity) - e_IP.dot(pursuer_velocity);
  const double k2 = c2.dot(pursuer_velocity) + c3.dot(evader_velocity);
  const double k3 = d_f * a1.dot(e_IG_o);
  if (std::abs(k3) <= kDenomEps * d_f * std::max(1.0, a1.norm())) {
    throw Error(Errc::DegenerateDenominator, "xI_velocity_1v1: denominator vanishes");
  }
  return (k1 * rotate_cw(a1) - k2 * d_f * e_IG_o) / k3;
}

Vec2 xI_velocity_1v1(const EnclosureSolution& sol, const PairState& pair, const GoalRegion& G,
                     const Vec2& evader_velocity) {
  return xI_velocity_1v1(sol, pair, G, pair.pursuer.v_max * polar_dir(pair.pursuer.heading), evader_velocity);
}

Vec2 xI_velocity_2v1(const EnclosureSolution& sol, const CoalitionState& X,
                     const std::array<Vec2, 2>& pursuer_velocities, const Vec2& evader_velocity) {
  if (X.size() != 2) throw Error(Errc::InvalidArgument, "xI_velocity_2v1: coalition of two required");
  const Vec2 e_IE = (sol.x_I - X.evader.pos).normalized();
  std::array<Vec2, 2> a;
  std::array<double, 2> k{};
  for (std::size_t i = 0; i < 2; ++i) {
    const Vec2 e_IP = (sol.x_I - X.pursuers[i].pos).normalized();
    a[i] = e_IP - X.alpha(i) * e_IE;
    k[i] = X.alpha(i) * e_IE.dot(evader_velocity) - e_IP.dot(pursuer_velocities[i]);
  }
  const double denom = a[0].dot(rotate_cw(a[1]));
  if (std::abs(denom) <= kDenomEps * a[0].norm() * a[1].norm()) {
    throw Error(Errc::DegenerateDenominator, "xI_velocity_2v1: active gradients are parallel");
  }
  return (rotate_cw(a[0]) * k[1] - rotate_cw(a[1]) * k[0]) / denom;
}

Vec2 xI_velocity_2v1(const EnclosureSolution& sol, const CoalitionState& X, const Vec2& evader_velocity) {
  if (X.size() != 2) throw Error(Errc::InvalidArgument, "xI_velocity_2v1: coalition of two required");
  return xI_velocity_2v1(sol, X,
                         {X.pursuers[0].v_max * polar_dir(X.pursuers[0].heading),
                          X.pursuers[1].v_max * polar_dir(X.pursuers[1].heading)},
                         evader_velocity);
}

double manifold_control(const PursuerState& p, const Vec2& x_I, const Vec2& xI_velocity) {
  const Vec2 d = x_I - p.pos;
  const double d_IP = d.norm();
  return -(p.kappa / p.v_max) * rotate_cw(Vec2(d / d_IP)).dot(xI_velocity) / d_IP;
}

double bang_bang(double sigma, double heading) {
  const double s = std::sin(sigma - heading);
  if (s > 0.0) return 1.0;
  if (s < 0.0) return -1.0;
  return std::cos(sigma - heading) > 0.0 ? 0.0 : 1.0;
}

double steer_control(const PursuerState& p, double sigma, double u_manifold, const StrategyConfig& scfg) {
  const double delta = wrap_to_pi(sigma - p.heading);
  if (scfg.dt > 0.0 && std::isfinite(u_manifold)) {
    // Turn that lands exactly on sigma at the end of the step.
    const double u = u_manifold + delta * p.kappa / (p.v_max * scfg.dt);
    if (std::abs(u) <= 1.0) return u;
  }
  if (std::abs(delta) <= scfg.eps_align && std::isfinite(u_manifold)) return std::clamp(u_manifold, -1.0, 1.0);
  return bang_bang(sigma, p.heading);
}

double pursuit_control_1v1(const PairState& pair, const EnclosureSolution& sol, const GoalRegion& G,
                           const Vec2& evader_control, const StrategyConfig& scfg) {
  const double sigma = heading_of(sol.x_I - pair.pursuer.pos);
  double u_m = std::numeric_limits<double>::quiet_NaN();
  if (sol.rho > 0.0) {
    try {
      const Vec2 xdot_I = xI_velocity_1v1(sol, pair, G, pair.evader.v_max * evader_control);
      u_m = manifold_control(pair.pursuer, sol.x_I, xdot_I);
    } catch (const Error& err) {
      if (err.code() != Errc::DegenerateDenominator) throw;
    }
  }
  return steer_control(pair.pursuer, sigma, u_m, scfg);
}

double pursuit_control_1v1(const PairState& pair, const GoalRegion& G, const Vec2& evader_control,
                           const StrategyConfig& scfg, const NumericConfig& cfg) {
  const EnclosureSolution sol = solve_safe_distance(CoalitionState{{pair.pursuer}, pair.evader}, G, cfg);
  return pursuit_control_1v1(pair, sol, G, evader_control, scfg);
}

std::array<double, 2> pursuit_control_2v1(const CoalitionState& X, const EnclosureSolution& sol,
                                          const GoalRegion& G, const Vec2& evader_control,
                                          const StrategyConfig& scfg) {
  if (X.size() != 2) throw Error(Errc::InvalidArgument, "pursuit_control_2v1: coalition of two required");
  const Vec2 xdot_E = X.evader.v_max * evader_control;
  Vec2 xdot_I = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
  if (sol.rho > 0.0) {
    try {
      if (sol.active.size() == 2) {
        xdot_I = xI_velocity_2v1(sol, X, xdot_E);
      } else if (sol.active.size() == 1) {
        xdot_I = xI_velocity_1v1(sol, X.pair(static_cast<std::size_t>(sol.active[0])), G, xdot_E);
      }
    } catch (const Error& err) {
      if (err.code() != Errc::DegenerateDenominator) throw;
    }
  }
  const HeadingTarget target = sigma_heading(X, sol);
  std::array<double, 2> u{};
  for (std::size_t i = 0; i < 2; ++i) {
    const double u_m = xdot_I.allFinite() ? manifold_control(X.pursuers[i], sol.x_I, xdot_I)
                                          : std::numeric_limits<double>::quiet_NaN();
    u[i] = steer_control(X.pursuers[i], target.sigma[i], u_m, scfg);
  }
  return u;
}

std::array<double, 2> pursuit_control_2v1(const CoalitionState& X, const GoalRegion& G,
                                          const Vec2& evader_control, const StrategyConfig& scfg,
                                          const NumericConfig& cfg) {
  return pursuit_control_2v1(X, solve_safe_distance(X, G, cfg), G, evader_control, scfg);
}

}  // namespace hcr
