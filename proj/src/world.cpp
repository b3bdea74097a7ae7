#include "hcr/world.hpp"

#include "hcr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hcr {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidState: return "InvalidState";
    case Errc::MaxIterExceeded: return "MaxIterExceeded";
    case Errc::SingularActiveSet: return "SingularActiveSet";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::NotApplicable: return "NotApplicable";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

void NumericConfig::validate() const {
  if (!(eps_active > 0.0) || !(eps_dist > 0.0) || max_iter < 1) {
    throw Error(Errc::InvalidArgument, "NumericConfig: tolerances must be positive and max_iter >= 1");
  }
}

namespace {

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

// sin(x)/x, stable near zero.
double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

Vec2 project_ellipse(const GoalRegion::Ellipse& el, const Vec2& z) {
  const double a = el.semi_axes.x();
  const double b = el.semi_axes.y();
  const Vec2 y = z - el.center;
  const double qa = y.x() / a;
  const double qb = y.y() / b;
  if (qa * qa + qb * qb <= 1.0) return z;

  // Closest point satisfies x_k = s_k^2 y_k / (t + s_k^2) with t >= 0 the root of
  // F(t) = (a y1 / (t + a^2))^2 + (b y2 / (t + b^2))^2 - 1, which is decreasing.
  auto F = [&](double t) {
    const double u = a * y.x() / (t + a * a);
    const double v = b * y.y() / (t + b * b);
    return u * u + v * v - 1.0;
  };
  double lo = 0.0;
  double hi = std::max(a, b) * y.norm() * std::sqrt(2.0);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  return el.center + Vec2(a * a * y.x() / (t + a * a), b * b * y.y() / (t + b * b));
}

Vec2 project_custom(const GoalRegion::Custom& c, const Vec2& z, const NumericConfig& cfg) {
  if (c.g(z) <= 0.0) return z;
  // Ray march from the interior seed to a boundary point.
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (c.g(c.interior + mid * (z - c.interior)) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Vec2 y = c.interior + lo * (z - c.interior);
  Vec2 gy = c.grad(y);
  double lambda = gy.squaredNorm() > 0.0 ? (z - y).norm() / gy.norm() : 0.0;

  // Newton on y - z + lambda * grad g(y) = 0, g(y) = 0.
  auto residual = [&](const Vec2& yy, double lam) {
    Eigen::Vector3d r;
    r.head<2>() = yy - z + lam * c.grad(yy);
    r(2) = c.g(yy);
    return r;
  };
  Eigen::Vector3d r = residual(y, lambda);
  const double scale = std::max(1.0, (z - c.interior).norm());
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (r.norm() <= 1e-13 * scale) return y;
    Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
    gy = c.grad(y);
    J.topLeftCorner<2, 2>() = Mat2::Identity() + lambda * c.hess(y);
    J.block<2, 1>(0, 2) = gy;
    J.block<1, 2>(2, 0) = gy.transpose();
    const Eigen::Vector3d step = J.fullPivLu().solve(-r);
    double t = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      const Vec2 y_new = y + t * step.head<2>();
      const double lam_new = lambda + t * step(2);
      const Eigen::Vector3d r_new = residual(y_new, lam_new);
      if (r_new.norm() < r.norm() || ls == 39) {
        y = y_new;
        lambda = lam_new;
        r = r_new;
        break;
      }
      t *= 0.5;
    }
  }
  if (r.norm() <= 1e-9 * scale) return y;
  throw Error(Errc::MaxIterExceeded, "project_to_goal: Newton iteration did not converge");
}

}  // namespace

void PursuerState::validate() const {
  if (!finite(pos) || !std::isfinite(heading)) {
    throw Error(Errc::InvalidArgument, "PursuerState: non-finite position or heading");
  }
  if (!(v_max > 0.0) || !(kappa > 0.0) || !(capture_radius > 0.0)) {
    throw Error(Errc::InvalidArgument, "PursuerState: v_max, kappa and capture_radius must be positive");
  }
}

void EvaderState::validate() const {
  if (!finite(pos)) throw Error(Errc::InvalidArgument, "EvaderState: non-finite position");
  if (!(v_max > 0.0)) throw Error(Errc::InvalidArgument, "EvaderState: v_max must be positive");
}

GoalRegion GoalRegion::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0) || !finite(center)) {
    throw Error(Errc::InvalidArgument, "GoalRegion::disk: radius must be positive");
  }
  return GoalRegion(Disk{center, radius});
}

GoalRegion GoalRegion::ellipse(const Vec2& center, const Vec2& semi_axes) {
  if (!(semi_axes.x() > 0.0) || !(semi_axes.y() > 0.0) || !finite(center)) {
    throw Error(Errc::InvalidArgument, "GoalRegion::ellipse: semi-axes must be positive");
  }
  return GoalRegion(Ellipse{center, semi_axes});
}

GoalRegion GoalRegion::custom(Custom region) {
  if (!region.g || !region.grad || !region.hess) {
    throw Error(Errc::InvalidArgument, "GoalRegion::custom: g, grad and hess are required");
  }
  if (!(region.g(region.interior) < 0.0)) {
    throw Error(Errc::InvalidArgument, "GoalRegion::custom: interior seed must satisfy g < 0");
  }
  return GoalRegion(std::move(region));
}

GoalSample GoalRegion::eval(const Vec2& y) const {
  return std::visit(
      [&](const auto& k) -> GoalSample {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Disk>) {
          const Vec2 d = y - k.center;
          return {d.squaredNorm() - k.radius * k.radius, 2.0 * d, 2.0 * Mat2::Identity()};
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const Vec2 d = y - k.center;
          const Vec2 inv2 = k.semi_axes.cwiseProduct(k.semi_axes).cwiseInverse();
          GoalSample s;
          s.g = d.cwiseProduct(d).dot(inv2) - 1.0;
          s.grad = 2.0 * d.cwiseProduct(inv2);
          s.hess = (2.0 * inv2).asDiagonal();
          return s;
        } else {
          return {k.g(y), k.grad(y), k.hess(y)};
        }
      },
      kind_);
}

double GoalRegion::value(const Vec2& y) const {
  if (const auto* d = std::get_if<Disk>(&kind_)) {
    return (y - d->center).squaredNorm() - d->radius * d->radius;
  }
  if (const auto* c = std::get_if<Custom>(&kind_)) return c->g(y);
  return eval(y).g;
}

GoalSample goal_eval(const GoalRegion& goal, const Vec2& y) { return goal.eval(y); }

Vec2 project_to_goal(const GoalRegion& goal, const Vec2& z, const NumericConfig& cfg) {
  return std::visit(
      [&](const auto& k) -> Vec2 {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, GoalRegion::Disk>) {
          const Vec2 d = z - k.center;
          const double n = d.norm();
          if (n <= k.radius) return z;
          return k.center + (k.radius / n) * d;
        } else if constexpr (std::is_same_v<T, GoalRegion::Ellipse>) {
          return project_ellipse(k, z);
        } else {
          return project_custom(k, z, cfg);
        }
      },
      goal.kind());
}

double distance_to_goal(const GoalRegion& goal, const Vec2& z, const NumericConfig& cfg) {
  if (const auto* d = std::get_if<GoalRegion::Disk>(&goal.kind())) {
    return std::max(0.0, (z - d->center).norm() - d->radius);
  }
  return (z - project_to_goal(goal, z, cfg)).norm();
}

bool goal_derivatives_consistent(const GoalRegion& goal, std::span<const Vec2> points, double tol) {
  const double h = 1e-4;
  for (const Vec2& y : points) {
    const GoalSample s = goal.eval(y);
    Vec2 fd_grad;
    Mat2 fd_hess;
    for (int k = 0; k < 2; ++k) {
      const Vec2 step = h * Vec2::Unit(k);
      fd_grad(k) = (goal.value(y + step) - goal.value(y - step)) / (2.0 * h);
      fd_hess.col(k) = (goal.eval(y + step).grad - goal.eval(y - step).grad) / (2.0 * h);
    }
    const double gscale = std::max(1.0, s.grad.norm());
    const double hscale = std::max(1.0, s.hess.norm());
    if ((fd_grad - s.grad).norm() > tol * gscale) return false;
    if ((fd_hess - s.hess).norm() > tol * hscale) return false;
  }
  return true;
}

PursuerState step_pursuer(const PursuerState& s, double u, double dt) {
  constexpr double eps = 1e-9;
  if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "step_pursuer: dt must be positive");
  if (!(std::abs(u) <= 1.0 + eps)) {
    std::ostringstream os;
    os << "step_pursuer: control " << u << " outside [-1, 1]";
    throw Error(Errc::InvalidArgument, os.str());
  }
  u = std::clamp(u, -1.0, 1.0);
  const double turn = s.v_max * u / s.kappa * dt;
  const double mid = s.heading + 0.5 * turn;
  const double chord = s.v_max * dt * sinc(0.5 * turn);
  PursuerState next = s;
  next.pos += chord * Vec2(std::cos(mid), std::sin(mid));
  next.heading = wrap_to_2pi(s.heading + turn);
  return next;
}

EvaderState step_evader(const EvaderState& s, const Vec2& u, double dt) {
  constexpr double eps = 1e-9;
  if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "step_evader: dt must be positive");
  if (!(u.norm() <= 1.0 + eps)) throw Error(Errc::InvalidArgument, "step_evader: |u| > 1");
  EvaderState next = s;
  next.pos += s.v_max * dt * u;
  return next;
}

bool capture_check(const PursuerState& p, const EvaderState& e) {
  return (p.pos - e.pos).norm() <= p.capture_radius;
}

}  // namespace hcr
