#pragma once

// Brute-force references used by the unit and acceptance tests. Nothing here
// calls into the solver being checked.

#include <hcr/geometry.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using hcr::Vec2;

struct Player {
  Vec2 p;       // pursuer position
  double alpha; // speed ratio
  double r;     // capture radius
};

inline double pef(const Vec2& x, const Player& P, const Vec2& xE) {
  return (x - P.p).norm() - P.alpha * (x - xE).norm() - P.r;
}

// Enclosure boundary along direction psi from the evader, by bisection on f.
inline double polar_radius(const Player& P, const Vec2& xE, double psi) {
  const Vec2 e(std::cos(psi), std::sin(psi));
  double lo = 0.0;
  double hi = 1.0;
  while (pef(xE + hi * e, P, xE) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pef(xE + mid * e, P, xE) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

struct DiskGoal {
  Vec2 c;
  double R;
  double dist(const Vec2& x) const { return std::max(0.0, (x - c).norm() - R); }
};

struct SafeDistance {
  double rho = 0.0;
  Vec2 x_I = Vec2::Zero();
};

// Safe distance of the intersection of enclosures to a disk goal by dense
// sampling of every boundary, with three rounds of local resampling.
inline SafeDistance dense_safe_distance(const std::vector<Player>& team, const Vec2& xE, const DiskGoal& G,
                                        int n = 4096) {
  SafeDistance best;
  best.rho = std::numeric_limits<double>::infinity();
  if (G.dist(xE) == 0.0) return {0.0, xE};
  auto inside_all = [&](const Vec2& x, std::size_t skip) {
    for (std::size_t k = 0; k < team.size(); ++k) {
      if (k != skip && pef(x, team[k], xE) < -1e-12) return false;
    }
    return true;
  };
  // Goal centre inside the region means the region overlaps the goal.
  if (inside_all(G.c, team.size())) return {0.0, G.c};

  for (std::size_t i = 0; i < team.size(); ++i) {
    double lo = 0.0;
    double span = 2.0 * std::numbers::pi;
    double best_psi = std::numeric_limits<double>::quiet_NaN();
    double best_i = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 4; ++round) {
      const double step = span / n;
      for (int k = 0; k <= n; ++k) {
        const double psi = lo + k * step;
        const Vec2 x = xE + polar_radius(team[i], xE, psi) * Vec2(std::cos(psi), std::sin(psi));
        if (!inside_all(x, i)) continue;
        const double d = G.dist(x);
        if (d < best_i) {
          best_i = d;
          best_psi = psi;
        }
      }
      if (!std::isfinite(best_psi)) break;
      lo = best_psi - 2.0 * step;
      span = 4.0 * step;
    }
    if (best_i < best.rho) {
      best.rho = best_i;
      best.x_I = xE + polar_radius(team[i], xE, best_psi) * Vec2(std::cos(best_psi), std::sin(best_psi));
    }
  }
  return best;
}

// Velocity of the intersection point of two enclosure boundaries, from
// differentiating f_1(x_I) = f_2(x_I) = 0 along the motion.
inline Vec2 tangent_xI_2v1(const Vec2& xI, const std::array<Player, 2>& team, const Vec2& xE,
                           const std::array<Vec2, 2>& vP, const Vec2& vE) {
  Eigen::Matrix2d A;
  Vec2 b;
  for (int i = 0; i < 2; ++i) {
    const Vec2 eIP = (xI - team[i].p).normalized();
    const Vec2 eIE = (xI - xE).normalized();
    A.row(i) = (eIP - team[i].alpha * eIE).transpose();
    b(i) = eIP.dot(vP[i]) - team[i].alpha * eIE.dot(vE);
  }
  return A.partialPivLu().solve(b);
}

struct BipEdge {
  std::vector<int> coalition;
  int evader;
  double rho;
};

struct BipOptimum {
  double value = 0.0;          // objective of the chosen mode
  int max_cardinality = 0;
  double max_sum_rho = 0.0;    // over maximum-cardinality matchings
  double min_sum_rho = 0.0;
};

// Exhaustive search over every edge subset. mode: 0 zero, 1 max-rho, 2 min-rho.
inline BipOptimum exhaustive_bip(const std::vector<BipEdge>& edges, int Np, int Ne, int mode) {
  double L = 1.0;
  for (const auto& e : edges) L = std::max(L, 1.0 + e.rho);
  const double scale = std::max(1, std::min(Np, Ne)) * L;
  const std::size_t m = edges.size();
  BipOptimum out;
  out.value = 0.0;
  out.max_sum_rho = 0.0;
  out.min_sum_rho = 0.0;
  for (unsigned long mask = 0; mask < (1ul << m); ++mask) {
    std::vector<int> used_p;
    std::vector<int> used_e;
    bool ok = true;
    double sum_rho = 0.0;
    int card = 0;
    for (std::size_t k = 0; k < m && ok; ++k) {
      if (!(mask & (1ul << k))) continue;
      const auto& e = edges[k];
      if (std::find(used_e.begin(), used_e.end(), e.evader) != used_e.end()) ok = false;
      for (int p : e.coalition) {
        if (std::find(used_p.begin(), used_p.end(), p) != used_p.end()) ok = false;
        used_p.push_back(p);
      }
      used_e.push_back(e.evader);
      sum_rho += e.rho;
      ++card;
    }
    if (!ok) continue;
    const double z = mode == 0 ? 0.0 : (mode == 1 ? sum_rho / scale : -sum_rho / scale);
    out.value = std::max(out.value, card + z);
    if (card > out.max_cardinality) {
      out.max_cardinality = card;
      out.max_sum_rho = out.min_sum_rho = sum_rho;
    } else if (card == out.max_cardinality) {
      out.max_sum_rho = std::max(out.max_sum_rho, sum_rho);
      out.min_sum_rho = std::min(out.min_sum_rho, sum_rho);
    }
  }
  return out;
}

}  // namespace oracle
