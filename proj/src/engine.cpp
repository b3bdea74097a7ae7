#include "hcr/engine.hpp"

#include "hcr/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace hcr {

namespace {

class GreedyToGoal final : public EvaderStrategy {
 public:
  Vec2 control(const WorldSnapshot& w) override {
    const Vec2& x = w.evaders[static_cast<std::size_t>(w.self)].pos;
    const Vec2 d = project_to_goal(*w.goal, x) - x;
    const double n = d.norm();
    return n > 0.0 ? Vec2(d / n) : Vec2::Zero();
  }
};

class ConstantHeading final : public EvaderStrategy {
 public:
  explicit ConstantHeading(double phi) : u_(polar_dir(phi)) {}
  Vec2 control(const WorldSnapshot&) override { return u_; }

 private:
  Vec2 u_;
};

class Scripted final : public EvaderStrategy {
 public:
  explicit Scripted(std::vector<ScriptStep> steps) : steps_(std::move(steps)) {}
  Vec2 control(const WorldSnapshot& w) override {
    Vec2 u = Vec2::Zero();
    for (const auto& s : steps_) {
      if (s.t <= w.t + 1e-12) u = s.u;
    }
    const double n = u.norm();
    return n > 1.0 ? Vec2(u / n) : u;
  }

 private:
  std::vector<ScriptStep> steps_;
};

class RandomWalk final : public EvaderStrategy {
 public:
  RandomWalk(double sigma, std::uint64_t seed, double dt) : sigma_(sigma), dt_(dt), rng_(seed) {}
  Vec2 control(const WorldSnapshot& w) override {
    if (!started_) {
      const Vec2& x = w.evaders[static_cast<std::size_t>(w.self)].pos;
      heading_ = heading_of(project_to_goal(*w.goal, x) - x);
      started_ = true;
    } else {
      std::normal_distribution<double> noise(0.0, sigma_ * std::sqrt(dt_));
      heading_ += noise(rng_);
    }
    return polar_dir(heading_);
  }

 private:
  double sigma_;
  double dt_;
  std::mt19937_64 rng_;
  double heading_ = 0.0;
  bool started_ = false;
};

// Among equally good matchings keep last tick's assignment.
void keep_incumbent(Matching& m, const std::vector<std::pair<std::vector<int>, int>>& previous,
                    const GameGraph& graph, ZMode mode) {
  if (previous.empty() || m.assignments == previous) return;
  // Edges of captured or arrived evaders drop out of the incumbent.
  std::vector<int> idx;
  for (const auto& [c, j] : previous) {
    const auto it = std::find_if(graph.edges.begin(), graph.edges.end(),
                                 [&](const GameEdge& e) { return e.coalition == c && e.evader == j; });
    if (it == graph.edges.end()) continue;
    idx.push_back(static_cast<int>(it - graph.edges.begin()));
  }
  if (idx.empty()) return;
  const double L = z_scale(graph);
  const int np = std::max(1, graph.num_pursuers);
  const int ne = std::max(1, static_cast<int>(graph.evader_vertices.size()));
  double value = 0.0;
  for (int k : idx) value += 1.0 + z_value(mode, graph.edges[static_cast<std::size_t>(k)].rho, L, np, ne);
  if (value < m.objective - 1e-12) return;
  std::sort(idx.begin(), idx.end());
  m.edge_indices = idx;
  m.objective = value;
  m.assignments.clear();
  for (int k : idx) m.assignments.emplace_back(graph.edges[static_cast<std::size_t>(k)].coalition,
                                               graph.edges[static_cast<std::size_t>(k)].evader);
}

}  // namespace

const char* to_string(EvaderPolicy p) noexcept {
  switch (p) {
    case EvaderPolicy::GreedyToGoal: return "greedy_to_goal";
    case EvaderPolicy::ConstantHeading: return "constant_heading";
    case EvaderPolicy::Scripted: return "scripted";
    case EvaderPolicy::RandomWalk: return "random_walk";
  }
  return "unknown";
}

const char* to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::Capture: return "Capture";
    case EventKind::Arrival: return "Arrival";
    case EventKind::MatchChange: return "MatchChange";
    case EventKind::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

std::unique_ptr<EvaderStrategy> make_evader_strategy(const EvaderStrategySpec& spec, std::uint64_t seed,
                                                     int index, double dt) {
  switch (spec.kind) {
    case EvaderPolicy::GreedyToGoal: return std::make_unique<GreedyToGoal>();
    case EvaderPolicy::ConstantHeading: return std::make_unique<ConstantHeading>(spec.heading);
    case EvaderPolicy::Scripted: return std::make_unique<Scripted>(spec.script);
    case EvaderPolicy::RandomWalk:
      return std::make_unique<RandomWalk>(spec.sigma, seed + static_cast<std::uint64_t>(index), dt);
  }
  throw Error(Errc::InvalidArgument, "make_evader_strategy: unknown policy");
}

void Scenario::validate() const {
  numeric.validate();
  if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "scenario: dt must be positive");
  if (!(max_time > 0.0)) throw Error(Errc::InvalidArgument, "scenario: max_time must be positive");
  if (pursuer_ids.size() != pursuers.size() || evader_ids.size() != evaders.size()) {
    throw Error(Errc::InvalidArgument, "scenario: one id per player required");
  }
  if (strategies.size() != evaders.size()) {
    throw Error(Errc::InvalidArgument, "scenario: one strategy per evader required");
  }
  std::set<std::string> ids;
  for (const auto& id : pursuer_ids) {
    if (id.empty() || !ids.insert(id).second) throw Error(Errc::InvalidArgument, "scenario: duplicate or empty id '" + id + "'");
  }
  for (const auto& id : evader_ids) {
    if (id.empty() || !ids.insert(id).second) throw Error(Errc::InvalidArgument, "scenario: duplicate or empty id '" + id + "'");
  }
  for (const auto& p : pursuers) p.validate();
  for (const auto& e : evaders) {
    e.validate();
    for (const auto& p : pursuers) {
      if (!(speed_ratio(p, e) > 1.0)) throw Error(Errc::InvalidArgument, "scenario: every pursuer must be faster than every evader");
    }
  }
  for (const auto& st : strategies) {
    if (st.kind == EvaderPolicy::RandomWalk && !(st.sigma >= 0.0)) {
      throw Error(Errc::InvalidArgument, "scenario: random walk sigma must be non-negative");
    }
  }
}

double fallback_pursuit(const PursuerState& p, const EvaderState& target, double dt) {
  const Vec2 d = target.pos - p.pos;
  if (d.norm() == 0.0) return 0.0;
  const double bearing = heading_of(d);
  const double delta = wrap_to_pi(bearing - p.heading);
  if (dt > 0.0) {
    const double u = delta * p.kappa / (p.v_max * dt);
    if (std::abs(u) <= 1.0) return u;
  }
  return bang_bang(bearing, p.heading);
}

std::string edge_label(const std::vector<int>& coalition, int evader, const std::vector<std::string>& pursuer_ids,
                       const std::vector<std::string>& evader_ids) {
  std::string out;
  for (std::size_t k = 0; k < coalition.size(); ++k) {
    if (k) out += '+';
    out += pursuer_ids.at(static_cast<std::size_t>(coalition[k]));
  }
  return out + "-" + evader_ids.at(static_cast<std::size_t>(evader));
}

TrajectoryLog run_simulation(const Scenario& s) {
  s.validate();
  TrajectoryLog log;
  log.pursuer_ids = s.pursuer_ids;
  log.evader_ids = s.evader_ids;

  std::vector<PursuerState> pursuers = s.pursuers;
  std::vector<EvaderState> evaders = s.evaders;
  for (auto& p : pursuers) p.heading = wrap_to_2pi(p.heading);
  std::vector<std::unique_ptr<EvaderStrategy>> strategies;
  for (std::size_t j = 0; j < evaders.size(); ++j) {
    strategies.push_back(make_evader_strategy(s.strategies[j], s.seed, static_cast<int>(j), s.dt));
  }

  const std::size_t np = pursuers.size();
  const std::size_t ne = evaders.size();
  double t = 0.0;

  auto detect = [&] {
    for (std::size_t j = 0; j < ne; ++j) {
      auto& e = evaders[j];
      if (e.status != EvaderStatus::Active) continue;
      std::vector<std::string> capturers;
      for (std::size_t i = 0; i < np; ++i) {
        if (capture_check(pursuers[i], e)) capturers.push_back(s.pursuer_ids[i]);
      }
      if (!capturers.empty()) {
        e.status = EvaderStatus::Captured;
        capturers.push_back(s.evader_ids[j]);
        log.events.push_back({t, EventKind::Capture, capturers, {}});
      } else if (s.goal.value(e.pos) <= 0.0) {
        e.status = EvaderStatus::Arrived;
        log.events.push_back({t, EventKind::Arrival, {s.evader_ids[j]}, {}});
      }
    }
  };
  auto any_active = [&] {
    return std::any_of(evaders.begin(), evaders.end(),
                       [](const EvaderState& e) { return e.status == EvaderStatus::Active; });
  };
  auto snapshot = [&](TickRecord& rec) {
    rec.t = t;
    for (const auto& p : pursuers) {
      rec.pursuer_pos.push_back(p.pos);
      rec.pursuer_heading.push_back(p.heading);
    }
    for (const auto& e : evaders) {
      rec.evader_pos.push_back(e.pos);
      rec.evader_status.push_back(e.status);
    }
  };

  GraphOptions gopts;
  gopts.relaxed = s.relaxed;
  gopts.numeric = s.numeric;
  gopts.threads = std::max(1u, s.threads);
  StrategyConfig scfg;
  scfg.dt = s.dt;

  std::vector<std::pair<std::vector<int>, int>> previous;  // last matching
  std::vector<Theorem> previous_which;

  detect();
  const double t_end = s.max_time - 1e-9 * s.dt;
  std::int64_t step = 0;
  while (any_active() && t < t_end) {
    TickRecord rec;
    snapshot(rec);

    std::vector<Vec2> u_E(ne, Vec2::Zero());
    for (std::size_t j = 0; j < ne; ++j) {
      if (evaders[j].status != EvaderStatus::Active) continue;
      WorldSnapshot w{t, pursuers, evaders, &s.goal, static_cast<int>(j)};
      Vec2 u = strategies[j]->control(w);
      const double n = u.norm();
      if (n > 1.0) u /= n;
      u_E[j] = u;
    }

    GameGraph graph = build_game_graph(pursuers, evaders, s.goal, gopts);
    for (const auto& w : graph.warnings) log.events.push_back({t, EventKind::SolverFailure, {}, w});

    // Matched edges stay in the graph while their safe distance is positive.
    std::vector<bool> committed(graph.edges.size(), false);
    for (std::size_t k = 0; k < previous.size(); ++k) {
      const auto& [coalition, j] = previous[k];
      if (evaders[static_cast<std::size_t>(j)].status != EvaderStatus::Active) continue;
      const bool present = std::any_of(graph.edges.begin(), graph.edges.end(), [&](const GameEdge& e) {
        return e.coalition == coalition && e.evader == j;
      });
      if (present) continue;
      CoalitionState X;
      for (int i : coalition) X.pursuers.push_back(pursuers[static_cast<std::size_t>(i)]);
      X.evader = evaders[static_cast<std::size_t>(j)];
      try {
        EnclosureSolution sol = solve_safe_distance(X, s.goal, s.numeric);
        if (sol.rho > 0.0) {
          GameEdge edge;
          edge.coalition = coalition;
          edge.evader = j;
          edge.rho = sol.rho;
          edge.certificate.winner = coalition.size() == 1 ? Verdict::ErpWin1v1 : Verdict::ErpWin2v1;
          edge.certificate.pursuer_index = coalition.size() == 1 ? 0 : -1;
          edge.certificate.which = previous_which[k];
          edge.certificate.observed_rho = sol.rho;
          edge.certificate.solution = std::move(sol);
          graph.edges.push_back(std::move(edge));
          committed.push_back(true);
        }
      } catch (const Error& err) {
        log.events.push_back({t, EventKind::SolverFailure, {}, err.what()});
      }
    }
    // Restore lexicographic order: coalition vertex, then evader.
    {
      std::vector<std::size_t> order(graph.edges.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      auto vertex_of = [&](const std::vector<int>& c) {
        return std::find(graph.coalition_vertices.begin(), graph.coalition_vertices.end(), c) -
               graph.coalition_vertices.begin();
      };
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto va = vertex_of(graph.edges[a].coalition);
        const auto vb = vertex_of(graph.edges[b].coalition);
        return va != vb ? va < vb : graph.edges[a].evader < graph.edges[b].evader;
      });
      std::vector<GameEdge> sorted;
      std::vector<bool> sorted_committed;
      for (std::size_t k : order) {
        sorted.push_back(std::move(graph.edges[k]));
        sorted_committed.push_back(committed[k]);
      }
      graph.edges = std::move(sorted);
      committed = std::move(sorted_committed);
    }

    const ConflictGraph cg = build_conflict_graph(graph);
    Matching matching = solve_bip(graph, cg, s.z_mode);
    keep_incumbent(matching, previous, graph, s.z_mode);

    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
      const auto& e = graph.edges[k];
      rec.edges.push_back({e.coalition, e.evader, e.rho, e.certificate.which, committed[k]});
    }
    rec.matched = matching.edge_indices;

    if (matching.assignments != previous) {
      Event ev{t, EventKind::MatchChange, {}, {}};
      for (const auto& [c, j] : matching.assignments) ev.actors.push_back(edge_label(c, j, s.pursuer_ids, s.evader_ids));
      log.events.push_back(std::move(ev));
    }
    previous = matching.assignments;
    previous_which.clear();
    for (int k : matching.edge_indices) previous_which.push_back(graph.edges[static_cast<std::size_t>(k)].certificate.which);

    // Pursuer controls.
    std::vector<double> u_P(np, std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> evader_matched(ne, false);
    for (int k : matching.edge_indices) {
      const GameEdge& e = graph.edges[static_cast<std::size_t>(k)];
      const auto j = static_cast<std::size_t>(e.evader);
      evader_matched[j] = true;
      try {
        if (e.coalition.size() == 2 && e.certificate.winner == Verdict::ErpWin2v1) {
          CoalitionState X{{pursuers[static_cast<std::size_t>(e.coalition[0])],
                            pursuers[static_cast<std::size_t>(e.coalition[1])]},
                           evaders[j]};
          const auto u = pursuit_control_2v1(X, e.certificate.solution, s.goal, u_E[j], scfg);
          u_P[static_cast<std::size_t>(e.coalition[0])] = u[0];
          u_P[static_cast<std::size_t>(e.coalition[1])] = u[1];
        } else {
          for (int i : e.coalition) {
            const PairState pair{pursuers[static_cast<std::size_t>(i)], evaders[j]};
            EnclosureSolution sol = e.coalition.size() == 1
                                        ? e.certificate.solution
                                        : solve_safe_distance(CoalitionState{{pair.pursuer}, pair.evader}, s.goal,
                                                              s.numeric);
            u_P[static_cast<std::size_t>(i)] = pursuit_control_1v1(pair, sol, s.goal, u_E[j], scfg);
          }
        }
      } catch (const Error& err) {
        log.events.push_back({t, EventKind::SolverFailure, {edge_label(e.coalition, e.evader, s.pursuer_ids, s.evader_ids)},
                              err.what()});
      }
    }
    for (std::size_t i = 0; i < np; ++i) {
      if (std::isfinite(u_P[i])) continue;
      // Unmatched: chase the nearest unmatched active evader, else the nearest active one.
      int target = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int pass = 0; pass < 2 && target < 0; ++pass) {
        for (std::size_t j = 0; j < ne; ++j) {
          if (evaders[j].status != EvaderStatus::Active) continue;
          if (pass == 0 && evader_matched[j]) continue;
          const double d = (evaders[j].pos - pursuers[i].pos).norm();
          if (d < best) {
            best = d;
            target = static_cast<int>(j);
          }
        }
      }
      u_P[i] = target >= 0 ? fallback_pursuit(pursuers[i], evaders[static_cast<std::size_t>(target)], s.dt) : 0.0;
    }
    for (auto& u : u_P) u = std::clamp(u, -1.0, 1.0);
    rec.pursuer_u = u_P;
    rec.evader_u = u_E;
    log.ticks.push_back(std::move(rec));

    for (std::size_t i = 0; i < np; ++i) pursuers[i] = step_pursuer(pursuers[i], u_P[i], s.dt);
    for (std::size_t j = 0; j < ne; ++j) {
      if (evaders[j].status == EvaderStatus::Active) evaders[j] = step_evader(evaders[j], u_E[j], s.dt);
    }
    ++step;
    t = static_cast<double>(step) * s.dt;
    detect();
  }

  TickRecord last;
  snapshot(last);
  last.pursuer_u.assign(np, 0.0);
  last.evader_u.assign(ne, Vec2::Zero());
  log.ticks.push_back(std::move(last));
  return log;
}

}  // namespace hcr
