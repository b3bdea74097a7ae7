#include "hcr/allocation.hpp"

#include "hcr/error.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <optional>
#include <thread>

namespace hcr {

bool ConflictGraph::conflicts(int a, int b) const {
  const auto& adj = adjacency.at(static_cast<std::size_t>(a));
  return std::binary_search(adj.begin(), adj.end(), b);
}

const char* to_string(ZMode m) noexcept {
  switch (m) {
    case ZMode::Zero: return "zero";
    case ZMode::MaxRho: return "max-rho";
    case ZMode::MinRho: return "min-rho";
  }
  return "unknown";
}

ZMode zmode_from_string(const std::string& s) {
  if (s == "zero") return ZMode::Zero;
  if (s == "max-rho") return ZMode::MaxRho;
  if (s == "min-rho") return ZMode::MinRho;
  throw Error(Errc::InvalidArgument, "unknown z-mode '" + s + "' (expected zero, max-rho or min-rho)");
}

GameGraph build_game_graph(std::span<const PursuerState> pursuers, std::span<const EvaderState> evaders,
                           const GoalRegion& G, const GraphOptions& opts) {
  GameGraph graph;
  const int np = static_cast<int>(pursuers.size());
  graph.num_pursuers = np;
  for (int i = 0; i < np; ++i) graph.coalition_vertices.push_back({i});
  for (int i = 0; i < np; ++i) {
    for (int k = i + 1; k < np; ++k) graph.coalition_vertices.push_back({i, k});
  }
  for (int j = 0; j < static_cast<int>(evaders.size()); ++j) {
    if (evaders[static_cast<std::size_t>(j)].status == EvaderStatus::Active) graph.evader_vertices.push_back(j);
  }

  struct Task {
    std::vector<int> coalition;
    int evader;
    std::optional<GameEdge> edge;
    bool certified = false;
    std::string warning;
  };
  std::vector<Task> tasks;
  for (const auto& c : graph.coalition_vertices) {
    for (int j : graph.evader_vertices) tasks.push_back({c, j, std::nullopt, false, {}});
  }

  auto run = [&](Task& t) {
    CoalitionState X;
    for (int i : t.coalition) X.pursuers.push_back(pursuers[static_cast<std::size_t>(i)]);
    X.evader = evaders[static_cast<std::size_t>(t.evader)];
    try {
      Certificate cert = X.size() == 1 ? certify_1v1(X.pair(0), G, opts.relaxed, opts.numeric)
                                       : certify_2v1(X, G, opts.relaxed, opts.numeric);
      const double rho = cert.observed_rho;
      t.certified = cert.certified();
      t.edge = GameEdge{t.coalition, t.evader, rho, std::move(cert)};
    } catch (const Error& err) {
      t.warning = std::string("certification failed for evader ") + std::to_string(t.evader) + ": " + err.what();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(tasks.size())));
  if (workers <= 1) {
    for (auto& t : tasks) run(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) run(tasks[k]);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (auto& t : tasks) {
    if (t.edge && t.certified) {
      graph.edges.push_back(std::move(*t.edge));
    } else if (t.edge && opts.keep_rejected) {
      graph.rejected.push_back(std::move(*t.edge));
    }
    if (!t.warning.empty()) graph.warnings.push_back(std::move(t.warning));
  }
  return graph;
}

ConflictGraph build_conflict_graph(const GameGraph& graph) {
  ConflictGraph cg;
  const int m = static_cast<int>(graph.edges.size());
  cg.adjacency.assign(static_cast<std::size_t>(m), {});
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const auto& ca = graph.edges[static_cast<std::size_t>(a)].coalition;
      const auto& cb = graph.edges[static_cast<std::size_t>(b)].coalition;
      const bool shared = std::any_of(ca.begin(), ca.end(), [&](int i) {
        return std::find(cb.begin(), cb.end(), i) != cb.end();
      });
      if (shared) {
        cg.conflict_edges.emplace_back(a, b);
        cg.adjacency[static_cast<std::size_t>(a)].push_back(b);
        cg.adjacency[static_cast<std::size_t>(b)].push_back(a);
      }
    }
  }
  for (auto& adj : cg.adjacency) std::sort(adj.begin(), adj.end());
  return cg;
}

double z_value(ZMode mode, double rho, double L, int Np, int Ne) {
  if (!(rho >= 0.0) || !(L > rho)) throw Error(Errc::InvalidArgument, "z_value: requires L > rho >= 0");
  if (Np < 1 || Ne < 1) throw Error(Errc::InvalidArgument, "z_value: requires at least one pursuer and evader");
  const double z = rho / (std::min(Np, Ne) * L);
  switch (mode) {
    case ZMode::Zero: return 0.0;
    case ZMode::MaxRho: return z;
    case ZMode::MinRho: return -z;
  }
  return 0.0;
}

double z_scale(const GameGraph& graph) {
  double L = 0.0;
  for (const auto& e : graph.edges) L = std::max(L, e.rho);
  return 1.0 + L;
}

Matching solve_bip(const GameGraph& graph, const ConflictGraph& conflicts, ZMode mode) {
  Matching best;
  best.z_mode = mode;
  const int m = static_cast<int>(graph.edges.size());
  if (m == 0) return best;

  const double L = z_scale(graph);
  const int np = std::max(1, graph.num_pursuers);
  const int ne = std::max(1, static_cast<int>(graph.evader_vertices.size()));
  std::vector<double> weight(static_cast<std::size_t>(m));
  double zmax = 0.0;
  for (int k = 0; k < m; ++k) {
    const double z = z_value(mode, graph.edges[static_cast<std::size_t>(k)].rho, L, np, ne);
    weight[static_cast<std::size_t>(k)] = 1.0 + z;
    zmax = std::max(zmax, z);
  }

  std::vector<int> blocked(static_cast<std::size_t>(m), 0);  // conflict or evader-taken counters
  std::vector<int> chosen;
  double best_value = 0.0;
  std::vector<int> best_set;
  int free_evaders = static_cast<int>(graph.evader_vertices.size());

  auto block = [&](int k, int delta) {
    for (int b : conflicts.adjacency[static_cast<std::size_t>(k)]) blocked[static_cast<std::size_t>(b)] += delta;
    const int ev = graph.edges[static_cast<std::size_t>(k)].evader;
    for (int b = 0; b < m; ++b) {
      if (b != k && graph.edges[static_cast<std::size_t>(b)].evader == ev) blocked[static_cast<std::size_t>(b)] += delta;
    }
  };

  std::function<void(int, double)> dfs = [&](int k, double value) {
    if (value > best_value + 1e-12) {
      best_value = value;
      best_set = chosen;
    }
    if (k >= m) return;
    int open = 0;
    for (int b = k; b < m; ++b) open += blocked[static_cast<std::size_t>(b)] == 0;
    const double bound = value + std::min(open, free_evaders) * (1.0 + zmax);
    if (bound <= best_value + 1e-12) return;

    if (blocked[static_cast<std::size_t>(k)] == 0) {
      chosen.push_back(k);
      block(k, +1);
      --free_evaders;
      dfs(k + 1, value + weight[static_cast<std::size_t>(k)]);
      ++free_evaders;
      block(k, -1);
      chosen.pop_back();
    }
    dfs(k + 1, value);
  };
  dfs(0, 0.0);

  best.edge_indices = best_set;
  best.objective = best_value;
  for (int k : best_set) {
    const auto& e = graph.edges[static_cast<std::size_t>(k)];
    best.assignments.emplace_back(e.coalition, e.evader);
  }
  return best;
}

}  // namespace hcr
