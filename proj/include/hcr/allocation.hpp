#pragma once

#include "hcr/erp.hpp"
#include "hcr/world.hpp"

#include <span>
#include <string>
#include <vector>

namespace hcr {

struct GameEdge {
  std::vector<int> coalition;  ///< pursuer indices, size 1 or 2, ascending
  int evader = -1;
  double rho = 0.0;
  Certificate certificate;
};

/// Bipartite graph between pursuit coalitions and evaders; an edge exists
/// iff the coalition is certified against the evader.
struct GameGraph {
  int num_pursuers = 0;
  std::vector<std::vector<int>> coalition_vertices;
  std::vector<int> evader_vertices;
  std::vector<GameEdge> edges;
  std::vector<GameEdge> rejected;     ///< uncertified candidates, only with keep_rejected
  std::vector<std::string> warnings;  ///< certification failures, edge omitted
};

/// Edges of the game graph that share a pursuer.
struct ConflictGraph {
  std::vector<std::pair<int, int>> conflict_edges;  ///< i < j
  std::vector<std::vector<int>> adjacency;

  bool conflicts(int a, int b) const;
};

enum class ZMode { Zero, MaxRho, MinRho };

const char* to_string(ZMode m) noexcept;
ZMode zmode_from_string(const std::string& s);

struct Matching {
  std::vector<int> edge_indices;  ///< into GameGraph::edges, ascending
  std::vector<std::pair<std::vector<int>, int>> assignments;
  double objective = 0.0;
  ZMode z_mode = ZMode::Zero;

  std::size_t size() const { return edge_indices.size(); }
};

struct GraphOptions {
  bool relaxed = false;
  NumericConfig numeric;
  unsigned threads = 1;  ///< certification workers
  bool keep_rejected = false;
};

/// All coalitions of one or two pursuers against every active evader.
/// Evader vertices are indices into `evaders`.
GameGraph build_game_graph(std::span<const PursuerState> pursuers, std::span<const EvaderState> evaders,
                           const GoalRegion& G, const GraphOptions& opts = {});

ConflictGraph build_conflict_graph(const GameGraph& graph);

/// Tie-break weight of one assigned edge; throws unless L > rho >= 0.
double z_value(ZMode mode, double rho, double L, int Np, int Ne);

/// L = 1 + max rho over the graph edges, 1 for an empty graph.
double z_scale(const GameGraph& graph);

/// Exact maximiser of |M| + sum z over conflict-free matchings.
Matching solve_bip(const GameGraph& graph, const ConflictGraph& conflicts, ZMode mode);

}  // namespace hcr
