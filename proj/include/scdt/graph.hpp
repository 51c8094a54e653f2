#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scdt/level_set.hpp"

namespace scdt {

// Undirected, connected graph over the levels of one categorical variable.
// Ids are positions in the declared level list. Immutable after construction.
class LevelGraph {
 public:
  using Edge = std::pair<LevelId, LevelId>;  // first < second

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(levels_.size()); }
  const std::vector<std::string>& levels() const { return levels_; }
  const std::string& level_name(LevelId v) const { return levels_.at(static_cast<std::size_t>(v)); }
  // Sorted by (first, second).
  const std::vector<Edge>& edges() const { return edges_; }
  LevelSet neighbors(LevelId v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  const std::vector<LevelSet>& adjacency() const { return adjacency_; }
  LevelSet all() const { return LevelSet::full(size()); }

  // Returns -1 when the name is not a level.
  LevelId find(const std::string& level) const;

  // Label-exact identity: level names in order plus the sorted edge list.
  std::string canonical_key() const;

 private:
  friend LevelGraph build_graph(std::string name, std::vector<std::string> levels,
                                const std::vector<std::pair<std::string, std::string>>& edges);
  friend LevelGraph induced_subgraph(const LevelGraph& g, LevelSet s);

  std::string name_;
  std::vector<std::string> levels_;
  std::vector<Edge> edges_;
  std::vector<LevelSet> adjacency_;
};

LevelGraph build_graph(std::string name, std::vector<std::string> levels,
                       const std::vector<std::pair<std::string, std::string>>& edges);

enum class BuiltinKind { Chain, Cycle, Grid };

// chain:n (n >= 2), cycle:n (n >= 3), grid:rows x cols (rows*cols >= 2).
// Level names are "0".."n-1" for chain/cycle and "r,c" for grids.
LevelGraph builtin_graph(BuiltinKind kind, int a, int b = 1);

// Accepts "builtin:chain:12", "builtin:cycle:12", "builtin:grid:4x5" or a path to a graph JSON file.
LevelGraph load_graph(const std::string& source);
LevelGraph parse_graph_json(const std::string& text);
std::string graph_to_json(const LevelGraph& g);

// Induced subgraph on `s` is connected. Singletons count as connected.
bool is_connected(const LevelGraph& g, LevelSet s);

// Levels of `s` in ascending id order; edges restricted to `s`.
LevelGraph induced_subgraph(const LevelGraph& g, LevelSet s);

// Mask-level connectivity used by hot loops; `adjacency` indexed by id.
bool is_connected_mask(const std::vector<LevelSet>& adjacency, LevelSet s);

}  // namespace scdt
