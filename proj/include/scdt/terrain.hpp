#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "scdt/graph.hpp"
#include "scdt/level_set.hpp"

namespace scdt {

// A partition of some universe into non-empty, pairwise disjoint parts,
// kept in canonical order (by smallest contained id).
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<LevelSet> parts);

  const std::vector<LevelSet>& parts() const { return parts_; }
  int size() const { return static_cast<int>(parts_.size()); }
  LevelSet universe() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<LevelSet> parts_;
};

// Set of "averageable" level subsets: every singleton, never the empty set, never the universe.
//
// A graph-induced terrain holds every connected proper subset of its graph; its universe is
// the graph's full id range. An explicit terrain holds a member list over a universe that may
// be a strict subset of its id space (restriction keeps the original ids).
class Terrain {
 public:
  static Terrain graph_induced(LevelGraph g);
  // `members` may omit singletons; duplicates, the empty set and the universe are dropped.
  static Terrain explicit_members(std::vector<std::string> level_names, LevelSet universe,
                                  std::vector<LevelSet> members);

  bool is_graph_induced() const { return graph_ != nullptr; }
  const LevelGraph& graph() const;
  LevelSet universe() const { return universe_; }
  // Names for the whole id space (not only the universe).
  const std::vector<std::string>& level_names() const { return names_; }
  // Explicit members including singletons, sorted with lex_less. Empty for graph terrains.
  const std::vector<LevelSet>& members() const { return members_; }

  LevelSet ids_of(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(LevelSet s) const;

 private:
  Terrain() = default;

  std::shared_ptr<const LevelGraph> graph_;
  std::vector<std::string> names_;
  LevelSet universe_;
  std::vector<LevelSet> members_;
};

bool contains(const Terrain& t, LevelSet s);
bool conforms(const Partition& p, const Terrain& t);
bool is_coarsening(const Partition& coarse, const Partition& fine);

// Restriction to a proper subset `b` of the universe; members are those strictly inside `b`.
// Graph terrains restrict to the induced subgraph (ids renumbered 0..|b|-1 in ascending order).
Terrain restrict(const Terrain& t, LevelSet b);

// {"universe": [...], "members": [[...], ...]}
Terrain parse_terrain_json(const std::string& text);
Terrain load_terrain(const std::string& path);
std::string terrain_to_json(const Terrain& t);

}  // namespace scdt
