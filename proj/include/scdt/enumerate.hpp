#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "scdt/graph.hpp"
#include "scdt/terrain.hpp"

namespace scdt {

inline constexpr int kUnlimited = 0;

// Emits every non-empty connected subset of size <= max_size exactly once (kUnlimited includes
// the full vertex set). Order: by smallest member, then depth-first extension order.
void for_each_connected_set(const LevelGraph& g, int max_size, const std::function<void(LevelSet)>& emit);
std::uint64_t count_connected_sets(const LevelGraph& g, int max_size);

// One side of a binary split {side_a, side_b}; side_a holds the smallest id of the universe.
struct BinarySplitCandidate {
  LevelSet side_a;
  LevelSet side_b;

  friend bool operator==(const BinarySplitCandidate&, const BinarySplitCandidate&) = default;
};

// All bipartitions with both sides connected, each once, sorted by side_a (lexicographic ids).
std::vector<BinarySplitCandidate> maximally_coarse_partitions(const LevelGraph& g);

// Exhaustive search for terrains without graph structure (universe capped at 16 levels).
// Graph-induced terrains are accepted and expanded to their member list first.
inline constexpr int kMaxExplicitUniverse = 16;
std::vector<Partition> maximally_coarse_partitions_explicit(const Terrain& t);

// Session cache of MP(G) keyed by LevelGraph::canonical_key(). Label-exact: isomorphic graphs
// with different names are separate entries. Concurrent readers, exclusive writers.
class PartitionCache {
 public:
  using Entry = std::shared_ptr<const std::vector<BinarySplitCandidate>>;

  Entry lookup_or_enumerate(const LevelGraph& g);

  std::size_t size() const;
  std::uint64_t hits() const;
  std::uint64_t misses() const;

  // Persistent form: {"entries": [{"levels": [...], "edges": [[a,b],...], "candidates": [[side_a...],...]}]}
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  struct Stored {
    std::vector<std::string> levels;
    std::vector<LevelGraph::Edge> edges;
    Entry candidates;
  };

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, Stored> entries_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

}  // namespace scdt
