#pragma once

// Brute-force reference implementations used only by tests. They work on plain vectors and
// edge lists so they share no code path with the mask-based library routines.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scdt/graph.hpp"

namespace oracle {

using Edges = std::vector<std::pair<int, int>>;
using Subset = std::vector<int>;           // sorted ids
using SetPartition = std::vector<Subset>;  // parts sorted by first element

inline std::vector<int> members_of(std::uint64_t bits) {
  std::vector<int> out;
  for (int i = 0; i < 64; ++i) {
    if ((bits >> i) & 1U) out.push_back(i);
  }
  return out;
}

inline bool bfs_connected(int n, const Edges& edges, const Subset& s) {
  if (s.empty()) return false;
  std::vector<char> in(static_cast<std::size_t>(n), 0), seen(static_cast<std::size_t>(n), 0);
  for (int v : s) in[static_cast<std::size_t>(v)] = 1;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::queue<int> q;
  q.push(s.front());
  seen[static_cast<std::size_t>(s.front())] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int w : adj[static_cast<std::size_t>(u)]) {
      if (in[static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  return reached == s.size();
}

// Random connected graph: random spanning tree plus each remaining pair with probability `density`.
inline Edges random_connected_edges(int n, double density, std::mt19937_64& rng) {
  Edges edges;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < n; ++i) {
    const int parent = order[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i))];
    const int child = order[static_cast<std::size_t>(i)];
    edges.emplace_back(std::min(parent, child), std::max(parent, child));
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end()) continue;
      if (coin(rng) < density) edges.emplace_back(a, b);
    }
  }
  return edges;
}

inline scdt::LevelGraph to_level_graph(int n, const Edges& edges) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  std::vector<std::pair<std::string, std::string>> named;
  for (auto [a, b] : edges) named.emplace_back(names[static_cast<std::size_t>(a)], names[static_cast<std::size_t>(b)]);
  return scdt::build_graph("random", names, named);
}

// Every set partition of {0..n-1} via restricted growth strings.
inline std::vector<SetPartition> all_set_partitions(int n) {
  std::vector<SetPartition> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int max_block) {
    if (i == n) {
      SetPartition p(static_cast<std::size_t>(max_block + 1));
      for (int v = 0; v < n; ++v) p[static_cast<std::size_t>(rgs[static_cast<std::size_t>(v)])].push_back(v);
      out.push_back(std::move(p));
      return;
    }
    for (int b = 0; b <= max_block + 1; ++b) {
      rgs[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(max_block, b));
    }
  };
  if (n > 0) {
    rgs[0] = 0;
    rec(1, 0);
  }
  return out;
}

inline bool subset_of(const Subset& a, const Subset& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

// Literal coarsening test: |coarse| < |fine| and every fine part sits inside some coarse part.
inline bool coarsening(const SetPartition& coarse, const SetPartition& fine) {
  if (coarse.size() >= fine.size()) return false;
  for (const auto& f : fine) {
    bool inside = false;
    for (const auto& c : coarse) inside = inside || subset_of(f, c);
    if (!inside) return false;
  }
  return true;
}

// Maximally coarse members of `conforming`, checked pairwise against every other member.
inline std::vector<SetPartition> maximally_coarse(const std::vector<SetPartition>& conforming) {
  std::vector<SetPartition> out;
  for (const auto& p : conforming) {
    bool maximal = true;
    for (const auto& q : conforming) {
      if (coarsening(q, p)) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.push_back(p);
  }
  return out;
}

}  // namespace oracle
