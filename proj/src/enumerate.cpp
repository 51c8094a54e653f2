#include "scdt/enumerate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "scdt/error.hpp"

namespace scdt {

using json = nlohmann::json;

namespace {

// Grows `current` by one candidate at a time. Invariant: candidates == N(current) - current - excluded,
// where excluded holds ids below the root plus every vertex already branched on at an ancestor or
// earlier sibling. Each connected set containing the root is therefore reached along exactly one path.
template <typename Emit>
void extend(const std::vector<LevelSet>& adj, LevelSet current, LevelSet candidates, LevelSet excluded,
            int remaining, Emit& emit) {
  emit(current);
  if (remaining == 0) return;
  while (!candidates.empty()) {
    const LevelId u = candidates.min();
    const LevelSet bit_u = LevelSet::single(u);
    candidates = candidates - bit_u;
    const LevelSet grown = current | bit_u;
    const LevelSet next = (candidates | adj[static_cast<std::size_t>(u)]) - grown - excluded;
    extend(adj, grown, next, excluded, remaining - 1, emit);
    excluded |= bit_u;
  }
}

template <typename Emit>
void enumerate_connected(const LevelGraph& g, int max_size, Emit& emit) {
  const int n = g.size();
  const int limit = max_size <= 0 ? n : std::min(max_size, n);
  const auto& adj = g.adjacency();
  for (LevelId root = 0; root < n; ++root) {
    const LevelSet below(root == 0 ? 0 : (std::uint64_t{1} << root) - 1);
    const LevelSet start = LevelSet::single(root);
    extend(adj, start, adj[static_cast<std::size_t>(root)] - below, below | start, limit - 1, emit);
  }
}

}  // namespace

void for_each_connected_set(const LevelGraph& g, int max_size, const std::function<void(LevelSet)>& emit) {
  auto fn = [&](LevelSet s) { emit(s); };
  enumerate_connected(g, max_size, fn);
}

std::uint64_t count_connected_sets(const LevelGraph& g, int max_size) {
  std::uint64_t count = 0;
  auto fn = [&](LevelSet) { ++count; };
  enumerate_connected(g, max_size, fn);
  return count;
}

std::vector<BinarySplitCandidate> maximally_coarse_partitions(const LevelGraph& g) {
  const int n = g.size();
  if (n < 2) throw Error(ErrorCode::SingletonUniverse, "a single level admits no split");
  const LevelSet all = g.all();
  const auto& adj = g.adjacency();
  std::vector<BinarySplitCandidate> out;
  auto fn = [&](LevelSet s) {
    // Equal halves appear twice; keep the copy that holds id 0.
    if (2 * s.size() == n && !s.contains(0)) return;
    const LevelSet rest = all - s;
    if (!is_connected_mask(adj, rest)) return;
    if (s.contains(0)) {
      out.push_back({s, rest});
    } else {
      out.push_back({rest, s});
    }
  };
  enumerate_connected(g, n / 2, fn);
  std::sort(out.begin(), out.end(),
            [](const BinarySplitCandidate& a, const BinarySplitCandidate& b) { return lex_less(a.side_a, b.side_a); });
  return out;
}

namespace {

void exact_covers(const std::vector<std::vector<LevelSet>>& by_min_holder, LevelSet uncovered,
                  std::vector<LevelSet>& chosen, std::vector<std::vector<LevelSet>>& out) {
  if (uncovered.empty()) {
    out.push_back(chosen);
    return;
  }
  const LevelId v = uncovered.min();
  for (LevelSet m : by_min_holder[static_cast<std::size_t>(v)]) {
    if (!m.is_subset_of(uncovered)) continue;
    chosen.push_back(m);
    exact_covers(by_min_holder, uncovered - m, chosen, out);
    chosen.pop_back();
  }
}

bool coarsens(const std::vector<LevelSet>& coarse, const std::vector<LevelSet>& fine) {
  if (coarse.size() >= fine.size()) return false;
  return std::all_of(fine.begin(), fine.end(), [&](LevelSet f) {
    return std::any_of(coarse.begin(), coarse.end(), [&](LevelSet c) { return f.is_subset_of(c); });
  });
}

}  // namespace

std::vector<Partition> maximally_coarse_partitions_explicit(const Terrain& t) {
  const LevelSet universe = t.universe();
  if (universe.size() > kMaxExplicitUniverse) {
    throw Error(ErrorCode::UniverseTooLarge, "explicit partition search is limited to 16 levels, got " +
                                                 std::to_string(universe.size()));
  }
  if (universe.size() < 2) throw Error(ErrorCode::SingletonUniverse, "a single level admits no split");

  std::vector<LevelSet> members;
  if (t.is_graph_induced()) {
    for_each_connected_set(t.graph(), kUnlimited, [&](LevelSet s) {
      if (s != universe) members.push_back(s);
    });
  } else {
    members = t.members();
  }

  // In a cover built by always covering the smallest uncovered id, each member is only ever
  // chosen to cover its own smallest id.
  std::vector<std::vector<LevelSet>> by_min(kMaxLevels);
  for (LevelSet m : members) by_min[static_cast<std::size_t>(m.min())].push_back(m);

  std::vector<std::vector<LevelSet>> conforming;
  std::vector<LevelSet> chosen;
  exact_covers(by_min, universe, chosen, conforming);

  std::stable_sort(conforming.begin(), conforming.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });

  std::vector<Partition> out;
  for (std::size_t i = 0; i < conforming.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < conforming.size() && conforming[j].size() < conforming[i].size(); ++j) {
      if (coarsens(conforming[j], conforming[i])) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.emplace_back(conforming[i]);
  }
  std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
    return std::lexicographical_compare(a.parts().begin(), a.parts().end(), b.parts().begin(), b.parts().end(),
                                        lex_less);
  });
  return out;
}

PartitionCache::Entry PartitionCache::lookup_or_enumerate(const LevelGraph& g) {
  std::string key = g.canonical_key();
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      return it->second.candidates;
    }
  }
  auto fresh = std::make_shared<const std::vector<BinarySplitCandidate>>(maximally_coarse_partitions(g));
  std::unique_lock lock(mutex_);
  ++misses_;
  auto [it, inserted] = entries_.try_emplace(std::move(key), Stored{g.levels(), g.edges(), fresh});
  return it->second.candidates;
}

std::size_t PartitionCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::uint64_t PartitionCache::hits() const { return hits_.load(); }

std::uint64_t PartitionCache::misses() const { return misses_.load(); }

void PartitionCache::save(const std::string& path) const {
  std::shared_lock lock(mutex_);
  // Sorted by key so the file is stable across runs.
  std::map<std::string, const Stored*> ordered;
  for (const auto& [k, v] : entries_) ordered.emplace(k, &v);
  json entries = json::array();
  for (const auto& [k, stored] : ordered) {
    json e;
    e["levels"] = stored->levels;
    json edges = json::array();
    for (const auto& [a, b] : stored->edges) {
      edges.push_back({stored->levels[static_cast<std::size_t>(a)], stored->levels[static_cast<std::size_t>(b)]});
    }
    e["edges"] = std::move(edges);
    json cands = json::array();
    for (const auto& c : *stored->candidates) {
      json side = json::array();
      c.side_a.for_each([&](LevelId v) { side.push_back(stored->levels[static_cast<std::size_t>(v)]); });
      cands.push_back(std::move(side));
    }
    e["candidates"] = std::move(cands);
    entries.push_back(std::move(e));
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write partition cache '" + path + "'");
  out << json{{"entries", entries}}.dump() << '\n';
}

void PartitionCache::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open partition cache '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    const json doc = json::parse(buf.str());
    for (const auto& e : doc.at("entries")) {
      std::vector<std::pair<std::string, std::string>> edges;
      for (const auto& pair : e.at("edges")) edges.emplace_back(pair.at(0), pair.at(1));
      LevelGraph g = build_graph("cached", e.at("levels").get<std::vector<std::string>>(), edges);
      auto cands = std::make_shared<std::vector<BinarySplitCandidate>>();
      for (const auto& side : e.at("candidates")) {
        LevelSet a;
        for (const auto& name : side) {
          const LevelId id = g.find(name.get<std::string>());
          if (id < 0) throw Error(ErrorCode::InvalidModel, "cached candidate names an unknown level");
          a |= LevelSet::single(id);
        }
        cands->push_back({a, g.all() - a});
      }
      std::unique_lock lock(mutex_);
      entries_.insert_or_assign(g.canonical_key(), Stored{g.levels(), g.edges(), std::move(cands)});
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidModel, std::string("malformed partition cache: ") + ex.what());
  }
}

}  // namespace scdt
