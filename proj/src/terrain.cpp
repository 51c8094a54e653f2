#include "scdt/terrain.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scdt/error.hpp"

namespace scdt {

using json = nlohmann::json;

Partition::Partition(std::vector<LevelSet> parts) : parts_(std::move(parts)) {
  LevelSet seen;
  for (LevelSet p : parts_) {
    if (p.empty()) throw Error(ErrorCode::WrongUniverse, "partition has an empty part");
    if (p.intersects(seen)) throw Error(ErrorCode::WrongUniverse, "partition parts overlap");
    seen |= p;
  }
  std::sort(parts_.begin(), parts_.end(), [](LevelSet a, LevelSet b) { return a.min() < b.min(); });
}

LevelSet Partition::universe() const {
  LevelSet u;
  for (LevelSet p : parts_) u |= p;
  return u;
}

Terrain Terrain::graph_induced(LevelGraph g) {
  Terrain t;
  t.names_ = g.levels();
  t.universe_ = g.all();
  t.graph_ = std::make_shared<const LevelGraph>(std::move(g));
  return t;
}

Terrain Terrain::explicit_members(std::vector<std::string> level_names, LevelSet universe,
                                  std::vector<LevelSet> members) {
  if (level_names.size() > static_cast<std::size_t>(kMaxLevels)) {
    throw Error(ErrorCode::TooManyLevels, "explicit terrain has more than 64 levels");
  }
  if (universe.empty() || !universe.is_subset_of(LevelSet::full(static_cast<int>(level_names.size())))) {
    throw Error(ErrorCode::NotASubset, "terrain universe does not fit its level names");
  }
  Terrain t;
  t.names_ = std::move(level_names);
  t.universe_ = universe;
  for (LevelSet m : members) {
    if (!m.is_subset_of(universe)) {
      throw Error(ErrorCode::NotASubset, "terrain member " + m.to_string() + " is outside the universe");
    }
    if (m.empty() || m == universe) continue;
    t.members_.push_back(m);
  }
  universe.for_each([&](LevelId v) { t.members_.push_back(LevelSet::single(v)); });
  std::sort(t.members_.begin(), t.members_.end(), lex_less);
  t.members_.erase(std::unique(t.members_.begin(), t.members_.end()), t.members_.end());
  return t;
}

const LevelGraph& Terrain::graph() const {
  if (!graph_) throw Error(ErrorCode::InvalidParams, "terrain is not graph-induced");
  return *graph_;
}

LevelSet Terrain::ids_of(const std::vector<std::string>& names) const {
  LevelSet s;
  for (const auto& n : names) {
    auto it = std::find(names_.begin(), names_.end(), n);
    if (it == names_.end()) throw Error(ErrorCode::UnknownLevel, "level '" + n + "' is not in the terrain");
    s |= LevelSet::single(static_cast<LevelId>(it - names_.begin()));
  }
  return s;
}

std::vector<std::string> Terrain::names_of(LevelSet s) const {
  std::vector<std::string> out;
  s.for_each([&](LevelId v) { out.push_back(names_.at(static_cast<std::size_t>(v))); });
  return out;
}

bool contains(const Terrain& t, LevelSet s) {
  if (s.empty() || !s.is_subset_of(t.universe())) {
    throw Error(ErrorCode::NotASubset, "set " + s.to_string() + " is not a non-empty subset of the universe");
  }
  if (s == t.universe()) return false;
  if (s.size() == 1) return true;
  if (t.is_graph_induced()) return is_connected(t.graph(), s);
  return std::binary_search(t.members().begin(), t.members().end(), s, lex_less);
}

bool conforms(const Partition& p, const Terrain& t) {
  if (p.universe() != t.universe()) {
    throw Error(ErrorCode::WrongUniverse, "partition does not cover the terrain universe");
  }
  return std::all_of(p.parts().begin(), p.parts().end(), [&](LevelSet part) { return contains(t, part); });
}

bool is_coarsening(const Partition& coarse, const Partition& fine) {
  if (coarse.universe() != fine.universe()) {
    throw Error(ErrorCode::WrongUniverse, "partitions cover different universes");
  }
  if (coarse.size() >= fine.size()) return false;
  return std::all_of(fine.parts().begin(), fine.parts().end(), [&](LevelSet f) {
    return std::any_of(coarse.parts().begin(), coarse.parts().end(),
                       [&](LevelSet c) { return f.is_subset_of(c); });
  });
}

Terrain restrict(const Terrain& t, LevelSet b) {
  if (b.empty() || !b.is_subset_of(t.universe())) {
    throw Error(ErrorCode::NotASubset, "restriction set " + b.to_string() + " is outside the universe");
  }
  if (b == t.universe() || b.size() < 2) {
    throw Error(ErrorCode::NotProperSubset,
                "restriction needs a proper subset with at least 2 levels, got " + b.to_string());
  }
  if (t.is_graph_induced()) return Terrain::graph_induced(induced_subgraph(t.graph(), b));

  std::vector<LevelSet> kept;
  for (LevelSet m : t.members()) {
    if (m.is_subset_of(b) && m != b) kept.push_back(m);
  }
  return Terrain::explicit_members(t.level_names(), b, std::move(kept));
}

Terrain parse_terrain_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    auto names = doc.at("universe").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (names[i] == names[j]) throw Error(ErrorCode::DuplicateLevel, "level '" + names[i] + "' repeated");
      }
    }
    if (names.size() > static_cast<std::size_t>(kMaxLevels)) {
      throw Error(ErrorCode::TooManyLevels, "explicit terrain has more than 64 levels");
    }
    const LevelSet universe = LevelSet::full(static_cast<int>(names.size()));
    std::vector<LevelSet> members;
    for (const auto& m : doc.at("members")) {
      LevelSet s;
      for (const auto& name : m.get<std::vector<std::string>>()) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw Error(ErrorCode::NotASubset, "member level '" + name + "' not in universe");
        s |= LevelSet::single(static_cast<LevelId>(it - names.begin()));
      }
      members.push_back(s);
    }
    return Terrain::explicit_members(std::move(names), universe, std::move(members));
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidSchema, std::string("malformed terrain JSON: ") + ex.what());
  }
}

Terrain load_terrain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open terrain file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_terrain_json(buf.str());
}

std::string terrain_to_json(const Terrain& t) {
  json doc;
  doc["universe"] = t.names_of(t.universe());
  json members = json::array();
  if (t.is_graph_induced()) throw Error(ErrorCode::InvalidParams, "graph terrains serialize as graphs");
  for (LevelSet m : t.members()) {
    if (m.size() > 1) members.push_back(t.names_of(m));
  }
  doc["members"] = std::move(members);
  return doc.dump();
}

}  // namespace scdt
