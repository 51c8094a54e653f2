#include "scdt/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "scdt/error.hpp"

namespace scdt {

using json = nlohmann::json;

LevelId LevelGraph::find(const std::string& level) const {
  auto it = std::find(levels_.begin(), levels_.end(), level);
  return it == levels_.end() ? -1 : static_cast<LevelId>(it - levels_.begin());
}

std::string LevelGraph::canonical_key() const {
  std::string key;
  for (const auto& l : levels_) {
    key += std::to_string(l.size());
    key += ':';
    key += l;
  }
  key += '|';
  for (const auto& [a, b] : edges_) {
    key += std::to_string(a);
    key += '-';
    key += std::to_string(b);
    key += ';';
  }
  return key;
}

bool is_connected_mask(const std::vector<LevelSet>& adjacency, LevelSet s) {
  if (s.empty()) return false;
  LevelSet reached = LevelSet::single(s.min());
  LevelSet frontier = reached;
  while (!frontier.empty()) {
    LevelSet next;
    frontier.for_each([&](LevelId v) { next |= adjacency[static_cast<std::size_t>(v)]; });
    frontier = (next & s) - reached;
    reached |= frontier;
  }
  return reached == s;
}

LevelGraph build_graph(std::string name, std::vector<std::string> levels,
                       const std::vector<std::pair<std::string, std::string>>& edges) {
  if (levels.size() > static_cast<std::size_t>(kMaxLevels)) {
    throw Error(ErrorCode::TooManyLevels, "graph '" + name + "' has " + std::to_string(levels.size()) +
                                              " levels; at most 64 are supported");
  }
  if (levels.empty()) throw Error(ErrorCode::InvalidDimensions, "graph '" + name + "' has no levels");

  std::unordered_map<std::string, LevelId> index;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i].empty()) throw Error(ErrorCode::InvalidSchema, "empty level name in graph '" + name + "'");
    if (!index.emplace(levels[i], static_cast<LevelId>(i)).second) {
      throw Error(ErrorCode::DuplicateLevel, "level '" + levels[i] + "' repeated in graph '" + name + "'");
    }
  }

  LevelGraph g;
  g.name_ = std::move(name);
  g.levels_ = std::move(levels);
  g.adjacency_.assign(g.levels_.size(), LevelSet{});

  std::set<LevelGraph::Edge> unique;
  for (const auto& [a, b] : edges) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      throw Error(ErrorCode::UnknownEndpoint, "edge (" + a + ", " + b + ") references an unknown level");
    }
    if (ia->second == ib->second) throw Error(ErrorCode::SelfLoop, "self-loop on level '" + a + "'");
    unique.emplace(std::min(ia->second, ib->second), std::max(ia->second, ib->second));
  }
  g.edges_.assign(unique.begin(), unique.end());
  for (const auto& [u, v] : g.edges_) {
    g.adjacency_[static_cast<std::size_t>(u)] |= LevelSet::single(v);
    g.adjacency_[static_cast<std::size_t>(v)] |= LevelSet::single(u);
  }

  if (!is_connected_mask(g.adjacency_, g.all())) {
    throw Error(ErrorCode::DisconnectedGraph, "graph '" + g.name_ + "' is not connected");
  }
  return g;
}

LevelGraph builtin_graph(BuiltinKind kind, int a, int b) {
  std::vector<std::string> levels;
  std::vector<std::pair<std::string, std::string>> edges;
  switch (kind) {
    case BuiltinKind::Chain:
    case BuiltinKind::Cycle: {
      const int min_n = kind == BuiltinKind::Chain ? 2 : 3;
      if (a < min_n) {
        throw Error(ErrorCode::InvalidDimensions,
                    std::string(kind == BuiltinKind::Chain ? "chain" : "cycle") + " needs at least " +
                        std::to_string(min_n) + " levels, got " + std::to_string(a));
      }
      for (int i = 0; i < a; ++i) levels.push_back(std::to_string(i));
      for (int i = 0; i + 1 < a; ++i) edges.emplace_back(levels[i], levels[i + 1]);
      if (kind == BuiltinKind::Cycle) edges.emplace_back(levels[a - 1], levels[0]);
      const std::string prefix = kind == BuiltinKind::Chain ? "chain:" : "cycle:";
      return build_graph(prefix + std::to_string(a), std::move(levels), edges);
    }
    case BuiltinKind::Grid: {
      if (a < 1 || b < 1 || a * b < 2) {
        throw Error(ErrorCode::InvalidDimensions,
                    "grid " + std::to_string(a) + "x" + std::to_string(b) + " needs at least 2 cells");
      }
      auto cell = [](int r, int c) { return std::to_string(r) + "," + std::to_string(c); };
      for (int r = 0; r < a; ++r) {
        for (int c = 0; c < b; ++c) levels.push_back(cell(r, c));
      }
      for (int r = 0; r < a; ++r) {
        for (int c = 0; c < b; ++c) {
          if (c + 1 < b) edges.emplace_back(cell(r, c), cell(r, c + 1));
          if (r + 1 < a) edges.emplace_back(cell(r, c), cell(r + 1, c));
        }
      }
      return build_graph("grid:" + std::to_string(a) + "x" + std::to_string(b), std::move(levels), edges);
    }
  }
  throw Error(ErrorCode::InvalidDimensions, "unknown builtin graph kind");
}

namespace {

int parse_dim(std::string_view text, const std::string& spec) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidDimensions, "cannot parse dimensions in '" + spec + "'");
  }
  return value;
}

LevelGraph parse_builtin(const std::string& spec) {
  std::string_view rest(spec);
  rest.remove_prefix(std::string_view("builtin:").size());
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::InvalidDimensions, "malformed builtin '" + spec + "'");
  const auto kind = rest.substr(0, colon);
  const auto dims = rest.substr(colon + 1);
  if (kind == "chain") return builtin_graph(BuiltinKind::Chain, parse_dim(dims, spec));
  if (kind == "cycle") return builtin_graph(BuiltinKind::Cycle, parse_dim(dims, spec));
  if (kind == "grid") {
    const auto x = dims.find('x');
    if (x == std::string_view::npos) throw Error(ErrorCode::InvalidDimensions, "grid needs RxC in '" + spec + "'");
    return builtin_graph(BuiltinKind::Grid, parse_dim(dims.substr(0, x), spec), parse_dim(dims.substr(x + 1), spec));
  }
  throw Error(ErrorCode::InvalidDimensions, "unknown builtin kind in '" + spec + "'");
}

}  // namespace

LevelGraph parse_graph_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::InvalidSchema, "edge must be a [str, str] pair");
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return build_graph(doc.value("name", std::string("graph")), doc.at("levels").get<std::vector<std::string>>(),
                       edges);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidSchema, std::string("malformed graph JSON: ") + ex.what());
  }
}

LevelGraph load_graph(const std::string& source) {
  if (source.rfind("builtin:", 0) == 0) return parse_builtin(source);
  std::ifstream in(source);
  if (!in) throw Error(ErrorCode::Io, "cannot open graph file '" + source + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph_json(buf.str());
}

std::string graph_to_json(const LevelGraph& g) {
  json doc;
  doc["name"] = g.name();
  doc["levels"] = g.levels();
  json edges = json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({g.level_name(a), g.level_name(b)});
  doc["edges"] = std::move(edges);
  return doc.dump();
}

bool is_connected(const LevelGraph& g, LevelSet s) {
  if (s.empty()) throw Error(ErrorCode::OutOfRangeId, "connectivity of the empty set is undefined");
  if (!s.is_subset_of(g.all())) {
    throw Error(ErrorCode::OutOfRangeId, "set " + s.to_string() + " has ids outside graph of size " +
                                             std::to_string(g.size()));
  }
  return is_connected_mask(g.adjacency(), s);
}

LevelGraph induced_subgraph(const LevelGraph& g, LevelSet s) {
  if (s.empty() || !s.is_subset_of(g.all())) {
    throw Error(ErrorCode::OutOfRangeId, "set " + s.to_string() + " is not a non-empty subset of the graph");
  }
  if (!is_connected_mask(g.adjacency_, s)) {
    throw Error(ErrorCode::DisconnectedInduced, "subgraph induced by " + s.to_string() + " is disconnected");
  }
  LevelGraph h;
  h.name_ = g.name_;
  s.for_each([&](LevelId v) { h.levels_.push_back(g.level_name(v)); });
  h.adjacency_.reserve(h.levels_.size());
  s.for_each([&](LevelId v) { h.adjacency_.push_back(compress_from(g.neighbors(v) & s, s)); });
  for (const auto& [a, b] : g.edges_) {
    if (s.contains(a) && s.contains(b)) {
      h.edges_.emplace_back(compress_from(LevelSet::single(a), s).min(), compress_from(LevelSet::single(b), s).min());
    }
  }
  std::sort(h.edges_.begin(), h.edges_.end());
  return h;
}

}  // namespace scdt
