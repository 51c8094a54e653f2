#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "scdt/error.hpp"
#include "scdt/graph.hpp"

using namespace scdt;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected scdt::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("build_graph validates levels and edges") {
  const auto g = build_graph("pair", {"a", "b"}, {{"a", "b"}});
  CHECK(g.size() == 2);
  CHECK(g.edges().size() == 1);

  CHECK(code_of([] { build_graph("x", {"a", "b", "c"}, {{"a", "b"}}); }) == ErrorCode::DisconnectedGraph);
  CHECK(code_of([] { build_graph("x", {"a", "a"}, {{"a", "a"}}); }) == ErrorCode::DuplicateLevel);
  CHECK(code_of([] { build_graph("x", {"a", "b"}, {{"a", "z"}}); }) == ErrorCode::UnknownEndpoint);
  CHECK(code_of([] { build_graph("x", {"a", "b"}, {{"a", "b"}, {"b", "b"}}); }) == ErrorCode::SelfLoop);

  // duplicate edge in either orientation collapses
  const auto dup = build_graph("x", {"a", "b"}, {{"a", "b"}, {"b", "a"}});
  CHECK(dup.edges().size() == 1);
}

TEST_CASE("builtin graphs have the expected sizes") {
  const auto chain = load_graph("builtin:chain:12");
  CHECK(chain.size() == 12);
  CHECK(chain.edges().size() == 11);
  const auto cycle = load_graph("builtin:cycle:12");
  CHECK(cycle.size() == 12);
  CHECK(cycle.edges().size() == 12);
  const auto g33 = load_graph("builtin:grid:3x3");
  CHECK(g33.size() == 9);
  CHECK(g33.edges().size() == 12);
  const auto g45 = load_graph("builtin:grid:4x5");
  CHECK(g45.size() == 20);
  CHECK(g45.edges().size() == 31);
  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 6; ++n) {
      if (m * n < 2) continue;
      const auto g = builtin_graph(BuiltinKind::Grid, m, n);
      CHECK(g.edges().size() == static_cast<std::size_t>(m * (n - 1) + n * (m - 1)));
    }
  }

  CHECK(code_of([] { builtin_graph(BuiltinKind::Chain, 1); }) == ErrorCode::InvalidDimensions);
  CHECK(code_of([] { builtin_graph(BuiltinKind::Cycle, 2); }) == ErrorCode::InvalidDimensions);
  CHECK(code_of([] { builtin_graph(BuiltinKind::Grid, 1, 1); }) == ErrorCode::InvalidDimensions);
  CHECK(code_of([] { load_graph("builtin:grid:4"); }) == ErrorCode::InvalidDimensions);
  CHECK(code_of([] { load_graph("/nonexistent/graph.json"); }) == ErrorCode::Io);
}

TEST_CASE("is_connected on small shapes") {
  const auto chain4 = builtin_graph(BuiltinKind::Chain, 4);
  CHECK(is_connected(chain4, LevelSet{0, 1, 2}));
  CHECK_FALSE(is_connected(chain4, LevelSet{0, 2}));
  CHECK(is_connected(chain4, LevelSet{3}));
  const auto cycle4 = builtin_graph(BuiltinKind::Cycle, 4);
  CHECK(is_connected(cycle4, LevelSet{3, 0}));
  CHECK(code_of([&] { is_connected(chain4, LevelSet{5}); }) == ErrorCode::OutOfRangeId);
}

TEST_CASE("induced_subgraph keeps names and order") {
  const auto grid = builtin_graph(BuiltinKind::Grid, 2, 2);
  // ids: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1); L-shape drops (1,1)
  const auto l_shape = induced_subgraph(grid, LevelSet{0, 1, 2});
  CHECK(l_shape.size() == 3);
  CHECK(l_shape.edges().size() == 2);
  CHECK(l_shape.levels() == std::vector<std::string>{"0,0", "0,1", "1,0"});

  const auto chain5 = builtin_graph(BuiltinKind::Chain, 5);
  const auto mid = induced_subgraph(chain5, LevelSet{1, 2, 3});
  CHECK(mid.levels() == std::vector<std::string>{"1", "2", "3"});
  CHECK(mid.edges() == std::vector<LevelGraph::Edge>{{0, 1}, {1, 2}});
  CHECK(code_of([&] { induced_subgraph(chain5, LevelSet{0, 4}); }) == ErrorCode::DisconnectedInduced);
}

TEST_CASE("graph JSON round trip") {
  const auto g = parse_graph_json(R"({"name":"tri","levels":["x","y","z"],"edges":[["x","y"],["z","y"]]})");
  CHECK(g.name() == "tri");
  const auto again = parse_graph_json(graph_to_json(g));
  CHECK(again.canonical_key() == g.canonical_key());
  CHECK(code_of([] { parse_graph_json(R"({"levels":["x"],"edges":[["x"]]})"); }) == ErrorCode::InvalidSchema);
}

TEST_CASE("is_connected agrees with BFS oracle on random graphs") {
  std::mt19937_64 rng(20240917);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto edges = oracle::random_connected_edges(n, 0.25, rng);
    const auto g = oracle::to_level_graph(n, edges);
    std::uint64_t bits = 0;
    while (bits == 0) bits = rng() & ((std::uint64_t{1} << n) - 1);
    const auto subset = oracle::members_of(bits);
    REQUIRE(is_connected(g, LevelSet(bits)) == oracle::bfs_connected(n, edges, subset));
  }
}
