#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "scdt/enumerate.hpp"
#include "scdt/error.hpp"
#include "scdt/terrain.hpp"

using namespace scdt;

namespace {

Terrain mammal_terrain() {
  return parse_terrain_json(R"({
    "universe": ["Monkey", "Chimp", "Car", "Truck", "Dog", "Wolf"],
    "members": [["Monkey", "Chimp"], ["Car", "Truck"], ["Dog", "Wolf"], ["Monkey", "Chimp", "Dog", "Wolf"]]
  })");
}

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

TEST_CASE("graph-induced membership") {
  const auto t = Terrain::graph_induced(builtin_graph(BuiltinKind::Chain, 3));
  CHECK(contains(t, LevelSet{0, 1}));
  CHECK_FALSE(contains(t, LevelSet{0, 2}));
  CHECK_FALSE(contains(t, LevelSet{0, 1, 2}));
  CHECK(contains(t, LevelSet{2}));
  CHECK(code_of([&] { contains(t, LevelSet{3}); }) == ErrorCode::NotASubset);
}

TEST_CASE("explicit mammal terrain") {
  const auto t = mammal_terrain();
  CHECK_FALSE(contains(t, t.ids_of({"Chimp", "Dog"})));
  CHECK(contains(t, t.ids_of({"Monkey", "Chimp", "Dog", "Wolf"})));
  CHECK(contains(t, t.ids_of({"Truck"})));
  CHECK(t.members().size() == 10);

  const Partition animals_vehicles({t.ids_of({"Monkey", "Chimp", "Dog", "Wolf"}), t.ids_of({"Car", "Truck"})});
  CHECK(conforms(animals_vehicles, t));

  std::vector<LevelSet> singles;
  t.universe().for_each([&](LevelId v) { singles.push_back(LevelSet::single(v)); });
  CHECK(conforms(Partition(singles), t));
  CHECK_FALSE(conforms(Partition({t.universe()}), t));
  CHECK(code_of([&] { conforms(Partition({t.ids_of({"Car"})}), t); }) == ErrorCode::WrongUniverse);
}

TEST_CASE("coarsening") {
  const Partition p1({LevelSet{0, 1}, LevelSet{2}});
  const Partition p2({LevelSet{0}, LevelSet{1}, LevelSet{2}});
  CHECK(is_coarsening(p1, p2));
  CHECK_FALSE(is_coarsening(p2, p1));
  CHECK_FALSE(is_coarsening(p1, p1));
  // a=0 b=1 c=2 d=3
  const Partition q1({LevelSet{0, 1}, LevelSet{2, 3}});
  const Partition q2({LevelSet{0, 2}, LevelSet{1}, LevelSet{3}});
  CHECK_FALSE(is_coarsening(q1, q2));
  CHECK(code_of([&] { is_coarsening(p1, q1); }) == ErrorCode::WrongUniverse);
}

TEST_CASE("restriction") {
  const auto chain = Terrain::graph_induced(builtin_graph(BuiltinKind::Chain, 5));
  const auto mid = restrict(chain, LevelSet{1, 2, 3});
  REQUIRE(mid.is_graph_induced());
  CHECK(mid.graph().levels() == std::vector<std::string>{"1", "2", "3"});
  CHECK(mid.graph().edges().size() == 2);
  CHECK(code_of([&] { restrict(chain, LevelSet{0, 4}); }) == ErrorCode::DisconnectedInduced);
  CHECK(code_of([&] { restrict(chain, LevelSet{2}); }) == ErrorCode::NotProperSubset);
  CHECK(code_of([&] { restrict(chain, chain.universe()); }) == ErrorCode::NotProperSubset);

  const auto t = mammal_terrain();
  const auto animals = restrict(t, t.ids_of({"Monkey", "Chimp", "Dog", "Wolf"}));
  std::vector<std::vector<std::string>> named;
  for (LevelSet m : animals.members()) named.push_back(animals.names_of(m));
  std::sort(named.begin(), named.end());
  const std::vector<std::vector<std::string>> expected{
      {"Chimp"}, {"Dog"}, {"Dog", "Wolf"}, {"Monkey"}, {"Monkey", "Chimp"}, {"Wolf"}};
  CHECK(named == expected);
  CHECK_FALSE(contains(animals, animals.universe()));
}

TEST_CASE("restricting a graph terrain matches the induced-subgraph terrain") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const auto edges = oracle::random_connected_edges(n, 0.3, rng);
    const auto g = oracle::to_level_graph(n, edges);
    const auto t = Terrain::graph_induced(g);
    for_each_connected_set(g, n - 1, [&](LevelSet b) {
      if (b.size() < 2) return;
      const auto restricted = restrict(t, b);
      const auto direct = Terrain::graph_induced(induced_subgraph(g, b));
      // exhaustive membership comparison over all non-empty subsets of b (local ids)
      const std::uint64_t local_all = (std::uint64_t{1} << b.size()) - 1;
      for (std::uint64_t s = 1; s <= local_all; ++s) {
        REQUIRE(contains(restricted, LevelSet(s)) == contains(direct, LevelSet(s)));
        // and against the literal definition on the parent: A in T(G), A strictly inside B
        const LevelSet global = expand_into(LevelSet(s), b);
        const bool literal = global != b && oracle::bfs_connected(n, edges, oracle::members_of(global.bits()));
        REQUIRE(contains(restricted, LevelSet(s)) == literal);
      }
    });
  }
}

TEST_CASE("terrain predicates agree with literal definitions for |V| <= 6") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto edges = oracle::random_connected_edges(n, 0.3, rng);
    const auto t = Terrain::graph_induced(oracle::to_level_graph(n, edges));
    const std::uint64_t all = (std::uint64_t{1} << n) - 1;
    auto literal_member = [&](const oracle::Subset& s) {
      return s.size() != static_cast<std::size_t>(n) && oracle::bfs_connected(n, edges, s);
    };
    for (std::uint64_t s = 1; s <= all; ++s) {
      REQUIRE(contains(t, LevelSet(s)) == literal_member(oracle::members_of(s)));
    }
    const auto partitions = oracle::all_set_partitions(n);
    auto to_partition = [](const oracle::SetPartition& p) {
      std::vector<LevelSet> parts;
      for (const auto& part : p) parts.push_back(LevelSet::from_ids(part));
      return Partition(parts);
    };
    for (const auto& p : partitions) {
      bool literal = true;
      for (const auto& part : p) literal = literal && literal_member(part);
      REQUIRE(conforms(to_partition(p), t) == literal);
    }
    for (int k = 0; k < 200; ++k) {
      const auto& a = partitions[rng() % partitions.size()];
      const auto& b = partitions[rng() % partitions.size()];
      REQUIRE(is_coarsening(to_partition(a), to_partition(b)) == oracle::coarsening(a, b));
    }
  }
}
