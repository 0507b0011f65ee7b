#include <doctest.h>

#include <random>

#include "fclear/oracles.hpp"

using namespace fclear;

TEST_CASE("named graphs have the expected optima") {
  struct Row {
    Graph g;
    int maxis;
    int minids;
  };
  const Row rows[] = {
      {make_k3(), 1, 1}, {make_p3(), 2, 1},  {make_c5(), 2, 2}, {make_k13(), 3, 1},
      {make_p4(), 2, 2}, {make_c4(), 2, 2},  {make_2k2(), 2, 2},
  };
  for (const auto& row : rows) {
    CAPTURE(row.g.n);
    CHECK(max_independent_set(row.g) == row.maxis);
    CHECK(min_independent_dominating_set(row.g) == row.minids);
  }
}

TEST_CASE("independence and domination predicates") {
  Graph p3 = make_p3();  // path 0 - 1 - 2
  CHECK(is_independent(p3, 0b101));
  CHECK_FALSE(is_independent(p3, 0b011));
  CHECK(is_dominating(p3, 0b010));
  CHECK_FALSE(is_dominating(p3, 0b001));
  CHECK(is_independent(p3, 0));       // empty set is independent
  CHECK_FALSE(is_dominating(p3, 0));  // but dominates nothing
}

TEST_CASE("independent sets of fixed size") {
  Graph p3 = make_p3();
  auto size2 = independent_sets_of_size(p3, 2);
  REQUIRE(size2.size() == 1);
  CHECK(size2[0] == 0b101u);
  CHECK(independent_sets_of_size(p3, 3).empty());
  CHECK(independent_sets_of_size(p3, 1).size() == 3);
  Graph k3 = make_k3();
  CHECK(independent_sets_of_size(k3, 2).empty());
}

TEST_CASE("adjacency masks") {
  Graph p3 = make_p3();
  auto masks = p3.adjacency_masks();
  REQUIRE(masks.size() == 3);
  CHECK(masks[0] == 0b010u);
  CHECK(masks[1] == 0b101u);
  CHECK(masks[2] == 0b010u);
}

TEST_CASE("random graphs are reproducible and well-formed") {
  std::mt19937 rng1(42), rng2(42);
  Graph a = random_graph(8, 0.5, rng1);
  Graph b = random_graph(8, 0.5, rng2);
  CHECK(a.n == 8);
  CHECK(a.edges == b.edges);
  for (auto [u, v] : a.edges) {
    CHECK(u >= 0);
    CHECK(u < v);
    CHECK(v < 8);
  }
  std::mt19937 rng3(43);
  Graph c = random_graph(8, 1.0, rng3);
  CHECK(c.edges.size() == 28);  // complete graph
  CHECK(max_independent_set(c) == 1);
  CHECK(min_independent_dominating_set(c) == 1);
}
