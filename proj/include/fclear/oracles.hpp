#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fclear {

// Simple undirected graph, 0-indexed.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<uint32_t> adjacency_masks() const;  // n <= 32
};

// Exhaustive subset oracles (n <= 26 or so; acceptance uses n <= 8).
bool is_independent(const Graph& g, uint32_t mask);
bool is_dominating(const Graph& g, uint32_t mask);
int max_independent_set(const Graph& g);
// Minimum independent dominating set size.
int min_independent_dominating_set(const Graph& g);

// All independent sets of size exactly k (bitmasks); used to cross-check the
// compiled constructions' satisfying assignments.
std::vector<uint32_t> independent_sets_of_size(const Graph& g, int k);

// Erdos-Renyi-ish random graph with edge probability p.
Graph random_graph(int n, double p, std::mt19937& rng);

// Named small graphs used throughout the test suites.
Graph make_k3();
Graph make_p3();
Graph make_c5();
Graph make_k13();  // star K_{1,3}
Graph make_p4();
Graph make_c4();
Graph make_2k2();  // two disjoint edges

}  // namespace fclear
