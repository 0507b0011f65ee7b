#include "fclear/oracles.hpp"

#include <bit>
#include <stdexcept>

namespace fclear {

std::vector<uint32_t> Graph::adjacency_masks() const {
  std::vector<uint32_t> adj(n, 0);
  for (auto [a, b] : edges) {
    adj[a] |= 1u << b;
    adj[b] |= 1u << a;
  }
  return adj;
}

bool is_independent(const Graph& g, uint32_t mask) {
  for (auto [a, b] : g.edges)
    if ((mask >> a & 1u) && (mask >> b & 1u)) return false;
  return true;
}

bool is_dominating(const Graph& g, uint32_t mask) {
  auto adj = g.adjacency_masks();
  for (int v = 0; v < g.n; ++v)
    if (!((mask >> v & 1u) || (mask & adj[v]))) return false;
  return true;
}

int max_independent_set(const Graph& g) {
  int best = 0;
  for (uint32_t mask = 0; mask < (1u << g.n); ++mask)
    if (is_independent(g, mask)) best = std::max(best, std::popcount(mask));
  return best;
}

int min_independent_dominating_set(const Graph& g) {
  int best = g.n + 1;
  for (uint32_t mask = 0; mask < (1u << g.n); ++mask)
    if (is_independent(g, mask) && is_dominating(g, mask))
      best = std::min(best, std::popcount(mask));
  return best;
}

std::vector<uint32_t> independent_sets_of_size(const Graph& g, int k) {
  std::vector<uint32_t> out;
  for (uint32_t mask = 0; mask < (1u << g.n); ++mask)
    if (std::popcount(mask) == k && is_independent(g, mask)) out.push_back(mask);
  return out;
}

Graph random_graph(int n, double p, std::mt19937& rng) {
  Graph g;
  g.n = n;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (coin(rng) < p) g.edges.push_back({a, b});
  return g;
}

Graph make_k3() { return Graph{3, {{0, 1}, {1, 2}, {0, 2}}}; }
Graph make_p3() { return Graph{3, {{0, 1}, {1, 2}}}; }
Graph make_c5() { return Graph{5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}}; }
Graph make_k13() { return Graph{4, {{0, 1}, {0, 2}, {0, 3}}}; }
Graph make_p4() { return Graph{4, {{0, 1}, {1, 2}, {2, 3}}}; }
Graph make_c4() { return Graph{4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}}; }
Graph make_2k2() { return Graph{4, {{0, 1}, {2, 3}}}; }

}  // namespace fclear
