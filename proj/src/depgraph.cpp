#include "fclear/depgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace fclear {

ColoredDigraph build_dependency_graph(const FinancialSystem& sys, bool aggregate) {
  ColoredDigraph g;
  g.n = sys.size();
  std::set<std::pair<int, int>> green, red;

  for (const auto& d : sys.debts) green.insert({d.debtor, d.creditor});
  for (const auto& c : sys.cdss) {
    green.insert({c.debtor, c.creditor});     // creditor gains as debtor recovers
    green.insert({c.reference, c.debtor});    // debtor's liability shrinks as w recovers
  }

  // Direct debt totals w -> v, used to discharge would-be red edges.
  std::map<std::pair<int, int>, double> debt_total;
  for (const auto& d : sys.debts) debt_total[{d.debtor, d.creditor}] += d.weight;

  if (aggregate) {
    std::map<std::pair<int, int>, double> cds_total;
    for (const auto& c : sys.cdss) cds_total[{c.reference, c.creditor}] += c.weight;
    for (const auto& [edge, notional] : cds_total) {
      auto it = debt_total.find(edge);
      const double covered = it == debt_total.end() ? 0.0 : it->second;
      if (covered < notional) red.insert(edge);
    }
  } else {
    for (const auto& c : sys.cdss) {
      auto it = debt_total.find({c.reference, c.creditor});
      const double covered = it == debt_total.end() ? 0.0 : it->second;
      if (covered < c.weight) red.insert({c.reference, c.creditor});
    }
  }

  g.green.assign(green.begin(), green.end());
  g.red.assign(red.begin(), red.end());
  return g;
}

std::vector<int> strongly_connected_components(int n,
                                               const std::vector<std::pair<int, int>>& edges,
                                               int* component_count) {
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) adj[u].push_back(v);

  std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stack_of;
  std::vector<bool> on_stack(n, false);
  int counter = 0, ncomp = 0;

  // Iterative Tarjan: frame = (node, next child index).
  std::vector<std::pair<int, size_t>> frames;
  for (int s = 0; s < n; ++s) {
    if (num[s] != -1) continue;
    frames.emplace_back(s, 0);
    while (!frames.empty()) {
      auto& [u, ci] = frames.back();
      if (ci == 0) {
        num[u] = low[u] = counter++;
        stack_of.push_back(u);
        on_stack[u] = true;
      }
      bool descended = false;
      while (ci < adj[u].size()) {
        int v = adj[u][ci++];
        if (num[v] == -1) {
          frames.emplace_back(v, 0);
          descended = true;
          break;
        }
        if (on_stack[v]) low[u] = std::min(low[u], num[v]);
      }
      if (descended) continue;
      if (low[u] == num[u]) {
        while (true) {
          int v = stack_of.back();
          stack_of.pop_back();
          on_stack[v] = false;
          comp[v] = ncomp;
          if (v == u) break;
        }
        ++ncomp;
      }
      int finished = u;
      frames.pop_back();
      if (!frames.empty()) {
        int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  if (component_count) *component_count = ncomp;
  return comp;
}

const char* dependency_class_name(DependencyClass c) {
  switch (c) {
    case DependencyClass::Acyclic: return "Acyclic";
    case DependencyClass::RedToLeafOnly: return "RedToLeafOnly";
    case DependencyClass::RedCycleFree: return "RedCycleFree";
    case DependencyClass::General: return "General";
  }
  return "General";
}

DependencyClass classify_dependency_graph(const ColoredDigraph& g) {
  std::vector<std::pair<int, int>> all = g.green;
  all.insert(all.end(), g.red.begin(), g.red.end());

  int ncomp = 0;
  std::vector<int> comp = strongly_connected_components(g.n, all, &ncomp);

  // Any SCC with an internal edge contains a directed cycle.
  bool has_cycle = false;
  for (auto [u, v] : all)
    if (comp[u] == comp[v]) {
      has_cycle = true;
      break;
    }
  if (!has_cycle) return DependencyClass::Acyclic;

  std::vector<int> outdeg(g.n, 0);
  for (auto [u, v] : all) {
    (void)v;
    ++outdeg[u];
  }
  bool red_to_leaf = true;
  for (auto [u, v] : g.red) {
    (void)u;
    if (outdeg[v] != 0) {
      red_to_leaf = false;
      break;
    }
  }
  if (red_to_leaf) return DependencyClass::RedToLeafOnly;

  bool red_in_cycle = false;
  for (auto [u, v] : g.red)
    if (comp[u] == comp[v]) {
      red_in_cycle = true;
      break;
    }
  return red_in_cycle ? DependencyClass::General : DependencyClass::RedCycleFree;
}

std::string dependency_graph_to_text(const ColoredDigraph& g, const FinancialSystem& sys) {
  std::ostringstream os;
  for (auto [u, v] : g.green) os << "G " << sys.banks[u].id << " " << sys.banks[v].id << "\n";
  for (auto [u, v] : g.red) os << "R " << sys.banks[u].id << " " << sys.banks[v].id << "\n";
  return os.str();
}

}  // namespace fclear
