#pragma once

#include <string>
#include <vector>

#include "fclear/model.hpp"

namespace fclear {

// Colored dependency graph over the banks of a system:
//   green u -> v : v's funds weakly increase with r_u
//                  (a debt u -> v, or a CDS out of u referencing v);
//   red   w -> v : v's funds can decrease when r_w rises (v holds CDSs
//                  referencing w whose notional exceeds what w owes v
//                  directly).
// By default all CDSs into v referencing w are aggregated before comparing
// against the direct debt w -> v; per-contract mode compares each CDS alone.
struct ColoredDigraph {
  int n = 0;
  std::vector<std::pair<int, int>> green;
  std::vector<std::pair<int, int>> red;
};

ColoredDigraph build_dependency_graph(const FinancialSystem& sys, bool aggregate = true);

enum class DependencyClass {
  Acyclic,        // no directed cycles at all
  RedToLeafOnly,  // red edges only point at nodes with no outgoing edges
  RedCycleFree,   // no red edge inside a strongly connected component
  General,        // some cycle contains a red edge
};

const char* dependency_class_name(DependencyClass c);

// Most restrictive class that applies.
DependencyClass classify_dependency_graph(const ColoredDigraph& g);

// Tarjan strongly connected components; returns component index per node.
std::vector<int> strongly_connected_components(int n,
                                               const std::vector<std::pair<int, int>>& edges,
                                               int* component_count = nullptr);

// "G u v" / "R u v" lines, bank ids resolved through the system.
std::string dependency_graph_to_text(const ColoredDigraph& g, const FinancialSystem& sys);

}  // namespace fclear
