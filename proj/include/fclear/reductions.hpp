#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fclear/gadgets.hpp"
#include "fclear/model.hpp"
#include "fclear/objectives.hpp"
#include "fclear/oracles.hpp"
#include "fclear/solver.hpp"

namespace fclear {

// A compiled system together with its sidecar manifest. The manifest records
// everything needed to drive enumeration, decode solutions back to vertex
// sets, locate designated banks and replica blocks, and replay the
// compilation under different weight rules:
//   {
//     "objective": ..., "graph": {"n":.., "edges": [[a,b],..]},
//     "k": .., "m": .., "M": .., "alpha": .., "beta": ..,
//     "bounded": {"enabled": bool, "maxWeight": c},
//     "modifiedGadgets": bool,
//     "drivers": [{"name":.., "states": [{"label":.., "pins": [[bankId, rate],..]},..]},..],
//     "decode": {"activity": [bankId per vertex]},
//     "designated": {...}, "blocks": {"replicas": [[bankId,..],..], ...},
//     "solutions": {"r": {...}, "rprime": {...}}        (when applicable)
//   }
struct CompiledReduction {
  FinancialSystem system;
  nlohmann::json manifest;
};

struct CompileOptions {
  double alpha = 1.0;
  double beta = 1.0;
  bool bounded = false;
  bool modified_gadgets = false;  // use red-cycle-free branching gadgets
  int m = 4;                      // replica multiplicity for counting objectives
};

// Objective-function compilations. All of them share the same skeleton: one
// branching gadget per vertex, a NAND gate per edge, a conjunction node v_C,
// and objective-specific machinery whose value identities are recorded in
// the manifest.
CompiledReduction compile_objective(const Graph& g, ObjectiveKind kind,
                                    const CompileOptions& opts = {});

// Decision variant: adds a threshold on the designated bank so that a binary
// indicator v_D is 1 in some solution iff G has an independent set of size
// >= k.
CompiledReduction compile_decision(const Graph& g, int k, const CompileOptions& opts = {});

struct RepresentativeResult {
  CompiledReduction compiled;
  std::vector<double> r;        // empty-set solution (controls at 1)
  std::vector<double> rprime;   // one-active-gadget solution (controls at 0)
};

// Centrality construction: decision base + m_g generating gadgets + m_c
// control nodes + empty-set detector.
RepresentativeResult compile_representative(const Graph& g, int k, int m_g, int m_c,
                                            const CompileOptions& opts = {});

struct ParetoResult {
  CompiledReduction compiled;
  std::vector<double> r;  // the all-default solution
};

// Pareto-suboptimality construction (requires alpha < 1, beta < 1): a lossy
// binary pair v0/v0' plus unhappy penalties over the decision base; a
// solution strictly better than r exists iff G has an independent set of
// size >= k.
ParetoResult compile_pareto_suboptimal(const Graph& g, int k, double alpha, double beta);

enum class ShowcaseKind { InfiniteSolutions, ExponentialSolutions, FourOptima };

// Small demonstration systems: a solution continuum, 2^g essentially
// different solutions, and a single system whose four natural objectives
// have four different optimal solutions (parametrized by a magnitude h).
CompiledReduction build_showcase(ShowcaseKind kind, int param = 0);

// Replays a compiled system's manifest with bounded weights (all contract
// weights in [1, c], c <= 4). Throws UnsplittableContract when the manifest
// is missing or the recipe cannot be replayed with bounded weights.
CompiledReduction bounded_weight_transform(const CompiledReduction& in);

// Reconstructs enumeration drivers from a manifest.
std::vector<Driver> drivers_from_manifest(const FinancialSystem& sys,
                                          const nlohmann::json& manifest);

}  // namespace fclear
