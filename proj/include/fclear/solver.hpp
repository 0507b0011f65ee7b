#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fclear/model.hpp"

namespace fclear {

// Evaluation of one clearing state. For a rate vector r:
//   liability[v]      l_v(r)  = sum of debts + sum of CDS weights * (1 - r_ref)
//   inflow[v]                 = sum over contracts u->v of r_u * l_{u,v}(r)
//   lossless_assets[v] = e_v + inflow[v]
//   lossy_assets[v]    = alpha * e_v + beta * inflow[v]
// A defaulting bank only disposes of its lossy assets; a solvent bank of its
// lossless assets.
struct Evaluation {
  std::vector<double> liability;
  std::vector<double> inflow;
  std::vector<double> lossless_assets;
  std::vector<double> lossy_assets;
};

Evaluation evaluate_state(const FinancialSystem& sys, const std::vector<double>& rates);

// One synchronous best-response sweep: r'_v = 1 if l_v = 0 or lossless
// assets cover l_v, else clamp(lossy_assets / l_v, 0, 1).
std::vector<double> update_step(const FinancialSystem& sys, const std::vector<double>& rates);

// Equities q_v = max(assets - l_v, 0), with assets chosen per branch
// (lossless when r_v ~ 1, lossy otherwise).
std::vector<double> equities(const FinancialSystem& sys, const std::vector<double>& rates,
                             double tol = 1e-9);

struct Violation {
  int bank;
  std::string kind;  // "rate-out-of-range" | "zero-liability" | "solvency" | "payment" | "not-insolvent"
  double detail;
};

// Exact verification of the clearing conditions within tolerance `tol`
// (absolute on rates, relative with scale max(1, l_v) on money):
//   l_v = 0            -> r_v = 1
//   r_v >= 1 - tol     -> lossless assets >= l_v - tol*scale
//   r_v <  1 - tol     -> |r_v * l_v - lossy assets| <= tol*scale  and the
//                         bank is genuinely insolvent: lossless assets
//                         <= l_v - tol*scale.
// Returns all violations; an empty vector means `rates` is a clearing vector.
std::vector<Violation> check_clearing(const FinancialSystem& sys, const std::vector<double>& rates,
                                      double tol = 1e-9);

enum class IterateStatus { Converged, MaxIterations, Oscillating };

struct IterateOptions {
  double damping = 1.0;        // r <- (1-d) r + d * update(r)
  int max_iterations = 10000;
  double eps = 1e-13;          // sup-norm convergence threshold
  std::vector<std::pair<int, double>> pins;  // banks held at fixed rates
};

struct IterateResult {
  std::vector<double> rates;
  IterateStatus status;
  int iterations;
};

// Damped Picard iteration from a start vector (default all-ones).
IterateResult iterate(const FinancialSystem& sys, const IterateOptions& opts,
                      const std::vector<double>* start = nullptr);

// ---------------------------------------------------------------------------
// Driver-based enumeration. A driver is a named degree of freedom of the
// solution space (typically one branching gadget): each state pins a few
// banks to exact rates; banks without pins are settled by propagation.
// The Cartesian product of driver states is explored; combinations that do
// not verify are dropped, combinations whose propagation diverges are
// recorded.
struct DriverState {
  std::string label;
  std::vector<std::pair<int, double>> pins;
};

struct Driver {
  std::string name;
  std::vector<DriverState> states;
};

struct Solution {
  std::vector<double> rates;
  std::string assignment;  // "driver=state,driver=state,..."
};

struct SolutionSet {
  std::vector<Solution> solutions;       // sorted by assignment string
  std::vector<std::string> diverged;     // assignments whose propagation failed
};

struct EnumerateOptions {
  double tol = 1e-9;
  double damping = 0.5;
  int max_iterations = 4000;
  long cap = 1 << 20;  // max driver-state combinations
};

SolutionSet enumerate_solutions(const FinancialSystem& sys, const std::vector<Driver>& drivers,
                                const EnumerateOptions& opts = {});

// Exhaustive enumeration over candidate default sets (for systems with at
// most 16 banks that can default at all). For each subset D the complement
// is pinned solvent and the default-branch fixed point is searched from a
// few starts. Best-effort continuum detection: two verified solutions for
// the same default set differing by more than 10*tol.
struct DefaultSetResult {
  SolutionSet set;
  bool continuum_suspected = false;
};

DefaultSetResult enumerate_default_sets(const FinancialSystem& sys, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Solution-space analysis.

enum class ParetoVerdict { Equal, StrictlyBetter, StrictlyWorse, Incomparable };

// Compares r1 against r2 by bankwise equity: StrictlyBetter means r1 weakly
// improves every bank and strictly improves at least one.
ParetoVerdict pareto_compare(const FinancialSystem& sys, const std::vector<double>& r1,
                             const std::vector<double>& r2, double tol = 1e-9);

struct SpaceSummary {
  int essential_classes = 0;            // distinct default patterns
  std::vector<int> pareto_front;        // indices of non-dominated solutions
};

SpaceSummary solution_space_summary(const FinancialSystem& sys,
                                    const std::vector<Solution>& solutions, double tol = 1e-9);

}  // namespace fclear
