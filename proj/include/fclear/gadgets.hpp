#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fclear/model.hpp"

namespace fclear {

// Handles to the interface nodes of a two-state branching gadget.
struct BranchPair {
  int x;
  int y;
  int source;
  int sink;
};

// Handles to the interface nodes of a modified (red-cycle-free) branching
// gadget: the free core pair plus binarized outputs and a mid-range trigger
// that downstream constraints must veto.
struct ModifiedBranch {
  int core;       // v0 of the mutual-debt pair; its rate is the free value
  int core2;      // v0'
  int x;          // 1 iff core rate <= 1/3 (on canonical states)
  int y;          // 1 iff core rate >= 2/3
  int trigger;    // fires on mid-range core rates; AND NOT(trigger) into v_C
};

// Record of one gadget instantiation, kept for manifests and for replaying a
// compilation with different weight rules.
struct GadgetRecord {
  std::string kind;
  std::map<std::string, double> params;
  std::vector<int> nodes;
};

// Incremental builder for gadget-based systems. Conventions:
//  - every gadget gets dedicated source/sink nodes; finalize() sets each
//    source's external assets to the sum of its outgoing notionals (the
//    finite stand-in for an unbounded money supply);
//  - NOT nodes are cached per input, so fan-out shares one gate;
//  - in bounded mode every emitted contract weight lies in [1, max_weight].
class GadgetBuilder {
 public:
  explicit GadgetBuilder(double alpha = 1.0, double beta = 1.0, bool bounded = false,
                         double max_weight = 4.0);

  FinancialSystem& system() { return sys_; }
  const FinancialSystem& system() const { return sys_; }
  const std::vector<GadgetRecord>& log() const { return log_; }
  bool bounded() const { return bounded_; }
  double max_emitted_weight() const { return max_emitted_; }

  // --- primitives ---------------------------------------------------------
  int add_node(const std::string& id, double external = 0.0, const std::string& role = "");
  int fresh_sink(const std::string& hint);
  int fresh_source(const std::string& hint);  // external set by finalize()
  void debt(int debtor, int creditor, double w);
  void cds(int debtor, int creditor, int reference, double w);
  // Large conditional obligation; in bounded mode it is split into unit-weight
  // CDSs towards distinct fresh sinks (or from distinct fresh sources when
  // `incoming` is true). `w` must then be integral.
  void penalty_cds(int debtor, int creditor, int reference, double w, bool incoming = false);

  // --- gadgets ------------------------------------------------------------
  // Two-state branching gadget (x,y) with exactly the states (1,0) and (0,1);
  // weights are chosen so the gadget stays binary for the builder's beta.
  BranchPair add_branching(const std::string& name);
  // delta_x = delta_y = 1 variant whose states form the continuum (rho, 1-rho).
  BranchPair add_continuum_branching(const std::string& name);

  int add_not(int v);                       // cached
  int add_or(const std::vector<int>& ins);
  int add_and(const std::vector<int>& ins);

  // Monotone threshold: output is exactly 0 for input <= eta1 and exactly 1
  // for input >= eta2; unconstrained in between. Bounded mode emits a longer
  // chain of stages with weights <= max_weight.
  int add_cutoff(int v, double eta1, double eta2);

  // Constant-weight k-of-k indicator: requires v to have total debt k split
  // over unit debts. Output is 1 iff r_v = 1, and 0 whenever r_v <= (k-1)/k.
  int add_const_cutoff_k(int v, int k);

  // Lossy penalty: if v0 defaults, v owes h into a chain engineered so that
  // no member of the chain prefers v0's default. Requires alpha < 1.
  // Returns the absorber node t0 (useful for routing further conditional
  // obligations of v into the same chain).
  int add_unhappy_penalty(int v, int v0, double h);

  // Red-cycle-free branching gadget (see ModifiedBranch).
  ModifiedBranch add_modified_branching(const std::string& name);

  // Sets source externals; validates the system.
  void finalize();

 private:
  int stage(int input, double theta, const std::string& hint);
  void note(const std::string& kind, std::initializer_list<std::pair<std::string, double>> params,
            std::initializer_list<int> nodes);
  void record_weight(double w);

  FinancialSystem sys_;
  bool bounded_;
  double max_weight_;
  double max_emitted_ = 0.0;
  int counter_ = 0;
  std::map<int, int> not_cache_;
  std::vector<GadgetRecord> log_;
};

}  // namespace fclear
