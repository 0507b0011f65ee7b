#include "fclear/gadgets.hpp"

#include <cmath>

namespace fclear {

GadgetBuilder::GadgetBuilder(double alpha, double beta, bool bounded, double max_weight)
    : bounded_(bounded), max_weight_(max_weight) {
  sys_.alpha = alpha;
  sys_.beta = beta;
}

int GadgetBuilder::add_node(const std::string& id, double external, const std::string& role) {
  return sys_.add_bank(id, external, role);
}

int GadgetBuilder::fresh_sink(const std::string& hint) {
  return add_node(hint + ".t" + std::to_string(counter_++), 0.0, "sink");
}

int GadgetBuilder::fresh_source(const std::string& hint) {
  // External assets are set by finalize() to the sum of outgoing notionals,
  // the finite stand-in for an unbounded money supply.
  return add_node(hint + ".s" + std::to_string(counter_++), 0.0, "source");
}

void GadgetBuilder::record_weight(double w) {
  max_emitted_ = std::max(max_emitted_, w);
  if (bounded_ && (w < 1.0 - 1e-12 || w > max_weight_ + 1e-12))
    throw Error(ErrorCode::UnsplittableContract,
                "contract weight " + std::to_string(w) + " outside [1," +
                    std::to_string(max_weight_) + "] in bounded mode");
}

void GadgetBuilder::debt(int debtor, int creditor, double w) {
  record_weight(w);
  sys_.add_debt(debtor, creditor, w);
}

void GadgetBuilder::cds(int debtor, int creditor, int reference, double w) {
  record_weight(w);
  sys_.add_cds(debtor, creditor, reference, w);
}

void GadgetBuilder::penalty_cds(int debtor, int creditor, int reference, double w, bool incoming) {
  if (!bounded_) {
    max_emitted_ = std::max(max_emitted_, w);
    sys_.add_cds(debtor, creditor, reference, w);
    return;
  }
  const long m = std::lround(w);
  if (std::fabs(w - static_cast<double>(m)) > 1e-9 || m < 1)
    throw Error(ErrorCode::UnsplittableContract,
                "penalty weight " + std::to_string(w) + " is not a positive integer");
  // Split into unit CDSs over distinct fresh endpoints so no single contract
  // carries a large notional.
  for (long i = 0; i < m; ++i) {
    if (incoming) {
      cds(fresh_source("pen"), creditor, reference, 1.0);
    } else {
      cds(debtor, fresh_sink("pen"), reference, 1.0);
    }
  }
}

void GadgetBuilder::note(const std::string& kind,
                         std::initializer_list<std::pair<std::string, double>> params,
                         std::initializer_list<int> nodes) {
  GadgetRecord rec;
  rec.kind = kind;
  for (const auto& p : params) rec.params.insert(p);
  rec.nodes.assign(nodes);
  log_.push_back(std::move(rec));
}

BranchPair GadgetBuilder::add_branching(const std::string& name) {
  // Mutually referencing CDSs keep (x,y) binary with exactly the states
  // (1,0) and (0,1). delta_x is inflated to 1/beta in lossy systems so that
  // the active state stays solvent despite haircuts.
  double dx = sys_.beta < 1.0 ? 1.0 / sys_.beta : 2.0;
  double dy = 1.0;
  int s = fresh_source(name);
  int t = fresh_sink(name);
  int x = add_node(name + ".x");
  int y = add_node(name + ".y");
  cds(s, x, y, dx);
  cds(s, y, x, dy);
  debt(x, t, 1.0);
  debt(y, t, 1.0);
  note("branching", {{"dx", dx}, {"dy", dy}}, {x, y, s, t});
  return {x, y, s, t};
}

BranchPair GadgetBuilder::add_continuum_branching(const std::string& name) {
  int s = fresh_source(name);
  int t = fresh_sink(name);
  int x = add_node(name + ".x");
  int y = add_node(name + ".y");
  cds(s, x, y, 1.0);
  cds(s, y, x, 1.0);
  debt(x, t, 1.0);
  debt(y, t, 1.0);
  note("continuum-branching", {}, {x, y, s, t});
  return {x, y, s, t};
}

int GadgetBuilder::add_not(int v) {
  auto it = not_cache_.find(v);
  if (it != not_cache_.end()) return it->second;
  int s = fresh_source("not");
  int t = fresh_sink("not");
  int w = add_node("not" + std::to_string(counter_++) + ".w");
  cds(s, w, v, 1.0);
  debt(w, t, 1.0);
  note("not", {{"input", static_cast<double>(v)}, {"output", static_cast<double>(w)}}, {w, s, t});
  not_cache_[v] = w;
  return w;
}

int GadgetBuilder::add_or(const std::vector<int>& ins) {
  if (ins.empty()) throw Error(ErrorCode::BadArgument, "or gate needs inputs");
  int s = fresh_source("or");
  int t = fresh_sink("or");
  int w = add_node("or" + std::to_string(counter_++) + ".w");
  for (int in : ins) cds(s, w, add_not(in), 1.0);
  debt(w, t, 1.0);
  note("or", {{"output", static_cast<double>(w)}}, {w, s, t});
  return w;
}

int GadgetBuilder::add_and(const std::vector<int>& ins) {
  if (ins.empty()) throw Error(ErrorCode::BadArgument, "and gate needs inputs");
  const int k = static_cast<int>(ins.size());
  if (k == 1) return add_or(ins);
  if (bounded_ && k > 2) {
    // De Morgan: AND(a..) = NOT(OR over negated inputs).
    std::vector<int> negs;
    negs.reserve(ins.size());
    for (int in : ins) negs.push_back(add_not(in));
    return add_not(add_or(negs));
  }
  // Collector whose rate is (#active inputs)/k, thresholded just below 1.
  int s = fresh_source("and");
  int t = fresh_sink("and");
  int w0 = add_node("and" + std::to_string(counter_++) + ".w");
  for (int in : ins) cds(s, w0, add_not(in), 1.0);
  debt(w0, t, static_cast<double>(k));
  int out = add_cutoff(w0, (3.0 * k - 2.0) / (3.0 * k), (3.0 * k - 1.0) / (3.0 * k));
  note("and", {{"k", static_cast<double>(k)}, {"output", static_cast<double>(out)}}, {w0, s, t});
  return out;
}

int GadgetBuilder::stage(int input, double theta, const std::string& hint) {
  // A stage is solvent (rate exactly 1) iff its input is at most theta; for
  // larger inputs its rate is beta * g * (1 - input) < 1 and in particular
  // exactly 0 for input 1.
  const double g = 1.0 / (1.0 - theta);
  int s = fresh_source(hint);
  int t = fresh_sink(hint);
  int st = add_node(hint + std::to_string(counter_++));
  cds(s, st, input, g);
  debt(st, t, 1.0);
  return st;
}

int GadgetBuilder::add_cutoff(int v, double eta1, double eta2) {
  if (!(0.0 < eta1 && eta1 < eta2 && eta2 < 1.0))
    throw Error(ErrorCode::BadArgument, "cutoff needs 0 < eta1 < eta2 < 1");
  const double beta = sys_.beta;
  const double theta_max = 1.0 - 1.0 / max_weight_;
  if (bounded_ && eta1 > theta_max + 1e-12)
    throw Error(ErrorCode::UnsplittableContract, "cutoff eta1 too large for bounded weights");
  // First stage: exact 1 for input <= eta1, at most b for input >= eta2.
  int cur = stage(v, eta1, "cut");
  double b = beta * (1.0 - eta2) / (1.0 - eta1);
  if (bounded_) {
    // Squeeze the residual range down with weight-[1,4] stage pairs. Each
    // pair maps the bad value 1 -> 0 -> 1 exactly and contracts the good
    // residual b to beta*(1 - 4*beta*(1-b)).
    int guard = 0;
    while (b > theta_max + 1e-12) {
      if (++guard > 64)
        throw Error(ErrorCode::UnsplittableContract, "cutoff chain does not contract");
      cur = stage(cur, theta_max, "cut");
      cur = stage(cur, 0.0, "cut");
      b = beta * (1.0 - max_weight_ * beta * (1.0 - b));
      b = std::max(b, 0.0);
    }
  }
  // Final stage: good residuals (<= b) lift to exact 1, the bad value 1
  // drops to exact 0.
  int out = stage(cur, b, "cut");
  note("cutoff",
       {{"eta1", eta1},
        {"eta2", eta2},
        {"input", static_cast<double>(v)},
        {"output", static_cast<double>(out)}},
       {out});
  return out;
}

int GadgetBuilder::add_const_cutoff_k(int v, int k) {
  if (k < 2) throw Error(ErrorCode::BadArgument, "constant-weight indicator needs k >= 2");
  // u collects k unit CDSs referencing v: income k*(1-r_v) covers u's unit
  // debt whenever r_v <= (k-1)/k, so u binarizes "v pays in full".
  int u = add_node("ccut" + std::to_string(counter_++) + ".u");
  for (int i = 0; i < k; ++i) cds(fresh_source("ccut"), u, v, 1.0);
  debt(u, fresh_sink("ccut"), 1.0);
  int out = add_not(u);
  note("const-cutoff",
       {{"k", static_cast<double>(k)},
        {"input", static_cast<double>(v)},
        {"output", static_cast<double>(out)}},
       {u, out});
  return out;
}

int GadgetBuilder::add_unhappy_penalty(int v, int v0, double h) {
  if (sys_.alpha >= 1.0)
    throw Error(ErrorCode::BadArgument, "unhappy penalty needs alpha < 1");
  if (bounded_)
    throw Error(ErrorCode::UnsplittableContract, "unhappy penalty emits unbounded weights");
  // If v0 defaults, v owes h into a semi-sink t0. The side nodes u and t0'
  // are sized (b large) so that t0's solvency chain in penalty-free
  // solutions pays t0' strictly more than any partial penalty flow can.
  const double b = (h + 5.0) / (1.0 - sys_.alpha);
  const std::string tag = "up" + std::to_string(counter_++);
  int t0 = add_node(tag + ".t0", 1.0);
  int t0p = add_node(tag + ".t0p", 0.0, "sink");
  int u = add_node(tag + ".u", b + 1.0);
  debt(u, t0, b);
  cds(u, t0p, v0, 2.0);
  debt(t0, t0p, b);
  cds(v, t0, v0, h);
  note("unhappy",
       {{"v", static_cast<double>(v)},
        {"v0", static_cast<double>(v0)},
        {"h", h},
        {"b", b}},
       {t0, t0p, u});
  return t0;
}

ModifiedBranch GadgetBuilder::add_modified_branching(const std::string& name) {
  // Free mutual-debt core; thresholds binarize the outputs away from the
  // mid-range, and the trigger flags mid-range rates for downstream vetoes.
  int v0 = add_node(name + ".v0");
  int v0p = add_node(name + ".v0p");
  debt(v0, v0p, 1.0);
  debt(v0p, v0, 1.0);
  int x = add_not(add_cutoff(v0, 1.0 / 3.0, 1.0 / 2.0));
  int y = add_cutoff(v0, 1.0 / 2.0, 2.0 / 3.0);
  int w1 = add_cutoff(v0, 1.0 / 6.0, 1.0 / 3.0);
  int w2 = add_cutoff(v0, 2.0 / 3.0, 5.0 / 6.0);
  int trigger = add_and({w1, add_not(w2)});
  note("modified-branching",
       {{"core", static_cast<double>(v0)},
        {"x", static_cast<double>(x)},
        {"y", static_cast<double>(y)},
        {"trigger", static_cast<double>(trigger)}},
       {v0, v0p, x, y, trigger});
  return {v0, v0p, x, y, trigger};
}

void GadgetBuilder::finalize() {
  std::vector<double> outgoing(sys_.size(), 0.0);
  for (const auto& d : sys_.debts) outgoing[d.debtor] += d.weight;
  for (const auto& c : sys_.cdss) outgoing[c.debtor] += c.weight;
  for (int v = 0; v < sys_.size(); ++v)
    if (sys_.banks[v].role == "source") sys_.banks[v].external = outgoing[v];
  sys_.validate();
}

}  // namespace fclear
