#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fclear/gadgets.hpp"
#include "fclear/model.hpp"
#include "fclear/solver.hpp"

using namespace fclear;

namespace {

// Pins the input banks to the given rates (adjusting their externals so the
// pinned rates verify), settles the rest by plain sweeps, verifies the
// clearing conditions and returns the output bank's rate.
double settle(FinancialSystem& sys, const std::vector<int>& ins, const std::vector<double>& bits,
              int out) {
  for (size_t i = 0; i < ins.size(); ++i) sys.banks[ins[i]].external = bits[i];
  IterateOptions opts;
  opts.damping = 1.0;
  opts.max_iterations = 500;
  for (size_t i = 0; i < ins.size(); ++i) opts.pins.emplace_back(ins[i], bits[i]);
  IterateResult res = iterate(sys, opts);
  REQUIRE(res.status == IterateStatus::Converged);
  REQUIRE(check_clearing(sys, res.rates).empty());
  return res.rates[out];
}

// A free input: a bank with a unit debt so it can serve as a CDS reference.
int make_input(GadgetBuilder& B, const std::string& name) {
  int in = B.add_node(name);
  B.debt(in, B.fresh_sink(name), 1.0);
  return in;
}

}  // namespace

TEST_CASE("clean branching gadget has exactly the states (0,1) and (1,0)") {
  GadgetBuilder B;
  BranchPair bp = B.add_branching("g1");
  B.finalize();
  FinancialSystem& sys = B.system();
  DefaultSetResult res = enumerate_default_sets(sys);
  REQUIRE(res.set.solutions.size() == 2);
  CHECK_FALSE(res.continuum_suspected);
  std::vector<std::pair<double, double>> states;
  for (const auto& s : res.set.solutions) states.emplace_back(s.rates[bp.x], s.rates[bp.y]);
  std::sort(states.begin(), states.end());
  CHECK(states[0] == std::pair<double, double>(0.0, 1.0));
  CHECK(states[1] == std::pair<double, double>(1.0, 0.0));
}

TEST_CASE("continuum branching verifies (rho, 1-rho) across the whole grid") {
  GadgetBuilder B;
  BranchPair bp = B.add_continuum_branching("g1");
  B.finalize();
  FinancialSystem& sys = B.system();
  for (int i = 0; i <= 100; ++i) {
    const double rho = i / 100.0;
    std::vector<double> r(sys.size(), 1.0);
    r[bp.x] = rho;
    r[bp.y] = 1.0 - rho;
    CAPTURE(rho);
    CHECK(check_clearing(sys, r).empty());
  }
  DefaultSetResult res = enumerate_default_sets(sys);
  CHECK(res.continuum_suspected);
}

TEST_CASE("gate truth tables are exact") {
  const double params[2][2] = {{1.0, 1.0}, {0.5, 0.5}};
  for (const auto& ab : params) {
    const double alpha = ab[0], beta = ab[1];
    CAPTURE(alpha);
    CAPTURE(beta);

    SUBCASE("not") {
      GadgetBuilder B(alpha, beta);
      int in = make_input(B, "in1");
      int out = B.add_not(in);
      B.finalize();
      CHECK(settle(B.system(), {in}, {0.0}, out) == 1.0);
      CHECK(settle(B.system(), {in}, {1.0}, out) == 0.0);
      CHECK(B.add_not(in) == out);  // cached per input
    }

    SUBCASE("or, 2- and 3-input") {
      for (int n : {2, 3}) {
        GadgetBuilder B(alpha, beta);
        std::vector<int> ins;
        for (int i = 0; i < n; ++i) ins.push_back(make_input(B, "in" + std::to_string(i + 1)));
        int out = B.add_or(ins);
        B.finalize();
        for (int mask = 0; mask < (1 << n); ++mask) {
          std::vector<double> bits;
          bool any = false;
          for (int i = 0; i < n; ++i) {
            bits.push_back((mask >> i) & 1 ? 1.0 : 0.0);
            any |= ((mask >> i) & 1) != 0;
          }
          CAPTURE(mask);
          CHECK(settle(B.system(), ins, bits, out) == (any ? 1.0 : 0.0));
        }
      }
    }

    SUBCASE("and, 2- and 3-input, generic and bounded") {
      for (bool bounded : {false, true}) {
        for (int n : {2, 3}) {
          GadgetBuilder B(alpha, beta, bounded);
          std::vector<int> ins;
          for (int i = 0; i < n; ++i) ins.push_back(make_input(B, "in" + std::to_string(i + 1)));
          int out = B.add_and(ins);
          B.finalize();
          for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<double> bits;
            bool all = true;
            for (int i = 0; i < n; ++i) {
              bits.push_back((mask >> i) & 1 ? 1.0 : 0.0);
              all &= ((mask >> i) & 1) != 0;
            }
            CAPTURE(bounded);
            CAPTURE(n);
            CAPTURE(mask);
            CHECK(settle(B.system(), ins, bits, out) == (all ? 1.0 : 0.0));
          }
        }
      }
    }
  }
}

TEST_CASE("cutoffs are exactly 0/1 outside (eta1, eta2)") {
  const double etas[3][2] = {{1.0 / 6.0, 1.0 / 3.0}, {2.0 / 3.0, 5.0 / 6.0}, {0.7, 0.9}};
  for (bool bounded : {false, true}) {
    for (const auto& eta : etas) {
      GadgetBuilder B(1.0, 1.0, bounded);
      int in = make_input(B, "in1");
      int out = B.add_cutoff(in, eta[0], eta[1]);
      B.finalize();
      if (bounded) CHECK(B.max_emitted_weight() <= 4.0 + 1e-12);
      for (int i = 0; i <= 100; ++i) {
        const double t = i / 100.0;
        double got = settle(B.system(), {in}, {t}, out);
        CAPTURE(bounded);
        CAPTURE(eta[0]);
        CAPTURE(t);
        if (t <= eta[0]) {
          CHECK(got == 0.0);
        } else if (t >= eta[1]) {
          CHECK(got == 1.0);
        } else {
          CHECK(got >= 0.0);
          CHECK(got <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("cutoff parameter validation") {
  GadgetBuilder B;
  int in = make_input(B, "in1");
  CHECK_THROWS_AS(B.add_cutoff(in, 0.5, 0.5), Error);
  CHECK_THROWS_AS(B.add_cutoff(in, 0.0, 0.5), Error);
  GadgetBuilder Bb(1.0, 1.0, /*bounded=*/true);
  int inb = make_input(Bb, "in1");
  // eta1 beyond 1 - 1/max_weight cannot be realized with weight-4 stages.
  CHECK_THROWS_AS(Bb.add_cutoff(inb, 0.8, 0.9), Error);
}

TEST_CASE("constant-weight k-of-k indicator") {
  for (int k : {2, 3}) {
    GadgetBuilder B(1.0, 1.0, /*bounded=*/true);
    int v = B.add_node("v");
    for (int i = 0; i < k; ++i) B.debt(v, B.fresh_sink("v"), 1.0);
    int out = B.add_const_cutoff_k(v, k);
    B.finalize();
    CHECK(B.max_emitted_weight() <= 4.0 + 1e-12);
    FinancialSystem& sys = B.system();
    auto drive = [&](double rv) {
      sys.banks[v].external = rv * k;
      IterateOptions opts;
      opts.damping = 1.0;
      opts.pins = {{v, rv}};
      IterateResult res = iterate(sys, opts);
      REQUIRE(res.status == IterateStatus::Converged);
      REQUIRE(check_clearing(sys, res.rates).empty());
      return res.rates[out];
    };
    CAPTURE(k);
    CHECK(drive(1.0) == 1.0);
    CHECK(drive((k - 1.0) / k) == 0.0);
    CHECK(drive(0.25) == 0.0);
    CHECK(drive(0.0) == 0.0);
  }
  GadgetBuilder B;
  int v = B.add_node("v");
  B.debt(v, B.fresh_sink("v"), 1.0);
  CHECK_THROWS_AS(B.add_const_cutoff_k(v, 1), Error);
}

TEST_CASE("bounded penalties split into unit contracts") {
  GadgetBuilder B(1.0, 1.0, /*bounded=*/true);
  int in = make_input(B, "ref");
  int v = B.add_node("v", 10.0);
  int t = B.fresh_sink("v");
  size_t before = B.system().cdss.size();
  B.penalty_cds(v, t, in, 7.0);
  CHECK(B.system().cdss.size() == before + 7);
  for (size_t i = before; i < B.system().cdss.size(); ++i)
    CHECK(B.system().cdss[i].weight == 1.0);
  // Non-integral penalties cannot be split.
  CHECK_THROWS_AS(B.penalty_cds(v, t, in, 2.5), Error);

  GadgetBuilder Bu;
  int inu = make_input(Bu, "ref");
  int vu = Bu.add_node("v", 10.0);
  size_t cds_before = Bu.system().cdss.size();
  Bu.penalty_cds(vu, Bu.fresh_sink("v"), inu, 7.0);
  CHECK(Bu.system().cdss.size() == cds_before + 1);  // kept whole when unbounded
}

TEST_CASE("unhappy penalty leaves nobody better off after the default") {
  GadgetBuilder B(0.5, 0.5);
  int v0 = B.add_node("v0");
  int v0p = B.add_node("v0p");
  B.debt(v0, v0p, 1.0);
  B.debt(v0p, v0, 1.0);
  int v = B.add_node("v", 5.0);
  int t0 = B.add_unhappy_penalty(v, v0, 2.0);
  B.finalize();
  FinancialSystem& sys = B.system();
  CHECK(t0 >= 0);
  CHECK(t0 < sys.size());

  auto run = [&](double core) {
    IterateOptions opts;
    opts.damping = 0.5;
    opts.max_iterations = 20000;
    opts.eps = 1e-14;
    opts.pins = {{v0, core}, {v0p, core}};
    IterateResult res = iterate(sys, opts);
    REQUIRE(res.status == IterateStatus::Converged);
    REQUIRE(check_clearing(sys, res.rates).empty());
    return res.rates;
  };
  std::vector<double> solvent = run(1.0);
  std::vector<double> dead = run(0.0);
  CHECK(pareto_compare(sys, dead, solvent) == ParetoVerdict::StrictlyWorse);

  GadgetBuilder lossless;
  int a = lossless.add_node("a");
  int b = lossless.add_node("b");
  lossless.debt(a, b, 1.0);
  lossless.debt(b, a, 1.0);
  int w = lossless.add_node("w", 5.0);
  CHECK_THROWS_AS(lossless.add_unhappy_penalty(w, a, 2.0), Error);
}

TEST_CASE("modified branching: canonical states and mid-range trigger") {
  GadgetBuilder B;
  ModifiedBranch mb = B.add_modified_branching("g1");
  B.finalize();
  FinancialSystem& sys = B.system();
  auto run = [&](double core) {
    IterateOptions opts;
    opts.damping = 1.0;
    opts.max_iterations = 500;
    opts.pins = {{mb.core, core}, {mb.core2, core}};
    IterateResult res = iterate(sys, opts);
    REQUIRE(res.status == IterateStatus::Converged);
    REQUIRE(check_clearing(sys, res.rates).empty());
    return res.rates;
  };
  std::vector<double> active = run(0.0);
  CHECK(active[mb.x] == 1.0);
  CHECK(active[mb.y] == 0.0);
  CHECK(active[mb.trigger] == 0.0);
  std::vector<double> inactive = run(1.0);
  CHECK(inactive[mb.x] == 0.0);
  CHECK(inactive[mb.y] == 1.0);
  CHECK(inactive[mb.trigger] == 0.0);
  std::vector<double> mid = run(0.5);
  CHECK(mid[mb.trigger] == 1.0);
}

TEST_CASE("finalize funds sources to their total outgoing notionals") {
  GadgetBuilder B;
  BranchPair bp = B.add_branching("g1");
  B.finalize();
  const FinancialSystem& sys = B.system();
  double out = 0.0;
  for (const auto& c : sys.cdss)
    if (c.debtor == bp.source) out += c.weight;
  CHECK(sys.banks[bp.source].external == out);
  CHECK(out == 3.0);  // dx = 2 and dy = 1 in the lossless case
}
