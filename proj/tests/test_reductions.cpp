#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "fclear/model.hpp"
#include "fclear/objectives.hpp"
#include "fclear/oracles.hpp"
#include "fclear/reductions.hpp"
#include "fclear/solver.hpp"

using namespace fclear;
using nlohmann::json;

namespace {

// Compiled objective/decision/representative systems are feed-forward once
// the driver pins fix every cycle, so undamped sweeps settle exactly.
SolutionSet enumerate_compiled(const CompiledReduction& cr, double damping = 1.0,
                               int iters = 20000) {
  auto drivers = drivers_from_manifest(cr.system, cr.manifest);
  EnumerateOptions eo;
  eo.damping = damping;
  eo.max_iterations = iters;
  return enumerate_solutions(cr.system, drivers, eo);
}

std::set<int> decode_set(const CompiledReduction& cr, const Solution& s) {
  std::set<int> out;
  const auto& act = cr.manifest.at("decode").at("activity");
  for (size_t z = 0; z < act.size(); ++z) {
    int idx = cr.system.index_of(act[z].get<std::string>());
    REQUIRE(idx >= 0);
    if (s.rates[idx] >= 0.5) out.insert(static_cast<int>(z));
  }
  return out;
}

uint32_t set_mask(const std::set<int>& s) {
  uint32_t m = 0;
  for (int z : s) m |= (1u << z);
  return m;
}

std::vector<int> block_indices(const FinancialSystem& sys, const json& ids) {
  std::vector<int> out;
  for (const auto& id : ids) {
    int idx = sys.index_of(id.get<std::string>());
    REQUIRE(idx >= 0);
    out.push_back(idx);
  }
  return out;
}

// Flattens blocks.replicas ([[id,..] per vertex]) into per-vertex index lists.
std::vector<std::vector<int>> replica_groups(const FinancialSystem& sys, const json& groups) {
  std::vector<std::vector<int>> out;
  for (const auto& grp : groups) out.push_back(block_indices(sys, grp));
  return out;
}

int count_defaults(const FinancialSystem& sys, const std::vector<double>& rates,
                   const std::vector<int>& banks) {
  Evaluation ev = evaluate_state(sys, rates);
  int n = 0;
  for (int b : banks)
    if (ev.liability[b] > 1e-12 && rates[b] < 1.0 - 1e-9) ++n;
  return n;
}

double block_unpaid(const FinancialSystem& sys, const std::vector<double>& rates,
                    const std::vector<int>& banks) {
  Evaluation ev = evaluate_state(sys, rates);
  double u = 0.0;
  for (int b : banks) u += (1.0 - rates[b]) * ev.liability[b];
  return u;
}

double block_liability(const FinancialSystem& sys, const std::vector<double>& rates,
                       const std::vector<int>& banks) {
  Evaluation ev = evaluate_state(sys, rates);
  double l = 0.0;
  for (int b : banks) l += ev.liability[b];
  return l;
}

int designated_index(const CompiledReduction& cr, const char* key) {
  int idx = cr.system.index_of(cr.manifest.at("designated").at(key).get<std::string>());
  REQUIRE(idx >= 0);
  return idx;
}

bool is_maximal_independent(const Graph& g, uint32_t mask) {
  return is_independent(g, mask) && is_dominating(g, mask);
}

}  // namespace

TEST_CASE("MaxEquity compilation finds the independence number") {
  Graph p3 = make_p3();
  CompiledReduction cr = compile_objective(p3, ObjectiveKind::MaxEquity);
  CHECK(cr.manifest.at("type") == "objective");
  CHECK(cr.manifest.at("objective") == "MaxEquity");
  CHECK(cr.manifest.at("decode").at("activity").size() == 3);
  cr.system.check_sane_references();

  SolutionSet ss = enumerate_compiled(cr);
  CHECK(ss.solutions.size() == 8);  // every branch combination clears
  CHECK(ss.diverged.empty());

  Designation des;
  des.v = designated_index(cr, "v");
  double best = -1.0;
  std::set<int> arg;
  for (const auto& s : ss.solutions) {
    double v = evaluate_objective(cr.system, s.rates, ObjectiveKind::MaxEquity, des);
    if (v > best) {
      best = v;
      arg = decode_set(cr, s);
    }
  }
  CHECK(best == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(arg == std::set<int>{0, 2});

  // On the triangle the independence number drops to 1.
  CompiledReduction crk = compile_objective(make_k3(), ObjectiveKind::MaxEquity);
  SolutionSet ssk = enumerate_compiled(crk);
  Designation desk;
  desk.v = designated_index(crk, "v");
  double bestk = -1.0;
  for (const auto& s : ssk.solutions)
    bestk = std::max(bestk, evaluate_objective(crk.system, s.rates, ObjectiveKind::MaxEquity, desk));
  CHECK(bestk == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("MinEquity compilation finds the minimum maximal independent set") {
  Graph p3 = make_p3();
  CompiledReduction cr = compile_objective(p3, ObjectiveKind::MinEquity);
  SolutionSet ss = enumerate_compiled(cr);
  CHECK(ss.solutions.size() == 8);

  Designation des;
  des.v = designated_index(cr, "v");
  double best = 1e18;
  std::set<int> arg;
  for (const auto& s : ss.solutions) {
    double v = evaluate_objective(cr.system, s.rates, ObjectiveKind::MinEquity, des);
    if (v < best) {
      best = v;
      arg = decode_set(cr, s);
    }
  }
  CHECK(best == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(arg == std::set<int>{1});  // the centre dominates P3 alone
}

TEST_CASE("counting objectives tally their replica blocks exactly") {
  Graph p3 = make_p3();
  const int m = 4, N = 3;
  CompileOptions opt;
  opt.m = m;

  SUBCASE("MinDefault: m defaults per chosen vertex, m*N on violations") {
    CompiledReduction cr = compile_objective(p3, ObjectiveKind::MinDefault, opt);
    auto groups = replica_groups(cr.system, cr.manifest.at("blocks").at("replicas"));
    REQUIRE(groups.size() == 3);
    for (const auto& g : groups) REQUIRE(g.size() == 4);
    std::vector<int> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());

    SolutionSet ss = enumerate_compiled(cr);
    CHECK(ss.solutions.size() == 8);
    int satisfying = 0;
    for (const auto& s : ss.solutions) {
      std::set<int> D = decode_set(cr, s);
      int defaults = count_defaults(cr.system, s.rates, all);
      if (is_maximal_independent(p3, set_mask(D))) {
        ++satisfying;
        CHECK(defaults == m * static_cast<int>(D.size()));
      } else {
        CHECK(defaults == m * N);
      }
    }
    CHECK(satisfying == 2);  // {b} and {a,c}
  }

  SUBCASE("MaxSurviving: m survivors per chosen vertex") {
    CompiledReduction cr = compile_objective(p3, ObjectiveKind::MaxSurviving, opt);
    auto groups = replica_groups(cr.system, cr.manifest.at("blocks").at("replicas"));
    std::vector<int> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());

    SolutionSet ss = enumerate_compiled(cr);
    for (const auto& s : ss.solutions) {
      std::set<int> D = decode_set(cr, s);
      int survivors = static_cast<int>(all.size()) - count_defaults(cr.system, s.rates, all);
      if (is_independent(p3, set_mask(D)))
        CHECK(survivors == m * static_cast<int>(D.size()));
      else
        CHECK(survivors == 0);
    }
  }

  SUBCASE("MinUnpaid: one unit unpaid per defaulted replica") {
    CompiledReduction cr = compile_objective(p3, ObjectiveKind::MinUnpaid, opt);
    auto groups = replica_groups(cr.system, cr.manifest.at("blocks").at("replicas"));
    std::vector<int> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());

    SolutionSet ss = enumerate_compiled(cr);
    for (const auto& s : ss.solutions) {
      std::set<int> D = decode_set(cr, s);
      double unpaid = block_unpaid(cr.system, s.rates, all);
      if (is_maximal_independent(p3, set_mask(D)))
        CHECK(unpaid == doctest::Approx(m * static_cast<double>(D.size())).epsilon(1e-12));
      else
        CHECK(unpaid == doctest::Approx(static_cast<double>(m * N)).epsilon(1e-12));
    }
  }

  SUBCASE("MaxPrefer: solvent replicas keep unit equity") {
    CompiledReduction cr = compile_objective(p3, ObjectiveKind::MaxPrefer, opt);
    auto groups = replica_groups(cr.system, cr.manifest.at("blocks").at("replicas"));
    std::vector<int> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());

    SolutionSet ss = enumerate_compiled(cr);
    for (const auto& s : ss.solutions) {
      std::set<int> D = decode_set(cr, s);
      std::vector<double> q = equities(cr.system, s.rates);
      int happy = 0;
      for (int b : all)
        if (std::abs(q[b] - 1.0) < 1e-9) ++happy;
      if (is_independent(p3, set_mask(D)))
        CHECK(happy == m * static_cast<int>(D.size()));
      else
        CHECK(happy == 0);
    }
  }
}

TEST_CASE("proportionality blocks pin the unpaid fraction") {
  Graph p3 = make_p3();
  const int m = 4, N = 3;
  CompileOptions opt;
  opt.m = m;
  CompiledReduction cr = compile_objective(p3, ObjectiveKind::MinPropUnpaid, opt);

  std::vector<int> block;
  for (const char* key : {"u", "uprime"})
    for (const auto& grp : cr.manifest.at("blocks").at(key))
      for (int b : block_indices(cr.system, grp)) block.push_back(b);
  auto pen = block_indices(cr.system, cr.manifest.at("blocks").at("penalty"));
  REQUIRE(pen.size() == static_cast<size_t>(m * N));
  block.insert(block.end(), pen.begin(), pen.end());

  SolutionSet ss = enumerate_compiled(cr);
  CHECK(ss.solutions.size() == 8);
  for (const auto& s : ss.solutions) {
    std::set<int> D = decode_set(cr, s);
    double l = block_liability(cr.system, s.rates, block);
    double u = block_unpaid(cr.system, s.rates, block);
    if (is_maximal_independent(p3, set_mask(D))) {
      CHECK(l == doctest::Approx(2.0 * m * N).epsilon(1e-12));
      CHECK(u / l == doctest::Approx(D.size() / (2.0 * N)).epsilon(1e-12));
    } else {
      CHECK(l == doctest::Approx(static_cast<double>(m * N)).epsilon(1e-12));
      CHECK(u / l == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("equity-difference objectives compile and minimize on maximal sets") {
  Graph p3 = make_p3();

  SUBCASE("MinDiffEq: |q_v1 - q_v2| = 2 * |D| on satisfying solutions") {
    CompiledReduction cr = compile_objective(p3, ObjectiveKind::MinDiffEq);
    Designation des;
    des.v1 = designated_index(cr, "v1");
    des.v2 = designated_index(cr, "v2");
    SolutionSet ss = enumerate_compiled(cr);
    CHECK(ss.solutions.size() == 8);
    double best = 1e18;
    for (const auto& s : ss.solutions) {
      double v = evaluate_objective(cr.system, s.rates, ObjectiveKind::MinDiffEq, des);
      std::set<int> D = decode_set(cr, s);
      if (is_maximal_independent(p3, set_mask(D)))
        CHECK(v == doctest::Approx(2.0 * D.size()).epsilon(1e-12));
      best = std::min(best, v);
    }
    CHECK(best == doctest::Approx(2.0).epsilon(1e-12));  // 2 * min ids size
  }

  SUBCASE("AllianceBalance evaluates with the manifest partition") {
    CompiledReduction cr = compile_objective(p3, ObjectiveKind::AllianceBalance);
    Designation des;
    const auto& g2 = cr.manifest.at("designated").at("group2");
    REQUIRE(g2.size() == 2);
    for (const auto& id : g2) {
      int idx = cr.system.index_of(id.get<std::string>());
      REQUIRE(idx >= 0);
      des.group2.push_back(idx);
    }
    SolutionSet ss = enumerate_compiled(cr);
    CHECK(!ss.solutions.empty());
    for (const auto& s : ss.solutions) {
      double v = evaluate_objective(cr.system, s.rates, ObjectiveKind::AllianceBalance, des);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("decision compilation raises the flag exactly at threshold") {
  Graph p3 = make_p3();
  CompiledReduction cr = compile_decision(p3, 2);
  CHECK(cr.manifest.at("type") == "decision");
  CHECK(cr.manifest.at("k") == 2);
  int vD = designated_index(cr, "vD");

  SolutionSet ss = enumerate_compiled(cr);
  CHECK(ss.solutions.size() == 8);
  int raised = 0;
  for (const auto& s : ss.solutions) {
    CHECK((s.rates[vD] == 0.0 || s.rates[vD] == 1.0));
    std::set<int> D = decode_set(cr, s);
    bool expect = is_independent(p3, set_mask(D)) && static_cast<int>(D.size()) >= 2;
    CHECK(s.rates[vD] == (expect ? 1.0 : 0.0));
    if (s.rates[vD] == 1.0) ++raised;
  }
  CHECK(raised == 1);  // only {a, c}

  // K3 has no independent pair: the flag never rises.
  CompiledReduction crk = compile_decision(make_k3(), 2);
  int vDk = designated_index(crk, "vD");
  for (const auto& s : enumerate_compiled(crk).solutions) CHECK(s.rates[vDk] == 0.0);

  // Single vertex, k = 1: the active branch raises the flag.
  Graph k1;
  k1.n = 1;
  CompiledReduction cr1 = compile_decision(k1, 1);
  int vD1 = designated_index(cr1, "vD");
  SolutionSet ss1 = enumerate_compiled(cr1);
  CHECK(ss1.solutions.size() == 2);
  int raised1 = 0;
  for (const auto& s : ss1.solutions)
    if (s.rates[vD1] == 1.0) ++raised1;
  CHECK(raised1 == 1);

  CHECK_THROWS_AS(compile_decision(p3, 0), Error);
  CHECK_THROWS_AS(compile_decision(p3, 4), Error);
  try {
    compile_decision(p3, 0);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::BadK);
  }
}

TEST_CASE("representative compilation separates the empty-set solution") {
  Graph p3 = make_p3();
  CHECK_THROWS_AS(compile_representative(p3, 1, 2, 8), Error);
  CHECK_THROWS_AS(compile_representative(p3, 2, 0, 8), Error);
  CHECK_THROWS_AS(compile_representative(p3, 2, 2, 0), Error);
  try {
    compile_representative(p3, 1, 2, 8);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::BadK);
  }

  RepresentativeResult rr = compile_representative(p3, 2, 2, 8);
  const FinancialSystem& sys = rr.compiled.system;
  CHECK(check_clearing(sys, rr.r).empty());
  CHECK(check_clearing(sys, rr.rprime).empty());

  auto controls = block_indices(sys, rr.compiled.manifest.at("blocks").at("controls"));
  REQUIRE(controls.size() == 8);
  for (int c : controls) {
    CHECK(rr.r[c] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rr.rprime[c] == doctest::Approx(0.0).epsilon(1e-10));
  }

  // The manifest snapshots both solutions bank by bank.
  const json& rj = rr.compiled.manifest.at("solutions").at("r");
  const json& rpj = rr.compiled.manifest.at("solutions").at("rprime");
  for (int b = 0; b < sys.size(); ++b) {
    CHECK(rj.at(sys.banks[b].id).get<double>() == doctest::Approx(rr.r[b]).epsilon(1e-12));
    CHECK(rpj.at(sys.banks[b].id).get<double>() == doctest::Approx(rr.rprime[b]).epsilon(1e-12));
  }

  SolutionSet ss = enumerate_compiled(rr.compiled);
  // Only independent vertex sets survive the veto: success (4 generator
  // patterns), the empty set, and the three singleton failures.
  CHECK(ss.solutions.size() == 8);
  int vD = designated_index(rr.compiled, "vD");
  int succeeded = 0, alive = 0;
  for (const auto& s : ss.solutions) {
    bool ctrl_up = true;
    for (int c : controls) ctrl_up = ctrl_up && s.rates[c] > 0.5;
    if (s.rates[vD] > 0.5) {
      ++succeeded;
      CHECK(ctrl_up);
      CHECK(decode_set(rr.compiled, s) == std::set<int>{0, 2});
    }
    if (ctrl_up) ++alive;
  }
  CHECK(succeeded == 4);
  CHECK(alive == 5);  // four successes plus the all-empty solution
}

TEST_CASE("pareto compilation: dominating solution exists iff the set exists") {
  Graph p3 = make_p3();
  CHECK_THROWS_AS(compile_pareto_suboptimal(p3, 2, 1.0, 0.5), Error);
  CHECK_THROWS_AS(compile_pareto_suboptimal(p3, 2, 0.5, 1.0), Error);
  CHECK_THROWS_AS(compile_pareto_suboptimal(p3, 0, 0.5, 0.5), Error);
  CHECK_THROWS_AS(compile_pareto_suboptimal(p3, 4, 0.5, 0.5), Error);

  ParetoResult pr = compile_pareto_suboptimal(p3, 2, 0.5, 0.5);
  const FinancialSystem& sys = pr.compiled.system;
  CHECK(pr.compiled.manifest.at("type") == "pareto");
  for (const char* key : {"v0", "v", "vD", "vDbar", "s0", "w"})
    CHECK(pr.compiled.manifest.at("designated").contains(key));
  CHECK(check_clearing(sys, pr.r).empty());

  std::vector<double> q = equities(sys, pr.r);
  int w = designated_index(pr.compiled, "w");
  int s0 = designated_index(pr.compiled, "s0");
  CHECK(q[w] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(q[s0] == doctest::Approx(1.0).epsilon(1e-9));

  SolutionSet ss = enumerate_compiled(pr.compiled, 0.5, 40000);
  bool better = false;
  for (const auto& s : ss.solutions)
    better = better || pareto_compare(sys, s.rates, pr.r) == ParetoVerdict::StrictlyBetter;
  CHECK(better);

  ParetoResult prk = compile_pareto_suboptimal(make_k3(), 2, 0.5, 0.5);
  CHECK(check_clearing(prk.compiled.system, prk.r).empty());
  SolutionSet ssk = enumerate_compiled(prk.compiled, 0.5, 40000);
  for (const auto& s : ssk.solutions)
    CHECK(pareto_compare(prk.compiled.system, s.rates, prk.r) != ParetoVerdict::StrictlyBetter);
}

TEST_CASE("showcase systems") {
  SUBCASE("infinite solutions: a verified continuum") {
    CompiledReduction cr = build_showcase(ShowcaseKind::InfiniteSolutions);
    CHECK(cr.manifest.at("kind") == "infinite-solutions");
    SolutionSet ss = enumerate_compiled(cr, 0.5, 4000);
    CHECK(ss.solutions.size() == 5);  // the five sampled mixture states
    CHECK(ss.diverged.empty());
    CHECK(enumerate_default_sets(cr.system).continuum_suspected);
  }

  SUBCASE("exponential solutions: 2^g essentially different outcomes") {
    CompiledReduction cr = build_showcase(ShowcaseKind::ExponentialSolutions, 5);
    SolutionSet ss = enumerate_compiled(cr);
    CHECK(ss.solutions.size() == 32);
    CHECK(ss.diverged.empty());
    SpaceSummary sum = solution_space_summary(cr.system, ss.solutions);
    CHECK(sum.essential_classes == 32);
  }

  SUBCASE("four optima: four verified solutions in four classes") {
    CompiledReduction cr = build_showcase(ShowcaseKind::FourOptima);
    CHECK(cr.manifest.at("kind") == "four-optima");
    CHECK(cr.manifest.at("h").get<double>() ==
          doctest::Approx(10.0 * cr.system.size()).epsilon(1e-12));
    SolutionSet ss = enumerate_compiled(cr);
    CHECK(ss.solutions.size() == 4);
    SpaceSummary sum = solution_space_summary(cr.system, ss.solutions);
    CHECK(sum.essential_classes == 4);
  }
}

TEST_CASE("bounded weight transform replays compilations with weights in [1, 4]") {
  CompiledReduction base = compile_objective(make_k3(), ObjectiveKind::MaxEquity);
  CompiledReduction bt = bounded_weight_transform(base);
  CHECK(bt.manifest.at("bounded").at("enabled") == true);
  double maxw = bt.manifest.at("bounded").at("maxWeight").get<double>();
  CHECK(maxw <= 4.0 + 1e-12);
  for (const auto& d : bt.system.debts) {
    CHECK(d.weight >= 1.0 - 1e-12);
    CHECK(d.weight <= 4.0 + 1e-12);
  }
  for (const auto& c : bt.system.cdss) {
    CHECK(c.weight >= 1.0 - 1e-12);
    CHECK(c.weight <= 4.0 + 1e-12);
  }

  SolutionSet ss = enumerate_compiled(bt);
  CHECK(ss.solutions.size() == 8);
  Designation des;
  des.v = designated_index(bt, "v");
  double best = -1.0;
  for (const auto& s : ss.solutions)
    best = std::max(best, evaluate_objective(bt.system, s.rates, ObjectiveKind::MaxEquity, des));
  CHECK(best == doctest::Approx(1.0).epsilon(1e-12));

  // Decision threshold under bounded weights (exercises the k-ary cutoff).
  CompiledReduction bd = bounded_weight_transform(compile_decision(make_p3(), 2));
  for (const auto& d : bd.system.debts) CHECK(d.weight <= 4.0 + 1e-12);
  for (const auto& c : bd.system.cdss) CHECK(c.weight <= 4.0 + 1e-12);
  int vD = designated_index(bd, "vD");
  int raised = 0;
  for (const auto& s : enumerate_compiled(bd).solutions)
    if (s.rates[vD] == 1.0) ++raised;
  CHECK(raised == 1);

  SUBCASE("unreplayable manifests are rejected") {
    CompiledReduction empty{FinancialSystem{}, json::object()};
    CHECK_THROWS_AS(bounded_weight_transform(empty), Error);
    try {
      bounded_weight_transform(empty);
    } catch (const Error& e) {
      CHECK(e.code == ErrorCode::UnsplittableContract);
    }
    ParetoResult pr = compile_pareto_suboptimal(make_p3(), 2, 0.5, 0.5);
    CHECK_THROWS_AS(bounded_weight_transform(pr.compiled), Error);
  }
}

TEST_CASE("modified gadgets keep the objective optimum") {
  CompileOptions opt;
  opt.modified_gadgets = true;
  CompiledReduction cr = compile_objective(make_p3(), ObjectiveKind::MaxEquity, opt);
  CHECK(cr.manifest.at("modifiedGadgets") == true);
  SolutionSet ss = enumerate_compiled(cr);
  CHECK(ss.solutions.size() == 8);
  CHECK(ss.diverged.empty());
  Designation des;
  des.v = designated_index(cr, "v");
  double best = -1.0;
  for (const auto& s : ss.solutions)
    best = std::max(best, evaluate_objective(cr.system, s.rates, ObjectiveKind::MaxEquity, des));
  CHECK(best == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("compile guards") {
  Graph empty;
  CHECK_THROWS_AS(compile_objective(empty, ObjectiveKind::MaxEquity), Error);
  CompileOptions bad;
  bad.m = 0;
  CHECK_THROWS_AS(compile_objective(make_p3(), ObjectiveKind::MinDefault, bad), Error);

  // Driver reconstruction rejects pins that name unknown banks.
  CompiledReduction cr = compile_decision(make_p3(), 2);
  json mf = json{{"drivers",
                  json::array({json{{"name", "d"},
                                    {"states", json::array({json{{"label", "s"},
                                                                 {"pins", json::array({json::array(
                                                                              {"ghost", 1.0})})}}})}}})}};
  CHECK_THROWS_AS(drivers_from_manifest(cr.system, mf), Error);
}
