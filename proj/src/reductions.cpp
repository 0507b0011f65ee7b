#include "fclear/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace fclear {
namespace {

using json = nlohmann::json;

json graph_json(const Graph& g) {
  json edges = json::array();
  for (auto [a, b] : g.edges) edges.push_back(json::array({a + 1, b + 1}));
  return json{{"n", g.n}, {"edges", edges}};
}

Graph graph_from_json(const json& j) {
  Graph g;
  g.n = j.at("n").get<int>();
  for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
  return g;
}

json pins_json(const FinancialSystem& sys, const std::vector<std::pair<int, double>>& pins) {
  json out = json::array();
  for (const auto& [bank, rate] : pins) out.push_back(json::array({sys.banks[bank].id, rate}));
  return out;
}

json driver_json(const FinancialSystem& sys, const std::string& name,
                 const std::vector<std::pair<std::string, std::vector<std::pair<int, double>>>>& states) {
  json st = json::array();
  for (const auto& [label, pins] : states)
    st.push_back(json{{"label", label}, {"pins", pins_json(sys, pins)}});
  return json{{"name", name}, {"states", st}};
}

// Gate firing iff at least one input is in complete default: the natural
// primitive behind NAND (inputs x_a, x_b) and, fed with negations, OR.
int nand_gate(GadgetBuilder& B, const std::vector<int>& ins) {
  auto& sys = B.system();
  int s = B.fresh_source("nand");
  int t = B.fresh_sink("nand");
  int w = B.add_node("nand" + std::to_string(sys.size()) + ".w");
  for (int in : ins) B.cds(s, w, in, 1.0);
  B.debt(w, t, 1.0);
  return w;
}

// Shared reduction skeleton: one branching gadget per vertex, a NAND gate
// per edge (independence), and optionally a closed-neighborhood OR per vertex
// (domination, turning "independent" into "maximal independent"). v_C is the
// conjunction of all constraints.
struct Base {
  std::vector<int> xs, ys;
  std::vector<int> sources;  // per-gadget source; -1 for modified gadgets
  std::vector<int> constraints;
  int vC = -1;
  json drivers = json::array();
};

Base build_base(GadgetBuilder& B, const Graph& g, const CompileOptions& opt, bool min_star) {
  Base base;
  auto& sys = B.system();
  for (int z = 0; z < g.n; ++z) {
    const std::string name = "g" + std::to_string(z + 1);
    if (opt.modified_gadgets) {
      ModifiedBranch mb = B.add_modified_branching(name);
      base.xs.push_back(mb.x);
      base.ys.push_back(mb.y);
      base.sources.push_back(-1);
      base.constraints.push_back(B.add_not(mb.trigger));
      base.drivers.push_back(driver_json(sys, name,
                                         {{"active", {{mb.core, 0.0}, {mb.core2, 0.0}}},
                                          {"inactive", {{mb.core, 1.0}, {mb.core2, 1.0}}}}));
    } else {
      BranchPair bp = B.add_branching(name);
      base.xs.push_back(bp.x);
      base.ys.push_back(bp.y);
      base.sources.push_back(bp.source);
      base.drivers.push_back(driver_json(sys, name,
                                         {{"active", {{bp.x, 1.0}, {bp.y, 0.0}}},
                                          {"inactive", {{bp.x, 0.0}, {bp.y, 1.0}}}}));
    }
  }
  for (auto [a, b] : g.edges) base.constraints.push_back(nand_gate(B, {base.xs[a], base.xs[b]}));
  if (min_star) {
    for (int z = 0; z < g.n; ++z) {
      std::vector<int> nb{base.xs[z]};
      for (auto [a, b] : g.edges) {
        if (a == z) nb.push_back(base.xs[b]);
        if (b == z) nb.push_back(base.xs[a]);
      }
      base.constraints.push_back(B.add_or(nb));
    }
  }
  if (base.constraints.empty()) {
    // Constantly satisfied: a debt-fed pass-through that is solvent in every
    // solution, so downstream penalties never fire and references stay sane.
    int s = B.fresh_source("vc");
    int t = B.fresh_sink("vc");
    int vc = B.add_node("vC");
    B.debt(s, vc, 1.0);
    B.debt(vc, t, 1.0);
    base.vC = vc;
  } else if (base.constraints.size() == 1) {
    base.vC = base.constraints[0];
  } else {
    base.vC = B.add_and(base.constraints);
  }
  return base;
}

json base_manifest(const GadgetBuilder& B, const Graph& g, const Base& base,
                   const CompileOptions& opt) {
  const auto& sys = B.system();
  json activity = json::array();
  for (int x : base.xs) activity.push_back(sys.banks[x].id);
  return json{
      {"graph", graph_json(g)},
      {"alpha", opt.alpha},
      {"beta", opt.beta},
      {"bounded", json{{"enabled", opt.bounded}, {"maxWeight", B.max_emitted_weight()}}},
      {"modifiedGadgets", opt.modified_gadgets},
      {"drivers", base.drivers},
      {"decode", json{{"activity", activity}}},
      {"designated", json::object()},
      {"blocks", json::object()},
  };
}

// Per-vertex replica block: m copies of a node with `external` assets and an
// outgoing CDS of `weight` referencing refs[z]. Returns the id lists.
json add_replicas(GadgetBuilder& B, int m, double external, double weight,
                  const std::vector<int>& refs, const std::string& prefix) {
  json blocks = json::array();
  for (size_t z = 0; z < refs.size(); ++z) {
    json ids = json::array();
    for (int i = 0; i < m; ++i) {
      int u = B.add_node(prefix + std::to_string(z + 1) + "_" + std::to_string(i + 1), external,
                         "replica");
      B.cds(u, B.fresh_sink(prefix), refs[z], weight);
      ids.push_back(B.system().banks[u].id);
    }
    blocks.push_back(ids);
  }
  return blocks;
}

struct DecisionParts {
  Base base;
  int v = -1;
  int vD = -1;
  double M = 0.0;
};

// MaxEquity-style core plus a size-k threshold: v collects one unit of income
// per active gadget, owes k to a sink, and vD binarizes "v pays in full".
// The constraint penalty is 3N so that even N units of income leave r_v
// below every threshold in violating assignments.
DecisionParts decision_core(GadgetBuilder& B, const Graph& g, int k, const CompileOptions& opt) {
  if (k < 1 || k > g.n)
    throw Error(ErrorCode::BadK, "decision threshold k must lie in [1, n]");
  DecisionParts parts;
  parts.base = build_base(B, g, opt, /*min_star=*/false);
  parts.M = 3.0 * g.n;
  parts.v = B.add_node("v");
  for (int z = 0; z < g.n; ++z)
    B.cds(B.fresh_source("vin"), parts.v, parts.base.ys[z], 1.0);
  B.penalty_cds(parts.v, B.fresh_sink("vpen"), parts.base.vC, parts.M);
  if (opt.bounded) {
    for (int i = 0; i < k; ++i) B.debt(parts.v, B.fresh_sink("vd"), 1.0);
    parts.vD = k >= 2 ? B.add_const_cutoff_k(parts.v, k)
                      : B.add_cutoff(parts.v, 1.0 / 3.0, 2.0 / 3.0);
  } else {
    B.debt(parts.v, B.fresh_sink("vd"), static_cast<double>(k));
    parts.vD = B.add_cutoff(parts.v, (3.0 * k - 2.0) / (3.0 * k), (3.0 * k - 1.0) / (3.0 * k));
  }
  return parts;
}

}  // namespace

CompiledReduction compile_objective(const Graph& g, ObjectiveKind kind,
                                    const CompileOptions& opt) {
  if (g.n <= 0) throw Error(ErrorCode::BadArgument, "graph must have at least one vertex");
  if (opt.m < 1) throw Error(ErrorCode::BadArgument, "replica multiplicity must be positive");
  if (kind == ObjectiveKind::MaxPrefer || kind == ObjectiveKind::MinLeastPrefer ||
      kind == ObjectiveKind::MaxSurviving || kind == ObjectiveKind::MinDefault ||
      kind == ObjectiveKind::MinUnpaid || kind == ObjectiveKind::MaxPaid ||
      kind == ObjectiveKind::MinPropUnpaid || kind == ObjectiveKind::MaxPropPaid ||
      kind == ObjectiveKind::MaxEquity || kind == ObjectiveKind::MinEquity ||
      kind == ObjectiveKind::MinDiffEq || kind == ObjectiveKind::AllianceBalance) {
    // all kinds supported; listed to keep the switch below total
  }
  GadgetBuilder B(opt.alpha, opt.beta, opt.bounded);
  auto& sys = B.system();
  const int N = g.n;
  const int m = opt.m;
  // Min* objectives reduce from MinIDS: add domination constraints so valid
  // assignments are exactly the maximal independent sets.
  const bool min_star = !objective_is_max(kind);
  Base base = build_base(B, g, opt, min_star);
  json designated = json::object();
  json blocks = json::object();
  double M = N + 1.0;

  switch (kind) {
    case ObjectiveKind::MaxEquity: {
      int v = B.add_node("v");
      for (int z = 0; z < N; ++z) B.cds(B.fresh_source("vin"), v, base.ys[z], 1.0);
      B.penalty_cds(v, B.fresh_sink("vpen"), base.vC, M);
      designated["v"] = sys.banks[v].id;
      break;
    }
    case ObjectiveKind::MinEquity: {
      int v = B.add_node("v");
      for (int z = 0; z < N; ++z) B.cds(B.fresh_source("vin"), v, base.ys[z], 1.0);
      B.penalty_cds(B.fresh_source("vpen"), v, base.vC, M, /*incoming=*/true);
      designated["v"] = sys.banks[v].id;
      break;
    }
    case ObjectiveKind::MinDefault:
    case ObjectiveKind::MinLeastPrefer:
    case ObjectiveKind::MinUnpaid:
    case ObjectiveKind::MaxSurviving:
    case ObjectiveKind::MaxPrefer: {
      const bool on_active =
          (kind == ObjectiveKind::MaxSurviving || kind == ObjectiveKind::MaxPrefer);
      std::vector<int> vz;
      vz.reserve(N);
      for (int z = 0; z < N; ++z)
        vz.push_back(B.add_and({base.vC, on_active ? base.xs[z] : base.ys[z]}));
      blocks["replicas"] = add_replicas(B, m, 1.0, 2.0, vz, "rep");
      break;
    }
    case ObjectiveKind::MaxPaid: {
      int notC = B.add_not(base.vC);
      std::vector<int> vz;
      vz.reserve(N);
      for (int z = 0; z < N; ++z) vz.push_back(B.add_or({base.ys[z], notC}));
      blocks["replicas"] = add_replicas(B, m, 1.0, 1.0, vz, "rep");
      break;
    }
    case ObjectiveKind::MinPropUnpaid:
    case ObjectiveKind::MaxPropPaid: {
      // Dual replica groups keep the block's total liabilities constant at
      // 2m per vertex on satisfying solutions: exactly one of u (fully
      // funded for MinProp, empty for MaxProp) and u' (half funded) carries
      // the liability, depending on the vertex's activity. Violations kill
      // both groups' liabilities, so a third block of never-funded penalty
      // nodes dominates the fraction.
      const bool minprop = kind == ObjectiveKind::MinPropUnpaid;
      int notC = B.add_not(base.vC);
      std::vector<int> live_inactive, live_active;
      for (int z = 0; z < N; ++z) {
        live_inactive.push_back(B.add_or({notC, base.xs[z]}));
        live_active.push_back(B.add_or({notC, base.ys[z]}));
      }
      blocks["u"] = add_replicas(B, m, minprop ? 2.0 : 0.0, 2.0, live_inactive, "pu");
      blocks["uprime"] = add_replicas(B, m, 1.0, 2.0, live_active, "pv");
      json pen = json::array();
      for (int i = 0; i < m * N; ++i) {
        int p = B.add_node("pp" + std::to_string(i + 1), 0.0, "replica");
        B.cds(p, B.fresh_sink("pp"), base.vC, 1.0);
        pen.push_back(sys.banks[p].id);
      }
      blocks["penalty"] = pen;
      break;
    }
    case ObjectiveKind::MinDiffEq:
    case ObjectiveKind::AllianceBalance: {
      int v1 = B.add_node("v1", 2.0 * N);
      int v2 = B.add_node("v2", 2.0 * N);
      for (int z = 0; z < N; ++z) B.cds(v1, v2, base.ys[z], 1.0);
      if (opt.bounded) {
        // Split the constraint penalty so each leg still moves one endpoint:
        // v1 pays unit CDSs out, v2 receives unit CDSs in.
        B.penalty_cds(v1, B.fresh_sink("dpen"), base.vC, N);
        B.penalty_cds(B.fresh_source("dpen"), v2, base.vC, N, /*incoming=*/true);
      } else {
        B.cds(v1, v2, base.vC, static_cast<double>(N));
      }
      designated["v1"] = sys.banks[v1].id;
      designated["v2"] = sys.banks[v2].id;
      if (kind == ObjectiveKind::AllianceBalance) {
        int s = B.add_node("s", static_cast<double>(N));
        B.finalize();  // fix source externals before balancing t
        double rest = 0.0;
        for (int b = 0; b < sys.size(); ++b)
          if (b != v1 && b != v2 && b != s) rest += sys.banks[b].external;
        int t = B.add_node("t", N + rest);
        designated["group2"] = json::array({sys.banks[v2].id, sys.banks[t].id});
      }
      break;
    }
  }

  B.finalize();
  sys.check_sane_references();
  json manifest = base_manifest(B, g, base, opt);
  manifest["type"] = "objective";
  manifest["objective"] = objective_name(kind);
  manifest["m"] = m;
  manifest["M"] = M;
  manifest["designated"] = designated;
  manifest["blocks"] = blocks;
  return CompiledReduction{sys, manifest};
}

CompiledReduction compile_decision(const Graph& g, int k, const CompileOptions& opt) {
  if (g.n <= 0) throw Error(ErrorCode::BadArgument, "graph must have at least one vertex");
  GadgetBuilder B(opt.alpha, opt.beta, opt.bounded);
  auto& sys = B.system();
  DecisionParts parts = decision_core(B, g, k, opt);
  B.finalize();
  sys.check_sane_references();
  json manifest = base_manifest(B, g, parts.base, opt);
  manifest["type"] = "decision";
  manifest["k"] = k;
  manifest["M"] = parts.M;
  manifest["designated"] =
      json{{"v", sys.banks[parts.v].id}, {"vD", sys.banks[parts.vD].id}};
  return CompiledReduction{sys, manifest};
}

RepresentativeResult compile_representative(const Graph& g, int k, int m_g, int m_c,
                                            const CompileOptions& opt) {
  if (k < 2) throw Error(ErrorCode::BadK, "representative construction needs k >= 2");
  if (m_g < 1 || m_c < 1)
    throw Error(ErrorCode::BadArgument, "representative sizes must be positive");
  GadgetBuilder B(opt.alpha, opt.beta, opt.bounded);
  auto& sys = B.system();
  DecisionParts core = decision_core(B, g, k, opt);
  int vDbar = B.add_not(core.vD);
  int vAny = B.add_or(core.base.xs);  // fires iff the chosen set is nonempty

  // Veto: an active vertex owes 3 extra when the independence constraints
  // fail, which no gadget income can cover, so non-independent assignments
  // leave the pinned vertex bank unclearable and the branch is discarded.
  // Only independent sets survive as solutions, which shapes the solution
  // cloud the centrality comparison runs over.
  for (int x : core.base.xs) B.cds(x, B.fresh_sink("veto"), core.base.vC, 3.0);

  // Generating gadgets: alive (and binary, 2^{m_g} states) exactly when the
  // decision succeeded, in complete default otherwise.
  int sg = B.add_node("sg");
  const double dx = opt.beta < 1.0 ? 1.0 / opt.beta : 2.0;
  json drivers = core.base.drivers;
  std::vector<std::pair<int, int>> gens;
  for (int i = 0; i < m_g; ++i) {
    const std::string name = "gen" + std::to_string(i + 1);
    int gx = B.add_node(name + ".x");
    int gy = B.add_node(name + ".y");
    int gt = B.fresh_sink(name);
    B.cds(sg, gx, gy, dx);
    B.cds(sg, gy, gx, 1.0);
    B.debt(gx, gt, 1.0);
    B.debt(gy, gt, 1.0);
    gens.emplace_back(gx, gy);
    drivers.push_back(driver_json(sys, name,
                                  {{"active", {{gx, 1.0}, {gy, 0.0}}},
                                   {"inactive", {{gx, 0.0}, {gy, 1.0}}},
                                   {"dead", {{gx, 0.0}, {gy, 0.0}}}}));
  }
  B.cds(B.fresh_source("sgin"), sg, vDbar, m_g * (dx + 1.0));

  // Controls: unit debt in, unit debt out; their common feeder s_c is funded
  // when the decision succeeded OR the chosen set is empty, so they survive
  // in the all-empty solution and die in every other failing one.
  int sc = B.add_node("sc");
  int tctrl = B.fresh_sink("ctrl");
  json control_ids = json::array();
  for (int j = 0; j < m_c; ++j) {
    int c = B.add_node("ctrl" + std::to_string(j + 1), 0.0, "control");
    B.debt(sc, c, 1.0);
    B.debt(c, tctrl, 1.0);
    control_ids.push_back(sys.banks[c].id);
  }
  B.cds(B.fresh_source("scin"), sc, vDbar, static_cast<double>(m_c));
  B.cds(B.fresh_source("scin"), sc, vAny, static_cast<double>(m_c));
  B.finalize();
  sys.check_sane_references();

  auto settle = [&](int active_gadget) {
    IterateOptions io;
    io.damping = 0.5;
    io.max_iterations = 20000;
    io.eps = 1e-14;
    for (int z = 0; z < g.n; ++z) {
      const bool on = z == active_gadget;
      io.pins.emplace_back(core.base.xs[z], on ? 1.0 : 0.0);
      io.pins.emplace_back(core.base.ys[z], on ? 0.0 : 1.0);
    }
    IterateResult res = iterate(sys, io);
    if (res.status != IterateStatus::Converged)
      throw Error(ErrorCode::PropagationDiverged, "representative solution did not settle");
    auto viol = check_clearing(sys, res.rates);
    if (!viol.empty())
      throw Error(ErrorCode::InvalidSystem,
                  "representative solution fails verification at bank " +
                      sys.banks[viol[0].bank].id + " (" + viol[0].kind + ")");
    return res.rates;
  };
  std::vector<double> r = settle(-1);
  std::vector<double> rprime = settle(0);

  json manifest = base_manifest(B, g, core.base, opt);
  manifest["type"] = "representative";
  manifest["k"] = k;
  manifest["mg"] = m_g;
  manifest["mc"] = m_c;
  manifest["M"] = core.M;
  manifest["drivers"] = drivers;
  manifest["designated"] = json{{"v", sys.banks[core.v].id},
                                {"vD", sys.banks[core.vD].id},
                                {"vDbar", sys.banks[vDbar].id},
                                {"sg", sys.banks[sg].id},
                                {"sc", sys.banks[sc].id}};
  manifest["blocks"] = json{{"controls", control_ids}};
  json rj = json::object(), rpj = json::object();
  for (int b = 0; b < sys.size(); ++b) {
    rj[sys.banks[b].id] = r[b];
    rpj[sys.banks[b].id] = rprime[b];
  }
  manifest["solutions"] = json{{"r", rj}, {"rprime", rpj}};
  return RepresentativeResult{CompiledReduction{sys, manifest}, std::move(r), std::move(rprime)};
}

ParetoResult compile_pareto_suboptimal(const Graph& g, int k, double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
    throw Error(ErrorCode::BadArgument, "pareto construction needs 0 < alpha, beta < 1");
  if (g.n <= 0) throw Error(ErrorCode::BadArgument, "graph must have at least one vertex");
  if (k < 1 || k > g.n) throw Error(ErrorCode::BadK, "threshold k must lie in [1, n]");
  GadgetBuilder B(alpha, beta, false);
  auto& sys = B.system();
  const int N = g.n;
  const double M = 3.0 * N;
  std::vector<int> penalized;

  // Lossy mutual-debt pair: with beta < 1 its only states are (0,0) and
  // (1,1). Everything below is penalized on v0's default so that the
  // all-default solution r is Pareto-dominated iff the decision succeeds.
  int v0 = B.add_node("v0");
  int v0p = B.add_node("v0p");
  B.debt(v0, v0p, 1.0);
  B.debt(v0p, v0, 1.0);
  json drivers = json::array();
  drivers.push_back(driver_json(sys, "core",
                                {{"default", {{v0, 0.0}, {v0p, 0.0}}},
                                 {"solvent", {{v0, 1.0}, {v0p, 1.0}}}}));

  // n0 negates v0 with income exactly matching its obligations: solvent at
  // zero equity in r, in complete default when v0 survives. It gates the
  // threshold chain's funding below.
  int Xn = B.fresh_sink("n0");
  int n0 = B.add_node("n0");
  int Yn = B.add_node("Yn", 4.0);
  B.debt(n0, Xn, 1.0);
  B.cds(Yn, n0, v0, 3.0);
  B.cds(Yn, Xn, n0, 1.0);
  B.add_unhappy_penalty(n0, v0, 2.0);

  // Base gadgets; each sink is mirrored from the gadget source so its inflow
  // is exactly 2 in every solution.
  std::vector<int> xs, ys;
  for (int z = 0; z < N; ++z) {
    BranchPair bp = B.add_branching("g" + std::to_string(z + 1));
    B.cds(bp.source, bp.sink, bp.x, 1.0);
    B.cds(bp.source, bp.sink, bp.y, 1.0);
    xs.push_back(bp.x);
    ys.push_back(bp.y);
    penalized.push_back(bp.x);
    penalized.push_back(bp.y);
    drivers.push_back(driver_json(sys, "g" + std::to_string(z + 1),
                                  {{"active", {{bp.x, 1.0}, {bp.y, 0.0}}},
                                   {"inactive", {{bp.x, 0.0}, {bp.y, 1.0}}},
                                   {"free", {}}}));
  }

  // Cutoff stage with a mirrored sink (inflow exactly 1 whenever the stage's
  // source is solvent, which finalize() guarantees).
  auto mirrored_stage = [&](int input, double theta) {
    const double gw = 1.0 / (1.0 - theta);
    int src = B.fresh_source("cst");
    int st = B.add_node("cst" + std::to_string(sys.size()));
    int X = B.fresh_sink("cst");
    B.cds(src, st, input, gw);
    B.debt(st, X, 1.0);
    B.cds(src, X, st, 1.0);
    penalized.push_back(st);
    return st;
  };

  // Independence constraints: NAND per edge, collected by debts into c0 whose
  // rate is (#satisfied)/K, then thresholded into v_C.
  int vC;
  if (g.edges.empty()) {
    int s = B.fresh_source("vc");
    int t = B.fresh_sink("vc");
    vC = B.add_node("vC");
    B.debt(s, vC, 1.0);
    B.debt(vC, t, 1.0);
  } else {
    const int K = static_cast<int>(g.edges.size());
    int c0 = B.add_node("c0");
    for (auto [a, b] : g.edges) {
      int esrc = B.fresh_source("edge");
      int we = B.add_node("e" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
      B.cds(esrc, we, xs[a], 1.0);
      B.cds(esrc, we, xs[b], 1.0);
      B.debt(we, c0, 1.0);
      penalized.push_back(we);
    }
    int Xc0 = B.fresh_sink("c0");
    B.debt(c0, Xc0, static_cast<double>(K));
    B.cds(B.fresh_source("c0m"), Xc0, c0, static_cast<double>(K));
    penalized.push_back(c0);
    const double e1 = (3.0 * K - 2.0) / (3.0 * K);
    const double e2 = (3.0 * K - 1.0) / (3.0 * K);
    int st1 = mirrored_stage(c0, e1);
    vC = mirrored_stage(st1, beta * (1.0 - e2) / (1.0 - e1));
  }

  // Designated bank v: one unit of income per active vertex, debt k - 1/2
  // out. The half-unit margin keeps v strictly solvent on success (income k
  // or more) and strictly insolvent otherwise, so the damped solve never
  // parks v on the solvency boundary; the decision threshold is unchanged
  // and the fail-side rates beta*|D|/(k - 1/2) stay below the d1 cutoff.
  int v = B.add_node("v");
  for (int z = 0; z < N; ++z) B.cds(B.fresh_source("vin"), v, ys[z], 1.0);
  int Xv = B.fresh_sink("v");
  B.debt(v, Xv, k - 0.5);
  B.cds(B.fresh_source("vmir"), Xv, v, k - 0.5);

  // Threshold chain for vD, gated through n0: in r the stage feeders receive
  // exactly zero (their funding CDS references n0, solvent there), so
  // r_vD = 0 exactly; when v0 survives the chain computes the usual cutoff.
  auto gated_stage = [&](int input, double theta) {
    const double gw = 1.0 / (1.0 - theta);
    int gsrc = B.fresh_source("gd");
    int sst = B.add_node("gds" + std::to_string(sys.size()));
    int st = B.add_node("gd" + std::to_string(sys.size()));
    int X = B.fresh_sink("gd");
    B.cds(gsrc, sst, n0, gw + 1.0);
    B.cds(sst, st, input, gw);
    B.debt(st, X, 1.0);
    B.cds(sst, X, st, 1.0);
    penalized.push_back(sst);
    penalized.push_back(st);
    return st;
  };
  const double d1 = (3.0 * k - 2.0) / (3.0 * k);
  const double d2 = (3.0 * k - 1.0) / (3.0 * k);
  int dst1 = gated_stage(v, d1);
  int vD = gated_stage(dst1, beta * (1.0 - d2) / (1.0 - d1));

  // vDbar negates vD, income-matched like n0.
  int X = B.fresh_sink("vdb");
  int vDbar = B.add_node("vDbar");
  int Y = B.add_node("Y", 4.0);
  B.debt(vDbar, X, 1.0);
  B.cds(Y, vDbar, vD, 3.0);
  B.cds(Y, X, vDbar, 1.0);
  B.add_unhappy_penalty(vDbar, v0, 2.0);

  // Witness pair: q_w = q_s0 = 1 both in r and in any dominating solution,
  // but q_w = 0 in every v0-solvent solution that fails the decision.
  int s0 = B.add_node("s0", 2.0);
  int w = B.add_node("w");
  B.cds(s0, w, v0, 1.0);
  B.cds(s0, w, vDbar, 1.0);

  // Unhappy penalties. Snapshot notionals first: h_v exceeding external +
  // incoming + outgoing guarantees genuine insolvency (and zero equity) in r
  // for every penalized non-source node; h >= outgoing keeps every (always
  // solvent) source's equity weakly higher when v0 survives.
  const int snapshot = sys.size();
  std::vector<double> in_n(snapshot, 0.0), out_n(snapshot, 0.0);
  for (const auto& d : sys.debts) {
    out_n[d.debtor] += d.weight;
    in_n[d.creditor] += d.weight;
  }
  for (const auto& c : sys.cdss) {
    out_n[c.debtor] += c.weight;
    in_n[c.creditor] += c.weight;
  }
  const double hv = sys.banks[v].external + in_n[v] + out_n[v] + M + 1.0;
  int t0v = B.add_unhappy_penalty(v, v0, hv);
  B.cds(v, t0v, vC, M);  // constraint penalty, absorbed by v's own chain
  for (int nd : penalized)
    B.add_unhappy_penalty(nd, v0, sys.banks[nd].external + in_n[nd] + out_n[nd] + 1.0);
  for (int b = 0; b < snapshot; ++b)
    if (sys.banks[b].role == "source") B.add_unhappy_penalty(b, v0, out_n[b] + 1.0);

  B.finalize();
  sys.check_sane_references();

  // With v0/v0p pinned, every remaining cycle couples strictly insolvent
  // penalized nodes whose update has slope below 1, so the undamped sweep
  // contracts and propagates the exact 0/1 rates the knife-edge banks
  // (n0, vDbar) need: their income matches their obligations to the cent.
  IterateOptions io;
  io.damping = 1.0;
  io.max_iterations = 40000;
  io.eps = 1e-14;
  io.pins = {{v0, 0.0}, {v0p, 0.0}};
  IterateResult res = iterate(sys, io);
  if (res.status != IterateStatus::Converged)
    throw Error(ErrorCode::PropagationDiverged, "pareto base solution did not settle");
  auto viol = check_clearing(sys, res.rates);
  if (!viol.empty())
    throw Error(ErrorCode::InvalidSystem, "pareto base solution fails verification at bank " +
                                              sys.banks[viol[0].bank].id + " (" + viol[0].kind +
                                              ")");

  json activity = json::array();
  for (int x : xs) activity.push_back(sys.banks[x].id);
  json rj = json::object();
  for (int b = 0; b < sys.size(); ++b) rj[sys.banks[b].id] = res.rates[b];
  json manifest = json{
      {"type", "pareto"},
      {"graph", graph_json(g)},
      {"k", k},
      {"M", M},
      {"alpha", alpha},
      {"beta", beta},
      {"bounded", json{{"enabled", false}, {"maxWeight", B.max_emitted_weight()}}},
      {"modifiedGadgets", false},
      {"drivers", drivers},
      {"decode", json{{"activity", activity}}},
      {"designated", json{{"v0", sys.banks[v0].id},
                          {"v", sys.banks[v].id},
                          {"vD", sys.banks[vD].id},
                          {"vDbar", sys.banks[vDbar].id},
                          {"s0", sys.banks[s0].id},
                          {"w", sys.banks[w].id}}},
      {"blocks", json::object()},
      {"solutions", json{{"r", rj}}},
  };
  return ParetoResult{CompiledReduction{sys, manifest}, res.rates};
}

CompiledReduction build_showcase(ShowcaseKind kind, int param) {
  switch (kind) {
    case ShowcaseKind::InfiniteSolutions: {
      GadgetBuilder B;
      auto& sys = B.system();
      BranchPair bp = B.add_continuum_branching("core");
      json drivers = json::array();
      std::vector<std::pair<std::string, std::vector<std::pair<int, double>>>> states;
      for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        states.push_back({"rho=" + std::to_string(rho).substr(0, 4),
                          {{bp.x, rho}, {bp.y, 1.0 - rho}}});
      }
      drivers.push_back(driver_json(sys, "core", states));
      B.finalize();
      json manifest = json{{"type", "showcase"},
                           {"kind", "infinite-solutions"},
                           {"drivers", drivers},
                           {"designated", json{{"x", sys.banks[bp.x].id}, {"y", sys.banks[bp.y].id}}}};
      return CompiledReduction{sys, manifest};
    }
    case ShowcaseKind::ExponentialSolutions: {
      const int gk = param > 0 ? param : 10;
      GadgetBuilder B;
      auto& sys = B.system();
      json drivers = json::array();
      for (int i = 0; i < gk; ++i) {
        BranchPair bp = B.add_branching("g" + std::to_string(i + 1));
        drivers.push_back(driver_json(sys, "g" + std::to_string(i + 1),
                                      {{"active", {{bp.x, 1.0}, {bp.y, 0.0}}},
                                       {"inactive", {{bp.x, 0.0}, {bp.y, 1.0}}}}));
      }
      B.finalize();
      json manifest = json{{"type", "showcase"},
                           {"kind", "exponential-solutions"},
                           {"gadgets", gk},
                           {"drivers", drivers}};
      return CompiledReduction{sys, manifest};
    }
    case ShowcaseKind::FourOptima: {
      // Two-pass: the magnitude h scales with the final bank count, which
      // does not depend on h.
      auto build = [](double h) {
        GadgetBuilder B;
        auto& sys = B.system();
        BranchPair g1 = B.add_branching("g1");
        BranchPair g2 = B.add_branching("g2");
        int u1 = B.add_and({g1.x, g2.x});
        int u2 = B.add_and({g1.x, g2.y});
        int u3 = B.add_and({g1.y, g2.x});
        int u4 = B.add_and({g1.y, g2.y});
        int t = B.fresh_sink("sc");
        int s = B.fresh_source("sc");
        const int n1 = 8, n2 = 24;
        for (int i = 0; i < n1; ++i) {
          int wi = B.add_node("W1_" + std::to_string(i + 1), 0.0);
          B.cds(wi, t, u1, 1.0);
        }
        int nu2 = B.add_not(u2);
        for (int i = 0; i < n2; ++i) {
          int wi = B.add_node("W2_" + std::to_string(i + 1), 0.0);
          B.cds(s, wi, nu2, 1.0);
        }
        int w3 = B.add_node("w3", 0.0);
        B.cds(w3, t, u3, h * h);
        B.cds(s, t, u3, h * h);
        int w4 = B.add_node("w4", 0.0);
        B.cds(w4, t, u4, h);
        B.cds(s, t, B.add_not(u4), h * h * h);
        B.finalize();
        json drivers = json::array();
        drivers.push_back(driver_json(sys, "g1",
                                      {{"active", {{g1.x, 1.0}, {g1.y, 0.0}}},
                                       {"inactive", {{g1.x, 0.0}, {g1.y, 1.0}}}}));
        drivers.push_back(driver_json(sys, "g2",
                                      {{"active", {{g2.x, 1.0}, {g2.y, 0.0}}},
                                       {"inactive", {{g2.x, 0.0}, {g2.y, 1.0}}}}));
        json manifest = json{{"type", "showcase"},
                             {"kind", "four-optima"},
                             {"h", h},
                             {"drivers", drivers},
                             {"designated", json{{"u1", sys.banks[u1].id},
                                                 {"u2", sys.banks[u2].id},
                                                 {"u3", sys.banks[u3].id},
                                                 {"u4", sys.banks[u4].id}}}};
        return CompiledReduction{sys, manifest};
      };
      CompiledReduction probe = build(2.0);
      const double h = param > 0 ? static_cast<double>(param)
                                 : 10.0 * static_cast<double>(probe.system.size());
      CompiledReduction out = build(h);
      out.manifest["banks"] = out.system.size();
      return out;
    }
  }
  throw Error(ErrorCode::BadArgument, "unknown showcase kind");
}

CompiledReduction bounded_weight_transform(const CompiledReduction& in) {
  const json& mf = in.manifest;
  if (!mf.is_object() || !mf.contains("type"))
    throw Error(ErrorCode::UnsplittableContract, "manifest missing; cannot replay compilation");
  const std::string type = mf["type"].get<std::string>();
  CompileOptions opt;
  opt.alpha = mf.value("alpha", 1.0);
  opt.beta = mf.value("beta", 1.0);
  opt.bounded = true;
  opt.modified_gadgets = mf.value("modifiedGadgets", false);
  opt.m = mf.value("m", 4);
  if (type == "objective") {
    auto kind = objective_from_name(mf.at("objective").get<std::string>());
    if (!kind) throw Error(ErrorCode::ParseError, "unknown objective in manifest");
    return compile_objective(graph_from_json(mf.at("graph")), *kind, opt);
  }
  if (type == "decision")
    return compile_decision(graph_from_json(mf.at("graph")), mf.at("k").get<int>(), opt);
  throw Error(ErrorCode::UnsplittableContract,
              "no bounded-weight recipe for manifest type '" + type + "'");
}

std::vector<Driver> drivers_from_manifest(const FinancialSystem& sys, const json& manifest) {
  std::vector<Driver> out;
  if (!manifest.is_object() || !manifest.contains("drivers")) return out;
  for (const auto& dj : manifest.at("drivers")) {
    Driver d;
    d.name = dj.at("name").get<std::string>();
    for (const auto& st : dj.at("states")) {
      DriverState ds;
      ds.label = st.at("label").get<std::string>();
      for (const auto& pin : st.at("pins")) {
        const std::string id = pin.at(0).get<std::string>();
        int idx = sys.index_of(id);
        if (idx < 0)
          throw Error(ErrorCode::ParseError, "driver pin references unknown bank '" + id + "'");
        ds.pins.emplace_back(idx, pin.at(1).get<double>());
      }
      d.states.push_back(std::move(ds));
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace fclear
