#include "fclear/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fclear {

namespace {
constexpr double kDedupTol = 1e-7;

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}
}  // namespace

Evaluation evaluate_state(const FinancialSystem& sys, const std::vector<double>& rates) {
  const int n = sys.size();
  Evaluation ev;
  ev.liability.assign(n, 0.0);
  ev.inflow.assign(n, 0.0);
  for (const auto& d : sys.debts) {
    ev.liability[d.debtor] += d.weight;
    ev.inflow[d.creditor] += rates[d.debtor] * d.weight;
  }
  for (const auto& c : sys.cdss) {
    const double exposure = c.weight * std::max(0.0, 1.0 - rates[c.reference]);
    ev.liability[c.debtor] += exposure;
    ev.inflow[c.creditor] += rates[c.debtor] * exposure;
  }
  ev.lossless_assets.resize(n);
  ev.lossy_assets.resize(n);
  for (int v = 0; v < n; ++v) {
    const double e = sys.banks[v].external;
    ev.lossless_assets[v] = e + ev.inflow[v];
    ev.lossy_assets[v] = sys.alpha * e + sys.beta * ev.inflow[v];
  }
  return ev;
}

std::vector<double> update_step(const FinancialSystem& sys, const std::vector<double>& rates) {
  Evaluation ev = evaluate_state(sys, rates);
  const int n = sys.size();
  std::vector<double> next(n);
  for (int v = 0; v < n; ++v) {
    const double l = ev.liability[v];
    if (l <= 0.0 || ev.lossless_assets[v] >= l) {
      next[v] = 1.0;
    } else {
      next[v] = std::clamp(ev.lossy_assets[v] / l, 0.0, 1.0);
    }
  }
  return next;
}

std::vector<double> equities(const FinancialSystem& sys, const std::vector<double>& rates,
                             double tol) {
  Evaluation ev = evaluate_state(sys, rates);
  const int n = sys.size();
  std::vector<double> q(n);
  for (int v = 0; v < n; ++v) {
    const double assets =
        rates[v] >= 1.0 - tol ? ev.lossless_assets[v] : ev.lossy_assets[v];
    q[v] = std::max(assets - ev.liability[v], 0.0);
  }
  return q;
}

std::vector<Violation> check_clearing(const FinancialSystem& sys,
                                      const std::vector<double>& rates, double tol) {
  std::vector<Violation> out;
  if (static_cast<int>(rates.size()) != sys.size()) {
    out.push_back({-1, "rate-out-of-range", static_cast<double>(rates.size())});
    return out;
  }
  Evaluation ev = evaluate_state(sys, rates);
  for (int v = 0; v < sys.size(); ++v) {
    const double r = rates[v];
    if (r < -tol || r > 1.0 + tol) {
      out.push_back({v, "rate-out-of-range", r});
      continue;
    }
    const double l = ev.liability[v];
    const double scale = std::max(1.0, l);
    if (l <= 0.0) {
      // No liabilities: the bank trivially honors everything.
      if (r < 1.0 - tol) out.push_back({v, "zero-liability", r});
      continue;
    }
    if (r >= 1.0 - tol) {
      if (ev.lossless_assets[v] < l - tol * scale)
        out.push_back({v, "solvency", l - ev.lossless_assets[v]});
    } else {
      // Defaulting banks must pay out exactly their lossy assets...
      if (std::fabs(r * l - ev.lossy_assets[v]) > tol * scale)
        out.push_back({v, "payment", r * l - ev.lossy_assets[v]});
      // ...and must be genuinely insolvent (lossless assets short of
      // liabilities); otherwise the clearing condition forces rate 1.
      if (ev.lossless_assets[v] > l - tol * scale)
        out.push_back({v, "not-insolvent", ev.lossless_assets[v] - l});
    }
  }
  return out;
}

IterateResult iterate(const FinancialSystem& sys, const IterateOptions& opts,
                      const std::vector<double>* start) {
  const int n = sys.size();
  std::vector<double> cur = start ? *start : std::vector<double>(n, 1.0);
  auto apply_pins = [&](std::vector<double>& r) {
    for (const auto& [idx, rate] : opts.pins) r[idx] = rate;
  };
  apply_pins(cur);
  std::vector<double> prev2;
  for (int it = 0; it < opts.max_iterations; ++it) {
    std::vector<double> next = update_step(sys, cur);
    if (opts.damping != 1.0) {
      for (int v = 0; v < n; ++v) next[v] = (1.0 - opts.damping) * cur[v] + opts.damping * next[v];
    }
    apply_pins(next);
    if (sup_distance(next, cur) <= opts.eps) return {next, IterateStatus::Converged, it + 1};
    if (!prev2.empty() && sup_distance(next, prev2) <= opts.eps)
      return {next, IterateStatus::Oscillating, it + 1};
    prev2 = std::move(cur);
    cur = std::move(next);
  }
  return {cur, IterateStatus::MaxIterations, opts.max_iterations};
}

SolutionSet enumerate_solutions(const FinancialSystem& sys, const std::vector<Driver>& drivers,
                                const EnumerateOptions& opts) {
  long combos = 1;
  for (const auto& d : drivers) {
    if (d.states.empty())
      throw Error(ErrorCode::BadArgument, "driver with no states: " + d.name);
    combos *= static_cast<long>(d.states.size());
    if (combos > opts.cap)
      throw Error(ErrorCode::EnumerationCapExceeded,
                  "driver product exceeds cap of " + std::to_string(opts.cap));
  }
  SolutionSet out;
  std::vector<size_t> idx(drivers.size(), 0);
  for (long c = 0; c < combos; ++c) {
    IterateOptions iopts;
    iopts.damping = opts.damping;
    iopts.max_iterations = opts.max_iterations;
    std::string assignment;
    for (size_t i = 0; i < drivers.size(); ++i) {
      const auto& st = drivers[i].states[idx[i]];
      if (!assignment.empty()) assignment += ",";
      assignment += drivers[i].name + "=" + st.label;
      for (const auto& pin : st.pins) iopts.pins.push_back(pin);
    }
    IterateResult res = iterate(sys, iopts);
    if (res.status != IterateStatus::Converged) {
      out.diverged.push_back(assignment);
    } else if (check_clearing(sys, res.rates, opts.tol).empty()) {
      bool dup = false;
      for (const auto& s : out.solutions)
        if (sup_distance(s.rates, res.rates) <= kDedupTol) {
          dup = true;
          break;
        }
      if (!dup) out.solutions.push_back({std::move(res.rates), assignment});
    }
    for (size_t i = drivers.size(); i-- > 0;) {
      if (++idx[i] < drivers[i].states.size()) break;
      idx[i] = 0;
    }
  }
  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const Solution& a, const Solution& b) { return a.assignment < b.assignment; });
  return out;
}

DefaultSetResult enumerate_default_sets(const FinancialSystem& sys, double tol) {
  const int n = sys.size();
  std::vector<int> candidates;
  {
    std::vector<bool> has_liability(n, false);
    for (const auto& d : sys.debts) has_liability[d.debtor] = true;
    for (const auto& c : sys.cdss) has_liability[c.debtor] = true;
    for (int v = 0; v < n; ++v)
      if (has_liability[v]) candidates.push_back(v);
  }
  if (candidates.size() > 16)
    throw Error(ErrorCode::TooManyBanks,
                "default-set enumeration limited to 16 candidate banks, got " +
                    std::to_string(candidates.size()));

  DefaultSetResult result;
  auto bank_id = [&](int v) { return sys.banks[v].id; };

  for (uint32_t mask = 0; mask < (1u << candidates.size()); ++mask) {
    std::vector<int> dset;
    for (size_t i = 0; i < candidates.size(); ++i)
      if (mask & (1u << i)) dset.push_back(candidates[i]);

    std::string assignment = "D={";
    for (size_t i = 0; i < dset.size(); ++i)
      assignment += (i ? "," : "") + bank_id(dset[i]);
    assignment += "}";

    std::vector<std::vector<double>> starts;
    for (double s0 : {0.0, 0.5, 0.99}) {
      std::vector<double> r(n, 1.0);
      for (int v : dset) r[v] = s0;
      starts.push_back(std::move(r));
    }
    if (dset.size() > 1) {
      // Asymmetric start: symmetric starts can collapse onto a symmetric
      // attractor and hide one-parameter families of fixed points.
      std::vector<double> r(n, 1.0);
      int k = 0;
      for (int v : dset) r[v] = (k++ % 2) ? 0.9 : 0.1;
      starts.push_back(std::move(r));
    }

    std::vector<std::vector<double>> attempts;
    for (std::vector<double>& r : starts) {
      // Damped iteration restricted to the default set: members follow the
      // lossy-payment branch; everyone else is held solvent.
      bool converged = false;
      for (int it = 0; it < 4000; ++it) {
        Evaluation ev = evaluate_state(sys, r);
        double change = 0.0;
        for (int v : dset) {
          const double l = ev.liability[v];
          double target = l > 0.0 ? std::clamp(ev.lossy_assets[v] / l, 0.0, 1.0) : 1.0;
          double nv = 0.5 * r[v] + 0.5 * target;
          change = std::max(change, std::fabs(nv - r[v]));
          r[v] = nv;
        }
        if (change <= 1e-13) {
          converged = true;
          break;
        }
      }
      if (!converged) continue;
      bool strict_default = true;
      for (int v : dset)
        if (r[v] >= 1.0 - tol) strict_default = false;
      if (!strict_default) continue;
      if (!check_clearing(sys, r, tol).empty()) continue;
      attempts.push_back(std::move(r));
    }
    // Deduplicate attempts; two verified fixed points for one default set
    // that differ meaningfully suggest a continuum.
    std::vector<std::vector<double>> distinct;
    for (auto& a : attempts) {
      bool dup = false;
      for (const auto& d : distinct)
        if (sup_distance(a, d) <= 10 * tol) dup = true;
      if (!dup) distinct.push_back(std::move(a));
    }
    if (distinct.size() > 1) result.continuum_suspected = true;
    for (auto& r : distinct) {
      bool dup = false;
      for (const auto& s : result.set.solutions)
        if (sup_distance(s.rates, r) <= kDedupTol) dup = true;
      if (!dup) result.set.solutions.push_back({std::move(r), assignment});
    }
  }
  std::sort(result.set.solutions.begin(), result.set.solutions.end(),
            [](const Solution& a, const Solution& b) { return a.assignment < b.assignment; });
  return result;
}

ParetoVerdict pareto_compare(const FinancialSystem& sys, const std::vector<double>& r1,
                             const std::vector<double>& r2, double tol) {
  std::vector<double> q1 = equities(sys, r1, tol);
  std::vector<double> q2 = equities(sys, r2, tol);
  bool better_somewhere = false, worse_somewhere = false;
  for (size_t v = 0; v < q1.size(); ++v) {
    const double scale = std::max({1.0, q1[v], q2[v]});
    if (q1[v] > q2[v] + tol * scale) better_somewhere = true;
    if (q2[v] > q1[v] + tol * scale) worse_somewhere = true;
  }
  if (better_somewhere && worse_somewhere) return ParetoVerdict::Incomparable;
  if (better_somewhere) return ParetoVerdict::StrictlyBetter;
  if (worse_somewhere) return ParetoVerdict::StrictlyWorse;
  return ParetoVerdict::Equal;
}

SpaceSummary solution_space_summary(const FinancialSystem& sys,
                                    const std::vector<Solution>& solutions, double tol) {
  SpaceSummary out;
  std::set<std::vector<bool>> patterns;
  for (const auto& s : solutions) {
    std::vector<bool> pat(s.rates.size());
    for (size_t v = 0; v < s.rates.size(); ++v) pat[v] = s.rates[v] < 1.0 - tol;
    patterns.insert(std::move(pat));
  }
  out.essential_classes = static_cast<int>(patterns.size());
  for (size_t i = 0; i < solutions.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < solutions.size() && !dominated; ++j) {
      if (i == j) continue;
      if (pareto_compare(sys, solutions[j].rates, solutions[i].rates, tol) ==
          ParetoVerdict::StrictlyBetter)
        dominated = true;
    }
    if (!dominated) out.pareto_front.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace fclear
