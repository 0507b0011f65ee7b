#include "fclear/objectives.hpp"

#include <cmath>

#include "fclear/solver.hpp"

namespace fclear {

const char* objective_name(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::MaxEquity: return "MaxEquity";
    case ObjectiveKind::MinEquity: return "MinEquity";
    case ObjectiveKind::MinDefault: return "MinDefault";
    case ObjectiveKind::MaxSurviving: return "MaxSurviving";
    case ObjectiveKind::MaxPrefer: return "MaxPrefer";
    case ObjectiveKind::MinLeastPrefer: return "MinLeastPrefer";
    case ObjectiveKind::MinUnpaid: return "MinUnpaid";
    case ObjectiveKind::MaxPaid: return "MaxPaid";
    case ObjectiveKind::MinPropUnpaid: return "MinPropUnpaid";
    case ObjectiveKind::MaxPropPaid: return "MaxPropPaid";
    case ObjectiveKind::MinDiffEq: return "MinDiffEq";
    case ObjectiveKind::AllianceBalance: return "AllianceBalance";
  }
  return "?";
}

std::optional<ObjectiveKind> objective_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(ObjectiveKind::AllianceBalance); ++i) {
    auto k = static_cast<ObjectiveKind>(i);
    if (name == objective_name(k)) return k;
  }
  return std::nullopt;
}

bool objective_is_max(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::MaxEquity:
    case ObjectiveKind::MaxSurviving:
    case ObjectiveKind::MaxPrefer:
    case ObjectiveKind::MaxPaid:
    case ObjectiveKind::MaxPropPaid:
      return true;
    default:
      return false;
  }
}

double evaluate_objective(const FinancialSystem& sys, const std::vector<double>& rates,
                          ObjectiveKind kind, const Designation& des, double tol) {
  Evaluation ev = evaluate_state(sys, rates);
  std::vector<double> q = equities(sys, rates, tol);
  auto need = [&](const std::optional<int>& v, const char* what) {
    if (!v || *v < 0 || *v >= sys.size())
      throw Error(ErrorCode::MissingDesignation,
                  std::string("objective needs designated bank: ") + what);
    return *v;
  };
  switch (kind) {
    case ObjectiveKind::MaxEquity:
    case ObjectiveKind::MinEquity:
      return q[need(des.v, "v")];
    case ObjectiveKind::MinDefault: {
      int d = 0;
      for (int v = 0; v < sys.size(); ++v)
        if (rates[v] < 1.0 - tol) ++d;
      return d;
    }
    case ObjectiveKind::MaxSurviving: {
      int s = 0;
      for (int v = 0; v < sys.size(); ++v)
        if (rates[v] >= 1.0 - tol) ++s;
      return s;
    }
    case ObjectiveKind::MaxPrefer:
    case ObjectiveKind::MinLeastPrefer:
      throw Error(ErrorCode::MissingDesignation,
                  "preference objectives need a solution-set context; use preference_counts");
    case ObjectiveKind::MinUnpaid: {
      double u = 0.0;
      for (int v = 0; v < sys.size(); ++v) u += (1.0 - rates[v]) * ev.liability[v];
      return u;
    }
    case ObjectiveKind::MaxPaid: {
      double p = 0.0;
      for (int v = 0; v < sys.size(); ++v) p += rates[v] * ev.liability[v];
      return p;
    }
    case ObjectiveKind::MinPropUnpaid:
    case ObjectiveKind::MaxPropPaid: {
      double total = 0.0, paid = 0.0;
      for (int v = 0; v < sys.size(); ++v) {
        total += ev.liability[v];
        paid += rates[v] * ev.liability[v];
      }
      if (total <= 0.0) return kind == ObjectiveKind::MaxPropPaid ? 1.0 : 0.0;
      return kind == ObjectiveKind::MaxPropPaid ? paid / total : (total - paid) / total;
    }
    case ObjectiveKind::MinDiffEq:
      return std::fabs(q[need(des.v1, "v1")] - q[need(des.v2, "v2")]);
    case ObjectiveKind::AllianceBalance: {
      if (des.group2.empty())
        throw Error(ErrorCode::MissingDesignation, "alliance balance needs a partition");
      std::vector<bool> in2(sys.size(), false);
      for (int v : des.group2) {
        if (v < 0 || v >= sys.size())
          throw Error(ErrorCode::MissingDesignation, "partition index out of range");
        in2[v] = true;
      }
      double s1 = 0.0, s2 = 0.0;
      for (int v = 0; v < sys.size(); ++v) (in2[v] ? s2 : s1) += q[v];
      return std::fabs(s1 - s2);
    }
  }
  throw Error(ErrorCode::BadArgument, "unknown objective");
}

std::vector<int> preference_counts(const FinancialSystem& sys,
                                   const std::vector<std::vector<double>>& solutions, bool best,
                                   double tol) {
  const int n = sys.size();
  std::vector<std::vector<double>> qs;
  qs.reserve(solutions.size());
  for (const auto& r : solutions) qs.push_back(equities(sys, r, tol));
  std::vector<double> bound(n, best ? -1.0 : 1e300);
  for (const auto& q : qs)
    for (int v = 0; v < n; ++v) bound[v] = best ? std::max(bound[v], q[v]) : std::min(bound[v], q[v]);
  std::vector<int> counts;
  counts.reserve(qs.size());
  for (const auto& q : qs) {
    int c = 0;
    for (int v = 0; v < n; ++v) {
      const double scale = std::max(1.0, std::fabs(bound[v]));
      if (std::fabs(q[v] - bound[v]) <= 10 * tol * scale) ++c;
    }
    counts.push_back(c);
  }
  return counts;
}

double rate_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
  return d;
}

double centrality1(const std::vector<double>& r, const std::vector<std::vector<double>>& set) {
  if (set.empty()) return 0.0;
  std::vector<double> mean(r.size(), 0.0);
  for (const auto& s : set)
    for (size_t i = 0; i < r.size(); ++i) mean[i] += s[i];
  for (auto& m : mean) m /= static_cast<double>(set.size());
  return rate_distance(r, mean);
}

double centrality2(const std::vector<double>& r, const std::vector<std::vector<double>>& set) {
  double total = 0.0;
  for (const auto& s : set) total += rate_distance(r, s);
  return total;
}

}  // namespace fclear
