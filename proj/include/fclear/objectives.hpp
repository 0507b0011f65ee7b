#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fclear/model.hpp"

namespace fclear {

enum class ObjectiveKind {
  MaxEquity,      // equity of a designated bank (maximize)
  MinEquity,      // equity of a designated bank (minimize)
  MinDefault,     // number of banks in default
  MaxSurviving,   // number of banks not in default
  MaxPrefer,      // number of banks attaining their best-case equity
  MinLeastPrefer, // number of banks at their worst-case equity
  MinUnpaid,      // total unpaid liabilities
  MaxPaid,        // total payments made
  MinPropUnpaid,  // unpaid fraction of total liabilities
  MaxPropPaid,    // paid fraction of total liabilities
  MinDiffEq,      // |q_v1 - q_v2| for two designated banks
  AllianceBalance // |sum_{V1} q - sum_{V2} q| for a designated partition
};

const char* objective_name(ObjectiveKind k);
std::optional<ObjectiveKind> objective_from_name(const std::string& name);
bool objective_is_max(ObjectiveKind k);

struct Designation {
  std::optional<int> v;                  // MaxEquity / MinEquity
  std::optional<int> v1, v2;             // MinDiffEq
  std::vector<int> group2;               // AllianceBalance: V2 (V1 = rest)
};

// System-wide objective value of a clearing vector. Throws
// MissingDesignation when the objective needs designated banks that are
// absent.
double evaluate_objective(const FinancialSystem& sys, const std::vector<double>& rates,
                          ObjectiveKind kind, const Designation& des = {}, double tol = 1e-9);

// For each solution, the number of banks whose equity is within 10*tol of
// their best equity across the whole list (MaxPrefer) — and the worst-case
// counterpart (MinLeastPrefer).
std::vector<int> preference_counts(const FinancialSystem& sys,
                                   const std::vector<std::vector<double>>& solutions,
                                   bool best = true, double tol = 1e-9);

// L1 distance between rate vectors.
double rate_distance(const std::vector<double>& a, const std::vector<double>& b);

// cent1: distance to the componentwise mean of the set.
// cent2: summed distance to every member of the set.
double centrality1(const std::vector<double>& r, const std::vector<std::vector<double>>& set);
double centrality2(const std::vector<double>& r, const std::vector<std::vector<double>>& set);

}  // namespace fclear
