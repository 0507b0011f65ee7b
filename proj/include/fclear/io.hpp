#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "fclear/model.hpp"
#include "fclear/oracles.hpp"
#include "fclear/solver.hpp"

namespace fclear {

// System JSON schema:
// { "version": 1, "alpha": 1.0, "beta": 1.0,
//   "banks": [{"id": "u", "external": 2.0, "role": "..."?}, ...],
//   "debts": [{"debtor": "u", "creditor": "w", "weight": 2.0}, ...],
//   "cds":   [{"debtor": "w", "creditor": "v", "reference": "u", "weight": 2.0}, ...] }
nlohmann::json system_to_json(const FinancialSystem& sys);
FinancialSystem system_from_json(const nlohmann::json& j);

// Canonical serialization (stable field and contract order) and its FNV-1a
// hash, used to tie recovery-vector files to their system.
std::string canonical_serialization(const FinancialSystem& sys);
uint64_t fnv1a(const std::string& data);
std::string system_hash(const FinancialSystem& sys);

// Recovery vectors: {"systemHash": "..."?, "rates": {"u": 0.5, ...}}.
// Loading verifies the hash when present (HashMismatch otherwise).
nlohmann::json rates_to_json(const FinancialSystem& sys, const std::vector<double>& rates,
                             bool with_hash = true);
std::vector<double> rates_from_json(const FinancialSystem& sys, const nlohmann::json& j);

nlohmann::json solution_set_to_json(const FinancialSystem& sys, const SolutionSet& set);

// Graph input: plain edge list ("N M" header then M lines "a b", 1-indexed)
// or DIMACS ("c" comments, "p edge N M", "e a b").
Graph parse_graph(const std::string& text);
std::string graph_to_text(const Graph& g);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace fclear
