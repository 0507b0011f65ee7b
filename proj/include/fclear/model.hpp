#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fclear {

enum class ErrorCode {
  InvalidSystem,
  ParseError,
  HashMismatch,
  PropagationDiverged,
  EnumerationCapExceeded,
  TooManyBanks,
  MissingDesignation,
  BadK,
  UnsplittableContract,
  BadArgument,
};

struct Error : std::runtime_error {
  ErrorCode code;
  Error(ErrorCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidSystem: return "InvalidSystem";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::HashMismatch: return "HashMismatch";
    case ErrorCode::PropagationDiverged: return "PropagationDiverged";
    case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::TooManyBanks: return "TooManyBanks";
    case ErrorCode::MissingDesignation: return "MissingDesignation";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::UnsplittableContract: return "UnsplittableContract";
    case ErrorCode::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

struct Bank {
  std::string id;
  double external = 0.0;
  std::string role;  // optional annotation (source/sink/control/replica/...)
};

// Simple debt: debtor owes `weight` to creditor unconditionally.
struct Debt {
  int debtor;
  int creditor;
  double weight;
};

// Credit default swap: debtor owes weight * (1 - r_reference) to creditor.
struct Cds {
  int debtor;
  int creditor;
  int reference;
  double weight;
};

// A financial network: banks with external assets, simple debts and CDSs,
// plus the default-cost parameters alpha (external) and beta (interbank).
// alpha = beta = 1 is the lossless model.
class FinancialSystem {
 public:
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<Bank> banks;
  std::vector<Debt> debts;
  std::vector<Cds> cdss;

  int add_bank(const std::string& id, double external, const std::string& role = "");
  void add_debt(int debtor, int creditor, double weight);
  void add_cds(int debtor, int creditor, int reference, double weight);

  int size() const { return static_cast<int>(banks.size()); }
  bool lossless() const { return alpha == 1.0 && beta == 1.0; }

  // Returns bank index for an id, or -1.
  int index_of(const std::string& id) const;

  // Structural validation: ids unique/nonempty, indices in range, weights
  // positive, no self-debts, alpha/beta in [0,1]. Throws InvalidSystem.
  void validate() const;

  // Sanity assumption used by the hardness constructions: every bank that
  // appears as a CDS reference has at least one outgoing debt (so its
  // recovery rate is meaningfully constrained). Throws InvalidSystem.
  void check_sane_references() const;

 private:
  std::unordered_map<std::string, int> index_;
};

}  // namespace fclear
