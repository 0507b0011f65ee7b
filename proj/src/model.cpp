#include "fclear/model.hpp"

#include <cmath>
#include <set>

namespace fclear {

int FinancialSystem::add_bank(const std::string& id, double external, const std::string& role) {
  if (id.empty()) throw Error(ErrorCode::InvalidSystem, "bank id must be nonempty");
  if (index_.count(id)) throw Error(ErrorCode::InvalidSystem, "duplicate bank id: " + id);
  int idx = static_cast<int>(banks.size());
  banks.push_back(Bank{id, external, role});
  index_[id] = idx;
  return idx;
}

void FinancialSystem::add_debt(int debtor, int creditor, double weight) {
  debts.push_back(Debt{debtor, creditor, weight});
}

void FinancialSystem::add_cds(int debtor, int creditor, int reference, double weight) {
  cdss.push_back(Cds{debtor, creditor, reference, weight});
}

int FinancialSystem::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

void FinancialSystem::validate() const {
  auto in_range = [&](int v) { return v >= 0 && v < size(); };
  if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0))
    throw Error(ErrorCode::InvalidSystem, "alpha/beta must lie in [0,1]");
  for (const auto& b : banks) {
    if (!(b.external >= 0.0) || !std::isfinite(b.external))
      throw Error(ErrorCode::InvalidSystem, "negative or non-finite external assets: " + b.id);
  }
  for (const auto& d : debts) {
    if (!in_range(d.debtor) || !in_range(d.creditor))
      throw Error(ErrorCode::InvalidSystem, "debt index out of range");
    if (d.debtor == d.creditor)
      throw Error(ErrorCode::InvalidSystem, "self-debt at " + banks[d.debtor].id);
    if (!(d.weight > 0.0) || !std::isfinite(d.weight))
      throw Error(ErrorCode::InvalidSystem, "debt weight must be positive");
  }
  for (const auto& c : cdss) {
    if (!in_range(c.debtor) || !in_range(c.creditor) || !in_range(c.reference))
      throw Error(ErrorCode::InvalidSystem, "cds index out of range");
    if (c.debtor == c.creditor)
      throw Error(ErrorCode::InvalidSystem, "self-cds at " + banks[c.debtor].id);
    if (!(c.weight > 0.0) || !std::isfinite(c.weight))
      throw Error(ErrorCode::InvalidSystem, "cds weight must be positive");
  }
}

void FinancialSystem::check_sane_references() const {
  std::set<int> has_out_debt;
  for (const auto& d : debts) has_out_debt.insert(d.debtor);
  for (const auto& c : cdss) {
    if (!has_out_debt.count(c.reference))
      throw Error(ErrorCode::InvalidSystem,
                  "cds reference without outgoing debt: " + banks[c.reference].id);
  }
}

}  // namespace fclear
