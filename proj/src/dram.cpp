#include "rhsim/dram.hpp"

#include <algorithm>

#include "rhsim/error.hpp"

namespace rhsim {

void DramTimings::validate() const {
  if (trefw_ns == 0) throw ConfigError("trefw_ns", "must be positive");
  if (trefi_ns == 0) throw ConfigError("trefi_ns", "must be positive");
  if (trc_ns == 0) throw ConfigError("trc_ns", "must be positive");
  if (refs_per_trefw == 0) throw ConfigError("refs_per_trefw", "must be positive");
  if (trfc_ns >= trefi_ns) throw ConfigError("trfc_ns", "must be smaller than trefi_ns");
  if (trc_ns > trefi_ns - trfc_ns)
    throw ConfigError("trc_ns", "must fit at least one activation into trefi_ns - trfc_ns");
  // refs_per_trefw * trefi_ns <= 1.01 * trefw_ns
  if (refs_per_trefw * trefi_ns * 100 > trefw_ns * 101)
    throw ConfigError("refs_per_trefw", "refs_per_trefw * trefi_ns exceeds trefw_ns by more than 1%");
}

DerivedBudgets derive_budgets(const DramTimings& timings) {
  timings.validate();
  DerivedBudgets b;
  b.acts_per_trefi = (timings.trefi_ns - timings.trfc_ns) / timings.trc_ns;
  b.acts_per_trefw = b.acts_per_trefi * timings.refs_per_trefw;
  b.trefi_windows = timings.refs_per_trefw;
  return b;
}

std::uint64_t rfm_threshold(const DerivedBudgets& budgets, std::uint64_t k) {
  if (k == 0) throw ConfigError("mitigations_per_trefi", "must be at least 1");
  return std::max<std::uint64_t>(1, budgets.acts_per_trefi / k);
}

MitigationSchedule make_schedule(const DerivedBudgets& budgets, std::uint64_t k,
                                 std::uint64_t blast_radius) {
  if (blast_radius != 1 && blast_radius != 2 && blast_radius != 4)
    throw ConfigError("blast_radius", "must be 1, 2 or 4");
  return MitigationSchedule{k, rfm_threshold(budgets, k), blast_radius};
}

std::vector<RowId> victim_set(RowId row, std::uint64_t blast_radius, std::uint64_t num_rows) {
  std::vector<RowId> out;
  out.reserve(2 * blast_radius);
  const std::uint64_t r = row;
  const std::uint64_t lo = r >= blast_radius ? r - blast_radius : 0;
  const std::uint64_t hi = std::min(r + blast_radius, num_rows == 0 ? 0 : num_rows - 1);
  for (std::uint64_t v = lo; v <= hi && v < num_rows; ++v)
    if (v != r) out.push_back(static_cast<RowId>(v));
  return out;
}

std::uint64_t graphene_capacity(const DerivedBudgets& budgets, std::uint64_t trh) {
  if (trh < 2) throw ConfigError("trh", "must be at least 2");
  // acts / (trh / 2) == 2 * acts / trh, kept in integers.
  const std::uint64_t num = 2 * budgets.acts_per_trefw;
  return (num + trh - 1) / trh;
}

std::uint64_t storage_bytes(std::uint64_t entries_per_bank, std::uint64_t bits_per_entry,
                            std::uint64_t banks) {
  const std::uint64_t bits = entries_per_bank * bits_per_entry * banks;
  return (bits + 7) / 8;
}

}  // namespace rhsim
