#pragma once

#include <cstdint>
#include <vector>

namespace rhsim {

using RowId = std::uint32_t;

inline constexpr std::uint64_t kDefaultNumRows = 131072;

/// DDR4 timing constants. The defaults give 165 activations per tREFI.
struct DramTimings {
  std::uint64_t trefw_ns = 64'000'000;
  std::uint64_t trefi_ns = 7'800;
  std::uint64_t trfc_ns = 350;
  std::uint64_t trc_ns = 45;
  std::uint64_t refs_per_trefw = 8192;

  /// Throws ConfigError naming the first violated field.
  void validate() const;
};

struct DerivedBudgets {
  std::uint64_t acts_per_trefi = 0;
  std::uint64_t acts_per_trefw = 0;
  std::uint64_t trefi_windows = 0;
};

/// When and how widely mitigations are issued. A single RAA counter models
/// both the REF slot (k = 1) and additional RFM commands (k > 1).
struct MitigationSchedule {
  std::uint64_t mitigations_per_trefi = 1;
  std::uint64_t rfm_threshold = 0;
  std::uint64_t blast_radius = 2;
};

DerivedBudgets derive_budgets(const DramTimings& timings);

/// floor(acts_per_trefi / k), clamped to at least one activation.
std::uint64_t rfm_threshold(const DerivedBudgets& budgets, std::uint64_t k);

MitigationSchedule make_schedule(const DerivedBudgets& budgets, std::uint64_t k,
                                 std::uint64_t blast_radius = 2);

/// Neighbours of `row` within `blast_radius`, clipped to the bank. Sorted
/// ascending; never contains `row`.
std::vector<RowId> victim_set(RowId row, std::uint64_t blast_radius,
                              std::uint64_t num_rows = kDefaultNumRows);

/// Misra-Gries counters per bank needed so that no row can reach trh/2
/// activations untracked: ceil(acts_per_trefw / (trh / 2)).
std::uint64_t graphene_capacity(const DerivedBudgets& budgets, std::uint64_t trh);

/// Tracker storage in bytes, rounded up to a whole byte.
std::uint64_t storage_bytes(std::uint64_t entries_per_bank, std::uint64_t bits_per_entry,
                            std::uint64_t banks);

}  // namespace rhsim
