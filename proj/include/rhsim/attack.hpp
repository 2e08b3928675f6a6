#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rhsim/dram.hpp"

namespace rhsim {

enum class PatternKind : std::uint8_t { Uniform, NonUniform, Custom };

inline constexpr RowId kPatternBaseRow = 1000;
inline constexpr RowId kPatternRowStride = 8;

/// A cyclic activation sequence.
///   Uniform     (r1 .. rj) repeated
///   NonUniform  [(r1 .. rj)^x, (d1 .. dk)] repeated
///   Custom      an arbitrary row sequence repeated (rows may repeat)
/// `aligned` restarts the cycle at every tREFI boundary.
struct AttackPattern {
  PatternKind kind = PatternKind::Uniform;
  std::uint64_t j = 0;
  std::uint64_t x = 1;
  std::uint64_t k = 0;
  bool aligned = false;
  std::vector<RowId> target_rows;
  std::vector<RowId> decoy_rows;
  std::vector<RowId> custom_sequence;

  std::uint64_t period() const;
  /// Row at position `phase` (taken modulo the period) of one cycle.
  RowId element(std::uint64_t phase) const;
  /// Distinct rows in first-appearance order.
  std::vector<RowId> footprint_rows() const;
  std::uint64_t footprint() const { return footprint_rows().size(); }
  /// Short stable identifier, e.g. "nu_j8_x3_k20_a".
  std::string id() const;

  void validate() const;
};

/// Rows are assigned base, base + stride, ... so blast radii never overlap.
AttackPattern make_uniform(std::uint64_t j, bool aligned, RowId base = kPatternBaseRow,
                           RowId stride = kPatternRowStride);
AttackPattern make_nonuniform(std::uint64_t j, std::uint64_t x, std::uint64_t k, bool aligned,
                              RowId base = kPatternBaseRow, RowId stride = kPatternRowStride);
AttackPattern make_custom(std::vector<RowId> sequence, bool aligned);

/// Plain-text trace: one decimal row id per line; blank lines and lines
/// starting with '#' are ignored.
AttackPattern load_trace(const std::string& path, bool aligned);

/// Parses "uniform:j=20", "nonuniform:j=8,x=3,k=20" or "trace:<path>".
AttackPattern parse_pattern(std::string_view text, bool aligned);

/// 250 uniform and non-uniform patterns, unaligned first, then the same 250
/// aligned: 500 in total.
std::vector<AttackPattern> standard_suite();

/// Row activated at `global_act_index`. Aligned patterns index by the position
/// within the current tREFI, unaligned ones by the global index.
RowId next_activation(const AttackPattern& pattern, std::uint64_t global_act_index,
                      std::uint64_t trefi_position);

/// The activation sequence of one pattern as a periodic stream of dense row
/// ids (0 .. footprint-1). An aligned pattern has period acts_per_trefi.
class ActivationStream {
 public:
  ActivationStream(const AttackPattern& pattern, std::uint64_t acts_per_trefi);

  std::uint64_t period() const { return seq_.size(); }
  std::uint32_t at(std::uint64_t t) const { return seq_[t % seq_.size()]; }
  const std::vector<std::uint32_t>& cycle() const { return seq_; }

  std::size_t footprint() const { return rows_.size(); }
  RowId row_of(std::uint32_t id) const { return rows_[id]; }
  const std::vector<RowId>& rows() const { return rows_; }

  /// Activations of `id` with index in [begin, end).
  std::uint64_t occurrences(std::uint32_t id, std::uint64_t begin, std::uint64_t end) const {
    return prefix(id, end) - prefix(id, begin);
  }

 private:
  std::uint64_t prefix(std::uint32_t id, std::uint64_t t) const;

  std::vector<std::uint32_t> seq_;
  std::vector<RowId> rows_;
  std::vector<std::vector<std::uint32_t>> positions_;
};

}  // namespace rhsim
