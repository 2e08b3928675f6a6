#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rhsim/dram.hpp"
#include "rhsim/rng.hpp"

namespace rhsim {

enum class EvictionKind : std::uint8_t { Lfu, Lru, Random, Bip, Fifo };

/// Victim selection when a full tracker must make room. Fifo is only used by
/// the cold table of the two-level PRoHIT model.
struct EvictionRule {
  EvictionKind kind = EvictionKind::Lfu;
  double epsilon = 1.0 / 32.0;  // BIP insertion probability

  static EvictionRule lfu() { return {EvictionKind::Lfu}; }
  static EvictionRule lru() { return {EvictionKind::Lru}; }
  static EvictionRule random() { return {EvictionKind::Random}; }
  static EvictionRule fifo() { return {EvictionKind::Fifo}; }
  static EvictionRule bip(double epsilon = 1.0 / 32.0) { return {EvictionKind::Bip, epsilon}; }

  void validate() const;
  bool stochastic() const { return kind == EvictionKind::Random || kind == EvictionKind::Bip; }
};

std::string eviction_name(const EvictionRule& rule);
/// Accepts lfu, lru, random, fifo, bip and bip:<epsilon>.
EvictionRule parse_eviction(std::string_view text);

struct TrackerEntry {
  RowId row = 0;
  std::uint64_t count = 0;
  std::uint64_t last_touch = 0;
  std::uint64_t inserted_at = 0;
  bool valid = false;
};

struct InsertOutcome {
  bool inserted = false;
  std::optional<std::size_t> slot;
  std::optional<TrackerEntry> evicted;
};

/// Fixed-capacity fully-associative aggressor-row table.
///
/// Ties among LFU, LRU, FIFO and MFU candidates go to the lowest slot index.
/// When constructed with a non-zero `key_universe`, rows must be below it and
/// lookups use a direct reverse index instead of a scan.
class Tracker {
 public:
  explicit Tracker(std::size_t capacity, std::size_t key_universe = 0);

  std::size_t capacity() const { return rows_.size(); }
  std::size_t occupancy() const { return occupancy_; }
  bool full() const { return occupancy_ == rows_.size(); }
  bool valid(std::size_t slot) const { return rows_[slot] != kInvalidRow; }
  TrackerEntry entry(std::size_t slot) const;
  std::vector<TrackerEntry> entries() const;

  std::optional<std::size_t> lookup(RowId row) const {
    const std::int32_t s = find(row);
    return s < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(s));
  }

  /// Count +1 and last_touch = now. Throws std::out_of_range for a bad or
  /// invalid slot.
  void update_hit(std::size_t slot, std::uint64_t now) {
    if (slot >= rows_.size() || rows_[slot] == kInvalidRow)
      throw std::out_of_range("update_hit on an invalid tracker slot");
    touch(slot, now);
  }

  /// Installs `row` with count 0. Invalid slots are filled first; otherwise
  /// the rule picks a victim (BIP may bypass instead). Random draws the victim
  /// uniformly over all slots and BIP draws one Bernoulli(epsilon) trial, both
  /// from `rng`, and only when the tracker is full. Throws on duplicates.
  InsertOutcome insert(RowId row, const EvictionRule& rule, RngStream& rng, std::uint64_t now);

  /// Lookup, then update on a hit or insert on a miss. Returns true on a hit.
  bool access(RowId row, const EvictionRule& rule, RngStream& rng, std::uint64_t now) {
    const std::int32_t s = find(row);
    if (s >= 0) {
      touch(static_cast<std::size_t>(s), now);
      return true;
    }
    install(row, rule, rng, now);
    return false;
  }

  /// Hit path of access(): updates and returns true if `row` is resident.
  bool access_hit(RowId row, std::uint64_t now) {
    const std::int32_t s = find(row);
    if (s < 0) return false;
    touch(static_cast<std::size_t>(s), now);
    return true;
  }

  /// Miss path of access(): `row` must not be resident. Returns false on a
  /// BIP bypass.
  bool install(RowId row, const EvictionRule& rule, RngStream& rng, std::uint64_t now) {
    std::size_t slot;
    if (!full()) {
      slot = first_free();
    } else {
      if (rule.kind == EvictionKind::Bip && !bernoulli(rng, rule.epsilon)) return false;
      slot = victim(rule, rng);
      drop(slot);
    }
    put(slot, row, 0, now);
    return true;
  }

  /// Places an entry with an explicit count into a known-free slot.
  void place(std::size_t slot, RowId row, std::uint64_t count, std::uint64_t now);

  /// MFU entry, invalidated on return. Empty tracker yields nullopt.
  std::optional<RowId> select_mitigation();

  std::optional<std::size_t> mfu_slot() const;
  std::optional<std::size_t> lfu_slot() const {
    if (!use_lfu_cache_) return arg_best(counts_, std::less<>{});
    if (occupancy_ == 0) return std::nullopt;
    if (lfu_mask_ == 0) rebuild_lfu_cache();
    return static_cast<std::size_t>(std::countr_zero(lfu_mask_));
  }
  std::optional<std::size_t> lru_slot() const { return arg_best(last_touch_, std::less<>{}); }
  std::optional<std::size_t> fifo_slot() const { return arg_best(inserted_at_, std::less<>{}); }
  std::optional<std::size_t> free_slot() const;
  /// Smallest count among valid entries; 0 for an empty tracker.
  std::uint64_t min_count() const {
    const auto s = lfu_slot();
    return s ? counts_[*s] : 0;
  }

  TrackerEntry invalidate(std::size_t slot);

 private:
  static constexpr RowId kInvalidRow = std::numeric_limits<RowId>::max();

  void rebuild_lfu_cache() const;

  std::int32_t find(RowId row) const {
    if (!slot_of_.empty()) return row < slot_of_.size() ? slot_of_[row] : -1;
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (rows_[i] == row) return static_cast<std::int32_t>(i);
    return -1;
  }

  void touch(std::size_t slot, std::uint64_t now) {
    ++counts_[slot];
    last_touch_[slot] = now;
    if (use_lfu_cache_) lfu_mask_ &= ~(std::uint64_t{1} << slot);
  }

  std::size_t first_free() const {
    for (std::size_t i = 0;; ++i)
      if (rows_[i] == kInvalidRow) return i;
  }

  // Victim of a full tracker; BIP victims are LRU.
  std::size_t victim(const EvictionRule& rule, RngStream& rng) const {
    switch (rule.kind) {
      case EvictionKind::Lfu: return *lfu_slot();
      case EvictionKind::Random: return static_cast<std::size_t>(uniform_index(rng, rows_.size()));
      case EvictionKind::Fifo: return *fifo_slot();
      case EvictionKind::Lru:
      case EvictionKind::Bip: break;
    }
    return *lru_slot();
  }

  void put(std::size_t slot, RowId row, std::uint64_t count, std::uint64_t now) {
    rows_[slot] = row;
    counts_[slot] = count;
    last_touch_[slot] = now;
    inserted_at_[slot] = now;
    if (use_lfu_cache_) {
      const std::uint64_t bit = std::uint64_t{1} << slot;
      if (occupancy_ == 0 || count < lfu_min_ || (lfu_mask_ == 0 && count == lfu_min_)) {
        lfu_min_ = count;
        lfu_mask_ = bit;
      } else if (count == lfu_min_) {
        lfu_mask_ |= bit;
      }
    }
    ++occupancy_;
    if (!slot_of_.empty()) slot_of_[row] = static_cast<std::int32_t>(slot);
  }

  void drop(std::size_t slot) {
    if (!slot_of_.empty()) slot_of_[rows_[slot]] = -1;
    rows_[slot] = kInvalidRow;
    counts_[slot] = 0;
    last_touch_[slot] = 0;
    inserted_at_[slot] = 0;
    --occupancy_;
    if (use_lfu_cache_) lfu_mask_ &= ~(std::uint64_t{1} << slot);
  }

  template <typename Better>
  std::optional<std::size_t> arg_best(const std::vector<std::uint64_t>& key, Better better) const {
    if (occupancy_ == 0) return std::nullopt;
    const std::size_t n = rows_.size();
    if (occupancy_ == n) {
      std::size_t best = 0;
      std::uint64_t best_key = key[0];
      for (std::size_t i = 1; i < n; ++i) {
        const bool b = better(key[i], best_key);
        best = b ? i : best;
        best_key = b ? key[i] : best_key;
      }
      return best;
    }
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (rows_[i] != kInvalidRow && (best == n || better(key[i], key[best]))) best = i;
    return best;
  }

  std::vector<RowId> rows_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> last_touch_;
  std::vector<std::uint64_t> inserted_at_;
  std::vector<std::int32_t> slot_of_;
  std::size_t occupancy_ = 0;

  // LFU cache for trackers of at most 64 entries. A non-empty mask holds
  // exactly the slots whose count equals lfu_min_, the minimum. An empty mask
  // means every valid count is strictly greater than lfu_min_.
  bool use_lfu_cache_ = false;
  mutable std::uint64_t lfu_mask_ = 0;
  mutable std::uint64_t lfu_min_ = 0;
};

}  // namespace rhsim
