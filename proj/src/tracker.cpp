#include "rhsim/tracker.hpp"

#include <stdexcept>

#include "rhsim/config.hpp"
#include "rhsim/error.hpp"

namespace rhsim {

void EvictionRule::validate() const {
  if (kind == EvictionKind::Bip && !(epsilon > 0.0 && epsilon <= 1.0))
    throw ConfigError("bip_epsilon", "must lie in (0, 1]");
}

std::string eviction_name(const EvictionRule& rule) {
  switch (rule.kind) {
    case EvictionKind::Lfu: return "lfu";
    case EvictionKind::Lru: return "lru";
    case EvictionKind::Random: return "random";
    case EvictionKind::Fifo: return "fifo";
    case EvictionKind::Bip: return "bip";
  }
  return "unknown";
}

EvictionRule parse_eviction(std::string_view text) {
  if (text == "lfu") return EvictionRule::lfu();
  if (text == "lru") return EvictionRule::lru();
  if (text == "random" || text == "rand") return EvictionRule::random();
  if (text == "fifo") return EvictionRule::fifo();
  if (text == "bip") return EvictionRule::bip();
  if (text.starts_with("bip:")) {
    EvictionRule r = EvictionRule::bip(parse_real(text.substr(4), "bip_epsilon"));
    r.validate();
    return r;
  }
  throw ConfigError("eviction", "unknown rule '" + std::string(text) +
                                    "' (expected lfu, lru, random, bip, bip:<eps>, fifo)");
}

Tracker::Tracker(std::size_t capacity, std::size_t key_universe)
    : rows_(capacity, kInvalidRow),
      counts_(capacity, 0),
      last_touch_(capacity, 0),
      inserted_at_(capacity, 0) {
  if (capacity == 0) throw ConfigError("tracker_capacity", "must be at least 1");
  if (key_universe > 0) slot_of_.assign(key_universe, -1);
  use_lfu_cache_ = capacity <= 64;
}

TrackerEntry Tracker::entry(std::size_t slot) const {
  if (slot >= rows_.size()) throw std::out_of_range("tracker slot out of range");
  if (!valid(slot)) return TrackerEntry{};
  return TrackerEntry{rows_[slot], counts_[slot], last_touch_[slot], inserted_at_[slot], true};
}

std::vector<TrackerEntry> Tracker::entries() const {
  std::vector<TrackerEntry> out(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) out[i] = entry(i);
  return out;
}

void Tracker::place(std::size_t slot, RowId row, std::uint64_t count, std::uint64_t now) {
  if (slot >= rows_.size()) throw std::out_of_range("tracker slot out of range");
  if (valid(slot)) throw std::logic_error("place into an occupied tracker slot");
  if (row == kInvalidRow) throw std::invalid_argument("row id reserved for invalid entries");
  if (!slot_of_.empty() && row >= slot_of_.size())
    throw std::out_of_range("row outside the tracker key universe");
  if (find(row) >= 0) throw std::logic_error("place of a row already resident in the tracker");
  put(slot, row, count, now);
}

TrackerEntry Tracker::invalidate(std::size_t slot) {
  TrackerEntry old = entry(slot);
  if (old.valid) drop(slot);
  return old;
}

InsertOutcome Tracker::insert(RowId row, const EvictionRule& rule, RngStream& rng,
                              std::uint64_t now) {
  if (find(row) >= 0) throw std::logic_error("insert of a row already resident in the tracker");
  if (row == kInvalidRow) throw std::invalid_argument("row id reserved for invalid entries");
  if (!slot_of_.empty() && row >= slot_of_.size())
    throw std::out_of_range("row outside the tracker key universe");
  InsertOutcome out;
  std::size_t slot;
  if (!full()) {
    slot = first_free();
  } else {
    if (rule.kind == EvictionKind::Bip && !bernoulli(rng, rule.epsilon)) return out;
    slot = victim(rule, rng);
    out.evicted = invalidate(slot);
  }
  put(slot, row, 0, now);
  out.inserted = true;
  out.slot = slot;
  return out;
}

std::optional<RowId> Tracker::select_mitigation() {
  const auto s = mfu_slot();
  if (!s) return std::nullopt;
  return invalidate(*s).row;
}

std::optional<std::size_t> Tracker::free_slot() const {
  if (full()) return std::nullopt;
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (!valid(i)) return i;
  return std::nullopt;
}

std::optional<std::size_t> Tracker::mfu_slot() const {
  return arg_best(counts_, std::greater<>{});
}

void Tracker::rebuild_lfu_cache() const {
  lfu_mask_ = 0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!valid(i)) continue;
    const std::uint64_t bit = std::uint64_t{1} << i;
    if (lfu_mask_ == 0 || counts_[i] < lfu_min_) {
      lfu_min_ = counts_[i];
      lfu_mask_ = bit;
    } else if (counts_[i] == lfu_min_) {
      lfu_mask_ |= bit;
    }
  }
}

}  // namespace rhsim
