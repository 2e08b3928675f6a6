#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rhsim/attack.hpp"
#include "rhsim/dram.hpp"
#include "rhsim/policy.hpp"

namespace rhsim {

/// How avg_disturbance is formed.
///   RowMax      mean over footprint rows of each row's largest counter value
///   ResetEvent  mean counter value over all reset events plus non-zero
///               end-of-window residuals
enum class AvgMode : std::uint8_t { RowMax, ResetEvent };

struct SimConfig {
  DramTimings timings;
  std::uint64_t mitigations_per_trefi = 1;
  std::uint64_t blast_radius = 2;
  std::uint64_t num_rows = kDefaultNumRows;
  PolicySpec policy;
  AttackPattern pattern;
  std::uint64_t tracker_capacity = 16;
  std::uint64_t master_seed = 1;
  std::uint64_t pattern_index = 0;
  std::uint64_t seed_index = 0;
  AvgMode avg_mode = AvgMode::RowMax;

  MitigationSchedule schedule() const;
  void validate() const;
};

struct SimResult {
  std::uint64_t max_disturbance = 0;
  double avg_disturbance = 0.0;
  std::uint64_t mitigations_issued = 0;
  std::uint64_t scheduled_slots = 0;
  std::uint64_t empty_mitigation_slots = 0;
  double mean_tracker_occupancy = 0.0;
  double extra_activation_fraction = 0.0;
  std::uint64_t total_activations = 0;
  std::uint64_t victim_refreshes = 0;
  std::uint64_t ledger_total = 0;  // sum of all counter values ever recorded

  bool operator==(const SimResult&) const = default;
};

/// Per-row activation counters since each row's last mitigation.
///
/// Counters are materialised lazily from the periodic activation stream: a
/// row's value at time t is the number of its activations since its last
/// reset, which equals incrementing it by one on every activation.
class DisturbanceLedger {
 public:
  explicit DisturbanceLedger(const ActivationStream& stream);

  /// Counter of `id` covering activations [last reset, end).
  std::uint64_t count(std::uint32_t id, std::uint64_t end) const {
    return stream_->occurrences(id, last_reset_[id], end);
  }

  /// The row's victims were refreshed after activation end - 1.
  std::uint64_t reset(std::uint32_t id, std::uint64_t end);

  /// Closes the window; residual counters count toward the maxima.
  void finalize(std::uint64_t end);

  std::uint64_t max_disturbance() const { return global_max_; }
  std::uint64_t row_max(std::uint32_t id) const { return row_max_[id]; }
  std::size_t rows() const { return row_max_.size(); }
  std::uint64_t recorded_total() const { return recorded_; }
  std::uint64_t episodes() const { return episodes_; }
  std::uint64_t episode_sum() const { return episode_sum_; }

 private:
  void record(std::uint32_t id, std::uint64_t value);

  const ActivationStream* stream_;
  std::vector<std::uint64_t> last_reset_;
  std::vector<std::uint64_t> row_max_;
  std::uint64_t global_max_ = 0;
  std::uint64_t recorded_ = 0;
  std::uint64_t episodes_ = 0;
  std::uint64_t episode_sum_ = 0;
};

/// Victims refreshed by one mitigation of `row` (size of victim_set).
std::uint64_t victim_count(RowId row, std::uint64_t blast_radius, std::uint64_t num_rows);

/// One tREFW window of `config.pattern` against `config.policy`.
SimResult simulate(const SimConfig& config);

struct SweepStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double ci95 = 0.0;    // 1.96 * s / sqrt(n); 0 when n == 1
  std::size_t n = 0;
};

SweepStats aggregate(std::span<const double> values);

struct ResultStats {
  SweepStats max_disturbance;
  SweepStats avg_disturbance;
  SweepStats mitigations_issued;
  SweepStats empty_mitigation_slots;
  SweepStats mean_tracker_occupancy;
  SweepStats extra_activation_fraction;
};

/// Per-field statistics over seeds. Throws on an empty list.
ResultStats aggregate(std::span<const SimResult> results);

}  // namespace rhsim
