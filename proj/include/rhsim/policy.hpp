#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "rhsim/rng.hpp"
#include "rhsim/tracker.hpp"

namespace rhsim {

enum class Scheme : std::uint8_t { Baseline, Proteas, Pmss, Dsac, Prohit, Para, Graphene };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view text);

/// A complete mitigation scheme. Only the fields relevant to `scheme` are
/// read; the rest keep their defaults.
struct PolicySpec {
  Scheme scheme = Scheme::Baseline;
  EvictionRule eviction = EvictionRule::lfu();
  double sampling_p = 0.01;     // PROTEAS: request-stream sampling; PMSS: when-full miss sampling
  double p_floor = 0.05;        // DSAC model
  std::uint64_t hot_capacity = 4;    // PRoHIT model
  std::uint64_t cold_capacity = 12;  // PRoHIT model
  double promote_p = 0.1;            // PRoHIT model
  double mitigate_p = 0.006;         // PARA
  std::uint64_t trh = 500;           // Graphene
  std::uint64_t graphene_entries = 0;  // 0 = size from graphene_capacity()

  static PolicySpec baseline(EvictionRule e = EvictionRule::lfu());
  static PolicySpec proteas(double p, EvictionRule e = EvictionRule::random());
  static PolicySpec pmss(double p, EvictionRule e = EvictionRule::lfu());
  static PolicySpec dsac(double p_floor = 0.05);
  static PolicySpec prohit(std::uint64_t hot = 4, std::uint64_t cold = 12, double promote_p = 0.1);
  static PolicySpec para(double p);
  static PolicySpec graphene(std::uint64_t trh, std::uint64_t entries = 0);

  void validate() const;
  /// False when the outcome cannot depend on the seed.
  bool uses_randomness() const;
  bool uses_tracker() const { return scheme != Scheme::Para; }
};

/// DSAC-style insertion probability on a full-tracker miss:
/// max(p_floor, 1 / (1 + min_count)).
double dsac_evict_prob(std::uint64_t min_count, double p_floor);

struct PolicyStreams {
  RngStream sampling;
  RngStream eviction;
  RngStream para;
  RngStream promotion;

  static PolicyStreams derive(std::uint64_t master_seed, std::uint64_t pattern_index,
                              std::uint64_t seed_index);
};

/// Mutable per-run state of one scheme.
///
/// Random draws, per activation:
///   PROTEAS   one Bernoulli-process trial (sampling); a sampled miss into a
///             full tracker draws its victim from `eviction`.
///   PMSS      a miss into a full tracker is one trial of a Bernoulli process
///             (sampling_p) on `sampling`, then the eviction rule's draws.
///   DSAC      a miss into a full tracker draws bernoulli(dsac_evict_prob) from
///             `sampling`.
///   PRoHIT    a cold-table hit draws bernoulli(promote_p) from `promotion`.
///   PARA      one Bernoulli-process trial from `para`.
/// Baseline draws only for a stochastic eviction rule; Graphene never draws.
class PolicyState {
 public:
  PolicyState(const PolicySpec& spec, std::size_t tracker_capacity, PolicyStreams streams,
              std::size_t key_universe = 0, std::uint64_t graphene_default_entries = 0);

  /// Processes one activation; returns a row that must be mitigated at once
  /// (PARA, Graphene).
  std::optional<RowId> on_activation(RowId row, std::uint64_t now);

  /// on_activation() for a scheme known at compile time; `S` must equal
  /// spec().scheme.
  template <Scheme S>
  std::optional<RowId> on_activation_as(RowId row, std::uint64_t now) {
    if constexpr (S == Scheme::Baseline) {
      tracker_->access(row, spec_.eviction, streams_.eviction, now);
      return std::nullopt;
    } else if constexpr (S == Scheme::Proteas) {
      if (sampler_->step()) {
        ++sampled_;
        tracker_->access(row, spec_.eviction, streams_.eviction, now);
      }
      return std::nullopt;
    } else if constexpr (S == Scheme::Para) {
      if (!sampler_->step()) return std::nullopt;
      ++sampled_;
      return row;
    } else if constexpr (S == Scheme::Pmss || S == Scheme::Dsac) {
      Tracker& t = *tracker_;
      if (const auto slot = t.lookup(row)) {
        t.update_hit(*slot, now);
        return std::nullopt;
      }
      if (t.full()) {
        if constexpr (S == Scheme::Pmss) {
          if (!miss_sampler_->step()) return std::nullopt;
        } else {
          if (!bernoulli(streams_.sampling, dsac_evict_prob(t.min_count(), spec_.p_floor)))
            return std::nullopt;
        }
      }
      t.install(row, spec_.eviction, streams_.eviction, now);
      return std::nullopt;
    } else if constexpr (S == Scheme::Prohit) {
      return on_prohit(row, now);
    } else {
      return on_graphene(row);
    }
  }

  /// Mitigation at a REF/RFM instant: MFU of the tracker (hot table first for
  /// PRoHIT). PARA and Graphene return nothing.
  std::optional<RowId> on_scheduled_mitigation();

  /// PROTEAS and PARA ignore every activation their Bernoulli process does not
  /// select, so a driver may use `take_sampling_gap()` to skip straight to the
  /// next selected activation and hand it to `on_sampled_activation()`.
  /// Both ways consume the stream identically.
  bool sparse() const { return sampler_.has_value(); }
  /// Sparse and selective enough that skipping pays off.
  bool prefers_sparse() const { return sparse() && sampler_->probability() < kSparseBelow; }
  static constexpr double kSparseBelow = 0.5;
  std::uint64_t take_sampling_gap() { return sampler_->take_gap(); }
  std::optional<RowId> on_sampled_activation(RowId row, std::uint64_t now);

  std::size_t occupancy() const;
  const PolicySpec& spec() const { return spec_; }
  const Tracker* tracker() const { return tracker_ ? &*tracker_ : nullptr; }
  const Tracker* cold_table() const { return cold_ ? &*cold_ : nullptr; }
  std::uint64_t sampled_activations() const { return sampled_; }
  /// Graphene's current estimate for `row`; 0 when it holds no counter.
  std::uint64_t graphene_count(RowId row) const {
    const auto it = mg_counts_.find(row);
    return it == mg_counts_.end() ? 0 : it->second;
  }
  std::uint64_t graphene_threshold() const { return mg_threshold_; }

 private:
  std::optional<RowId> on_prohit(RowId row, std::uint64_t now);
  std::optional<RowId> on_graphene(RowId row);
  void track_all(RowId row, std::uint64_t now);

  PolicySpec spec_;
  PolicyStreams streams_;
  std::optional<Tracker> tracker_;  // the only table, or PRoHIT's hot table
  std::optional<Tracker> cold_;
  std::optional<BernoulliProcess> sampler_;
  std::optional<BernoulliProcess> miss_sampler_;  // PMSS
  std::unordered_map<RowId, std::uint64_t> mg_counts_;
  std::uint64_t mg_capacity_ = 0;
  std::uint64_t mg_threshold_ = 0;
  std::uint64_t sampled_ = 0;
};

}  // namespace rhsim
