#include "rhsim/policy.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "rhsim/error.hpp"

namespace rhsim {
namespace {

void require_probability(double p, const char* key) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(key, "must lie in [0, 1]");
}

bool strictly_random(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Baseline: return "baseline";
    case Scheme::Proteas: return "proteas";
    case Scheme::Pmss: return "pmss";
    case Scheme::Dsac: return "dsac";
    case Scheme::Prohit: return "prohit";
    case Scheme::Para: return "para";
    case Scheme::Graphene: return "graphene";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "baseline") return Scheme::Baseline;
  if (text == "proteas" || text == "prss") return Scheme::Proteas;
  if (text == "pmss") return Scheme::Pmss;
  if (text == "dsac") return Scheme::Dsac;
  if (text == "prohit") return Scheme::Prohit;
  if (text == "para") return Scheme::Para;
  if (text == "graphene") return Scheme::Graphene;
  throw ConfigError("policy", "unknown policy '" + std::string(text) +
                                  "' (expected baseline, proteas, pmss, dsac, prohit, para, graphene)");
}

PolicySpec PolicySpec::baseline(EvictionRule e) {
  PolicySpec s;
  s.scheme = Scheme::Baseline;
  s.eviction = e;
  return s;
}

PolicySpec PolicySpec::proteas(double p, EvictionRule e) {
  PolicySpec s;
  s.scheme = Scheme::Proteas;
  s.sampling_p = p;
  s.eviction = e;
  return s;
}

PolicySpec PolicySpec::pmss(double p, EvictionRule e) {
  PolicySpec s;
  s.scheme = Scheme::Pmss;
  s.sampling_p = p;
  s.eviction = e;
  return s;
}

PolicySpec PolicySpec::dsac(double p_floor) {
  PolicySpec s;
  s.scheme = Scheme::Dsac;
  s.p_floor = p_floor;
  s.eviction = EvictionRule::lfu();
  return s;
}

PolicySpec PolicySpec::prohit(std::uint64_t hot, std::uint64_t cold, double promote_p) {
  PolicySpec s;
  s.scheme = Scheme::Prohit;
  s.hot_capacity = hot;
  s.cold_capacity = cold;
  s.promote_p = promote_p;
  return s;
}

PolicySpec PolicySpec::para(double p) {
  PolicySpec s;
  s.scheme = Scheme::Para;
  s.mitigate_p = p;
  return s;
}

PolicySpec PolicySpec::graphene(std::uint64_t trh, std::uint64_t entries) {
  PolicySpec s;
  s.scheme = Scheme::Graphene;
  s.trh = trh;
  s.graphene_entries = entries;
  return s;
}

void PolicySpec::validate() const {
  eviction.validate();
  switch (scheme) {
    case Scheme::Baseline: break;
    case Scheme::Proteas:
    case Scheme::Pmss: require_probability(sampling_p, "sampling_p"); break;
    case Scheme::Dsac: require_probability(p_floor, "p_floor"); break;
    case Scheme::Prohit:
      if (hot_capacity == 0) throw ConfigError("hot_capacity", "must be at least 1");
      if (cold_capacity == 0) throw ConfigError("cold_capacity", "must be at least 1");
      require_probability(promote_p, "promote_p");
      break;
    case Scheme::Para: require_probability(mitigate_p, "mitigate_p"); break;
    case Scheme::Graphene:
      if (trh < 2) throw ConfigError("trh", "must be at least 2");
      break;
  }
}

bool PolicySpec::uses_randomness() const {
  switch (scheme) {
    case Scheme::Baseline: return eviction.stochastic();
    case Scheme::Proteas:
      return strictly_random(sampling_p) || (sampling_p > 0.0 && eviction.stochastic());
    case Scheme::Pmss: return strictly_random(sampling_p) || eviction.stochastic();
    case Scheme::Dsac: return true;
    case Scheme::Prohit: return strictly_random(promote_p);
    case Scheme::Para: return strictly_random(mitigate_p);
    case Scheme::Graphene: return false;
  }
  return true;
}

double dsac_evict_prob(std::uint64_t min_count, double p_floor) {
  return std::max(p_floor, 1.0 / (1.0 + static_cast<double>(min_count)));
}

PolicyStreams PolicyStreams::derive(std::uint64_t master_seed, std::uint64_t pattern_index,
                                    std::uint64_t seed_index) {
  return PolicyStreams{
      RngStream::derive(master_seed, Purpose::Sampling, pattern_index, seed_index),
      RngStream::derive(master_seed, Purpose::Eviction, pattern_index, seed_index),
      RngStream::derive(master_seed, Purpose::Para, pattern_index, seed_index),
      RngStream::derive(master_seed, Purpose::Promotion, pattern_index, seed_index),
  };
}

PolicyState::PolicyState(const PolicySpec& spec, std::size_t tracker_capacity,
                         PolicyStreams streams, std::size_t key_universe,
                         std::uint64_t graphene_default_entries)
    : spec_(spec), streams_(streams) {
  spec_.validate();
  switch (spec_.scheme) {
    case Scheme::Baseline:
    case Scheme::Dsac:
      tracker_.emplace(tracker_capacity, key_universe);
      break;
    case Scheme::Pmss:
      tracker_.emplace(tracker_capacity, key_universe);
      miss_sampler_.emplace(streams_.sampling, spec_.sampling_p);
      break;
    case Scheme::Proteas:
      tracker_.emplace(tracker_capacity, key_universe);
      sampler_.emplace(streams_.sampling, spec_.sampling_p);
      break;
    case Scheme::Prohit:
      tracker_.emplace(spec_.hot_capacity, key_universe);
      cold_.emplace(spec_.cold_capacity, key_universe);
      break;
    case Scheme::Para:
      sampler_.emplace(streams_.para, spec_.mitigate_p);
      break;
    case Scheme::Graphene:
      mg_capacity_ = spec_.graphene_entries ? spec_.graphene_entries : graphene_default_entries;
      if (mg_capacity_ == 0) throw ConfigError("graphene_entries", "must be at least 1");
      mg_threshold_ = std::max<std::uint64_t>(1, spec_.trh / 2);
      break;
  }
}

void PolicyState::track_all(RowId row, std::uint64_t now) {
  tracker_->access(row, spec_.eviction, streams_.eviction, now);
}

std::optional<RowId> PolicyState::on_sampled_activation(RowId row, std::uint64_t now) {
  ++sampled_;
  if (spec_.scheme == Scheme::Para) return row;
  track_all(row, now);
  return std::nullopt;
}

std::optional<RowId> PolicyState::on_activation(RowId row, std::uint64_t now) {
  switch (spec_.scheme) {
    case Scheme::Baseline: return on_activation_as<Scheme::Baseline>(row, now);
    case Scheme::Proteas: return on_activation_as<Scheme::Proteas>(row, now);
    case Scheme::Pmss: return on_activation_as<Scheme::Pmss>(row, now);
    case Scheme::Dsac: return on_activation_as<Scheme::Dsac>(row, now);
    case Scheme::Prohit: return on_activation_as<Scheme::Prohit>(row, now);
    case Scheme::Para: return on_activation_as<Scheme::Para>(row, now);
    case Scheme::Graphene: return on_activation_as<Scheme::Graphene>(row, now);
  }
  return std::nullopt;
}

std::optional<RowId> PolicyState::on_prohit(RowId row, std::uint64_t now) {
  Tracker& hot = *tracker_;
  Tracker& cold = *cold_;
  if (hot.access_hit(row, now)) return std::nullopt;
  if (const auto slot = cold.lookup(row)) {
    cold.update_hit(*slot, now);
    if (!bernoulli(streams_.promotion, spec_.promote_p)) return std::nullopt;
    const TrackerEntry promoted = cold.invalidate(*slot);
    if (hot.full()) {
      const TrackerEntry demoted = hot.invalidate(*hot.lfu_slot());
      cold.place(*slot, demoted.row, demoted.count, now);
    }
    hot.place(*hot.free_slot(), promoted.row, promoted.count, now);
    return std::nullopt;
  }
  cold.install(row, EvictionRule::fifo(), streams_.eviction, now);
  return std::nullopt;
}

std::optional<RowId> PolicyState::on_graphene(RowId row) {
  if (auto it = mg_counts_.find(row); it != mg_counts_.end()) {
    if (++it->second >= mg_threshold_) {
      mg_counts_.erase(it);
      return row;
    }
    return std::nullopt;
  }
  if (mg_counts_.size() < mg_capacity_) {
    if (mg_threshold_ <= 1) return row;
    mg_counts_.emplace(row, 1);
    return std::nullopt;
  }
  for (auto it = mg_counts_.begin(); it != mg_counts_.end();) {
    if (--it->second == 0)
      it = mg_counts_.erase(it);
    else
      ++it;
  }
  return std::nullopt;
}

std::optional<RowId> PolicyState::on_scheduled_mitigation() {
  switch (spec_.scheme) {
    case Scheme::Para:
    case Scheme::Graphene: return std::nullopt;
    case Scheme::Prohit:
      if (auto r = tracker_->select_mitigation()) return r;
      return cold_->select_mitigation();
    default: return tracker_->select_mitigation();
  }
}

std::size_t PolicyState::occupancy() const {
  switch (spec_.scheme) {
    case Scheme::Para: return 0;
    case Scheme::Graphene: return mg_counts_.size();
    case Scheme::Prohit: return tracker_->occupancy() + cold_->occupancy();
    default: return tracker_->occupancy();
  }
}

}  // namespace rhsim
