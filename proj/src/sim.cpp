#include "rhsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rhsim/error.hpp"

namespace rhsim {

MitigationSchedule SimConfig::schedule() const {
  return make_schedule(derive_budgets(timings), mitigations_per_trefi, blast_radius);
}

void SimConfig::validate() const {
  timings.validate();
  const MitigationSchedule s = schedule();
  if (s.rfm_threshold < 1) throw ConfigError("mitigations_per_trefi", "RFM threshold below 1");
  if (tracker_capacity == 0) throw ConfigError("tracker_capacity", "must be at least 1");
  policy.validate();
  pattern.validate();
  for (RowId r : pattern.footprint_rows())
    if (r >= num_rows) throw ConfigError("num_rows", "pattern row " + std::to_string(r) + " outside the bank");
}

DisturbanceLedger::DisturbanceLedger(const ActivationStream& stream)
    : stream_(&stream), last_reset_(stream.footprint(), 0), row_max_(stream.footprint(), 0) {}

void DisturbanceLedger::record(std::uint32_t id, std::uint64_t value) {
  row_max_[id] = std::max(row_max_[id], value);
  global_max_ = std::max(global_max_, value);
  recorded_ += value;
}

std::uint64_t DisturbanceLedger::reset(std::uint32_t id, std::uint64_t end) {
  const std::uint64_t value = count(id, end);
  record(id, value);
  ++episodes_;
  episode_sum_ += value;
  last_reset_[id] = end;
  return value;
}

void DisturbanceLedger::finalize(std::uint64_t end) {
  for (std::uint32_t id = 0; id < last_reset_.size(); ++id) {
    const std::uint64_t value = count(id, end);
    record(id, value);
    if (value > 0) {
      ++episodes_;
      episode_sum_ += value;
    }
    last_reset_[id] = end;
  }
}

std::uint64_t victim_count(RowId row, std::uint64_t blast_radius, std::uint64_t num_rows) {
  if (row >= num_rows) return 0;
  const std::uint64_t below = std::min<std::uint64_t>(blast_radius, row);
  const std::uint64_t above = std::min<std::uint64_t>(blast_radius, num_rows - 1 - row);
  return below + above;
}

namespace {

struct Run {
  const SimConfig& cfg;
  const ActivationStream& stream;
  DisturbanceLedger ledger;
  PolicyState policy;
  SimResult result;
  std::uint64_t occupancy_sum = 0;

  void mitigate(std::uint32_t id, std::uint64_t end) {
    ledger.reset(id, end);
    ++result.mitigations_issued;
    result.victim_refreshes += victim_count(stream.row_of(id), cfg.blast_radius, cfg.num_rows);
  }

  // Fires after activation `t` has been processed.
  void scheduled(std::uint64_t t) {
    ++result.scheduled_slots;
    occupancy_sum += policy.occupancy();
    if (const auto id = policy.on_scheduled_mitigation())
      mitigate(*id, t + 1);
    else
      ++result.empty_mitigation_slots;
  }
};

template <Scheme S>
void run_dense(Run& run, std::uint64_t total, std::uint64_t threshold) {
  const auto& cycle = run.stream.cycle();
  const std::uint64_t period = cycle.size();
  std::uint64_t phase = 0;
  std::uint64_t raa = 0;
  for (std::uint64_t t = 0; t < total; ++t) {
    const std::uint32_t id = cycle[phase];
    if (++phase == period) phase = 0;
    if (const auto m = run.policy.on_activation_as<S>(id, t)) run.mitigate(*m, t + 1);
    if (++raa == threshold) {
      raa = 0;
      run.scheduled(t);
    }
  }
}

}  // namespace

SimResult simulate(const SimConfig& config) {
  config.validate();
  const DerivedBudgets budgets = derive_budgets(config.timings);
  const MitigationSchedule sched = config.schedule();
  const ActivationStream stream(config.pattern, budgets.acts_per_trefi);
  const std::uint64_t graphene_entries =
      config.policy.scheme == Scheme::Graphene ? graphene_capacity(budgets, config.policy.trh) : 0;

  Run run{config,
          stream,
          DisturbanceLedger(stream),
          PolicyState(config.policy, config.tracker_capacity,
                      PolicyStreams::derive(config.master_seed, config.pattern_index,
                                            config.seed_index),
                      stream.footprint(), graphene_entries),
          SimResult{}};

  const std::uint64_t total = budgets.acts_per_trefw;
  const std::uint64_t threshold = sched.rfm_threshold;

  if (run.policy.prefers_sparse()) {
    // Only sampled activations touch policy state; the ledger is lazy, so
    // jump between sampled activations and mitigation instants.
    std::uint64_t next_mitigation = threshold - 1;
    auto advance = [&](std::uint64_t from) {
      const std::uint64_t gap = run.policy.take_sampling_gap();
      return gap >= total ? total : std::min(total, from + gap);
    };
    std::uint64_t s = advance(0);
    while (true) {
      while (next_mitigation < s && next_mitigation < total) {
        run.scheduled(next_mitigation);
        next_mitigation += threshold;
      }
      if (s >= total) break;
      if (const auto id = run.policy.on_sampled_activation(stream.at(s), s)) run.mitigate(*id, s + 1);
      s = advance(s + 1);
    }
  } else {
    switch (config.policy.scheme) {
      case Scheme::Baseline: run_dense<Scheme::Baseline>(run, total, threshold); break;
      case Scheme::Pmss: run_dense<Scheme::Pmss>(run, total, threshold); break;
      case Scheme::Dsac: run_dense<Scheme::Dsac>(run, total, threshold); break;
      case Scheme::Prohit: run_dense<Scheme::Prohit>(run, total, threshold); break;
      case Scheme::Graphene: run_dense<Scheme::Graphene>(run, total, threshold); break;
      case Scheme::Proteas: run_dense<Scheme::Proteas>(run, total, threshold); break;
      case Scheme::Para: run_dense<Scheme::Para>(run, total, threshold); break;
    }
  }

  run.ledger.finalize(total);
  SimResult& r = run.result;
  r.total_activations = total;
  r.max_disturbance = run.ledger.max_disturbance();
  r.ledger_total = run.ledger.recorded_total();
  if (config.avg_mode == AvgMode::RowMax) {
    std::uint64_t sum = 0;
    for (std::uint32_t id = 0; id < run.ledger.rows(); ++id) sum += run.ledger.row_max(id);
    r.avg_disturbance = static_cast<double>(sum) / static_cast<double>(run.ledger.rows());
  } else {
    r.avg_disturbance = run.ledger.episodes() == 0
                            ? 0.0
                            : static_cast<double>(run.ledger.episode_sum()) /
                                  static_cast<double>(run.ledger.episodes());
  }
  r.mean_tracker_occupancy =
      r.scheduled_slots ? static_cast<double>(run.occupancy_sum) / static_cast<double>(r.scheduled_slots)
                        : 0.0;
  r.extra_activation_fraction = static_cast<double>(r.mitigations_issued * 2 * config.blast_radius) /
                                static_cast<double>(total);
  return r;
}

SweepStats aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate of an empty result list");
  SweepStats s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
    s.ci95 = 1.96 * s.stddev / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

ResultStats aggregate(std::span<const SimResult> results) {
  if (results.empty()) throw std::invalid_argument("aggregate of an empty result list");
  std::vector<double> v(results.size());
  auto field = [&](auto getter) {
    for (std::size_t i = 0; i < results.size(); ++i) v[i] = static_cast<double>(getter(results[i]));
    return aggregate(std::span<const double>(v));
  };
  ResultStats out;
  out.max_disturbance = field([](const SimResult& r) { return r.max_disturbance; });
  out.avg_disturbance = field([](const SimResult& r) { return r.avg_disturbance; });
  out.mitigations_issued = field([](const SimResult& r) { return r.mitigations_issued; });
  out.empty_mitigation_slots = field([](const SimResult& r) { return r.empty_mitigation_slots; });
  out.mean_tracker_occupancy = field([](const SimResult& r) { return r.mean_tracker_occupancy; });
  out.extra_activation_fraction = field([](const SimResult& r) { return r.extra_activation_fraction; });
  return out;
}

}  // namespace rhsim
