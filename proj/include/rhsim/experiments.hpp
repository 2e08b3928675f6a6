#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rhsim/sim.hpp"

namespace rhsim {

enum class Axis : std::uint8_t { SamplingP, TrackerSize, MitigationsPerTrefi, EvictionRule, Policy };

std::string_view axis_name(Axis a);
Axis parse_axis(std::string_view text);

/// Sets one swept field of `config` from its text form. SamplingP writes the
/// probability the scheme actually samples with (mitigate_p for PARA).
void apply_axis(SimConfig& config, Axis axis, std::string_view value);

inline const std::vector<double>& default_p_grid() {
  static const std::vector<double> grid{0.001, 0.003, 0.006, 0.01, 0.02, 0.03,
                                        0.05,  0.10,  0.20,  0.50, 1.0};
  return grid;
}

struct SweepSpec {
  Axis axis = Axis::SamplingP;
  std::vector<std::string> axis_values;
  SimConfig fixed;
  std::vector<AttackPattern> patterns;
  std::uint64_t seeds = 100;

  void validate() const;
};

struct PatternResult {
  std::size_t pattern_index = 0;
  AttackPattern pattern;
  std::uint64_t seeds = 0;
  ResultStats stats;
  bool conserved = true;  // every run's ledger total equalled acts_per_trefw
};

struct SweepRow {
  std::string axis_value;
  SimConfig config;  // pattern fields are per PatternResult
  std::vector<PatternResult> patterns;
  double suite_max = 0.0;  // max over patterns of the per-pattern mean
  double suite_max_ci = 0.0;
  std::string suite_max_pattern;
  double suite_avg = 0.0;  // mean over patterns of the per-pattern avg_disturbance mean
  double mitigations_mean = 0.0;
  double occupancy_mean = 0.0;
  double extra_act_fraction = 0.0;
};

struct RunOptions {
  unsigned workers = 0;  // 0 = hardware concurrency
  /// Seed-independent configurations run once and the result is reused for
  /// every seed.
  bool replicate_deterministic = true;
};

unsigned resolve_workers(unsigned requested);

/// `patterns` against `fixed` for `seeds` seeds each; pattern i runs with
/// pattern_index i.
SweepRow run_suite(const SimConfig& fixed, const std::vector<AttackPattern>& patterns,
                   std::uint64_t seeds, const RunOptions& options = {}, std::string label = {});

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const RunOptions& options = {});

/// One line of a scheme comparison. `per_k_p` overrides the sampled
/// probability (sampling_p, or mitigate_p for PARA) at a given k.
struct SchemeSeries {
  std::string label;
  PolicySpec policy;
  std::map<std::uint64_t, double> per_k_p;
};

struct ComparisonCell {
  std::string label;
  std::uint64_t k = 1;
  SweepRow row;
};

double para_default_p(std::uint64_t k);
/// PROTEAS at the per-k probabilities {0.01, 0.03, 0.05, 0.10}.
double proteas_default_p(std::uint64_t k);
std::vector<SchemeSeries> default_comparison();

std::vector<ComparisonCell> compare_schemes(const std::vector<SchemeSeries>& schemes,
                                            const std::vector<std::uint64_t>& k_values,
                                            const std::vector<AttackPattern>& patterns,
                                            std::uint64_t seeds, const SimConfig& base = {},
                                            const RunOptions& options = {});

/// Optimal sampling probability S = M / miss_rate.
double analytic_sampling_rate(double mitigations_per_act, double miss_rate);

/// A memo of suite runs keyed by the full resolved configuration, so studies
/// that share a point compute it once.
class SuiteCache {
 public:
  SuiteCache(std::vector<AttackPattern> patterns, std::uint64_t seeds, RunOptions options = {});

  const SweepRow& get(const SimConfig& config, const std::string& label = {});
  const std::vector<AttackPattern>& patterns() const { return patterns_; }
  std::uint64_t seeds() const { return seeds_; }
  const RunOptions& options() const { return options_; }
  std::size_t size() const { return rows_.size(); }
  std::vector<const SweepRow*> rows() const;
  /// Called after each newly computed point.
  std::function<void(const SweepRow&)> on_computed;

 private:
  std::vector<AttackPattern> patterns_;
  std::uint64_t seeds_;
  RunOptions options_;
  std::map<std::string, std::unique_ptr<SweepRow>> rows_;
};

/// Canonical text of every field that affects a simulation, except the pattern
/// and the pattern/seed indices.
std::string config_key(const SimConfig& config);

}  // namespace rhsim
