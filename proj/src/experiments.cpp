#include "rhsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "rhsim/config.hpp"
#include "rhsim/error.hpp"

namespace rhsim {
namespace {

void set_sampled_p(PolicySpec& policy, double p) {
  if (policy.scheme == Scheme::Para)
    policy.mitigate_p = p;
  else
    policy.sampling_p = p;
}

}  // namespace

std::string_view axis_name(Axis a) {
  switch (a) {
    case Axis::SamplingP: return "sampling_p";
    case Axis::TrackerSize: return "tracker_size";
    case Axis::MitigationsPerTrefi: return "mitigations_per_trefi";
    case Axis::EvictionRule: return "eviction";
    case Axis::Policy: return "policy";
  }
  return "unknown";
}

Axis parse_axis(std::string_view text) {
  if (text == "sampling_p" || text == "p") return Axis::SamplingP;
  if (text == "tracker_size" || text == "tracker_capacity") return Axis::TrackerSize;
  if (text == "mitigations_per_trefi" || text == "k") return Axis::MitigationsPerTrefi;
  if (text == "eviction" || text == "eviction_rule") return Axis::EvictionRule;
  if (text == "policy") return Axis::Policy;
  throw ConfigError("axis", "unknown axis '" + std::string(text) + "'");
}

void apply_axis(SimConfig& config, Axis axis, std::string_view value) {
  switch (axis) {
    case Axis::SamplingP: set_sampled_p(config.policy, parse_real(value, "sampling_p")); break;
    case Axis::TrackerSize: config.tracker_capacity = parse_count(value, "tracker_size"); break;
    case Axis::MitigationsPerTrefi:
      config.mitigations_per_trefi = parse_count(value, "mitigations_per_trefi");
      break;
    case Axis::EvictionRule: config.policy.eviction = parse_eviction(value); break;
    case Axis::Policy: {
      // Keep tunables; only the scheme (and its default eviction) changes.
      const Scheme s = parse_scheme(value);
      config.policy.scheme = s;
      if (s == Scheme::Proteas) config.policy.eviction = EvictionRule::random();
      if (s == Scheme::Dsac || s == Scheme::Baseline || s == Scheme::Pmss)
        config.policy.eviction = EvictionRule::lfu();
      break;
    }
  }
}

void SweepSpec::validate() const {
  if (axis_values.empty()) throw ConfigError("axis_values", "must not be empty");
  if (seeds == 0) throw ConfigError("seeds", "must be at least 1");
  if (patterns.empty()) throw ConfigError("patterns", "must not be empty");
  for (const auto& v : axis_values) {
    SimConfig c = fixed;
    apply_axis(c, axis, v);
    c.pattern = patterns.front();
    c.validate();
  }
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

SweepRow run_suite(const SimConfig& fixed, const std::vector<AttackPattern>& patterns,
                   std::uint64_t seeds, const RunOptions& options, std::string label) {
  if (seeds == 0) throw ConfigError("seeds", "must be at least 1");
  if (patterns.empty()) throw ConfigError("patterns", "must not be empty");
  const bool replicate = options.replicate_deterministic && !fixed.policy.uses_randomness();
  const std::uint64_t runs_per_pattern = replicate ? 1 : seeds;

  struct Task {
    std::size_t pattern;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  tasks.reserve(patterns.size() * runs_per_pattern);
  for (std::size_t i = 0; i < patterns.size(); ++i)
    for (std::uint64_t s = 0; s < runs_per_pattern; ++s) tasks.push_back({i, s});
  std::vector<SimResult> results(tasks.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      try {
        SimConfig c = fixed;
        c.pattern = patterns[tasks[t].pattern];
        c.pattern_index = tasks[t].pattern;
        c.seed_index = tasks[t].seed;
        results[t] = simulate(c);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned n = std::min<std::size_t>(resolve_workers(options.workers), tasks.size());
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  SweepRow row;
  row.axis_value = std::move(label);
  row.config = fixed;
  row.patterns.reserve(patterns.size());
  double occ = 0.0, mit = 0.0, extra = 0.0, avg = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    std::vector<SimResult> per(results.begin() + static_cast<std::ptrdiff_t>(i * runs_per_pattern),
                               results.begin() + static_cast<std::ptrdiff_t>((i + 1) * runs_per_pattern));
    PatternResult pr;
    pr.pattern_index = i;
    pr.pattern = patterns[i];
    pr.seeds = seeds;
    for (const auto& r : per) pr.conserved = pr.conserved && r.ledger_total == r.total_activations;
    if (replicate) per.assign(seeds, per.front());
    pr.stats = aggregate(std::span<const SimResult>(per));
    const double m = pr.stats.max_disturbance.mean;
    if (first || m > row.suite_max) {
      row.suite_max = m;
      row.suite_max_ci = pr.stats.max_disturbance.ci95;
      row.suite_max_pattern = pr.pattern.id();
      first = false;
    }
    avg += pr.stats.avg_disturbance.mean;
    mit += pr.stats.mitigations_issued.mean;
    occ += pr.stats.mean_tracker_occupancy.mean;
    extra += pr.stats.extra_activation_fraction.mean;
    row.patterns.push_back(std::move(pr));
  }
  const double np = static_cast<double>(patterns.size());
  row.suite_avg = avg / np;
  row.mitigations_mean = mit / np;
  row.occupancy_mean = occ / np;
  row.extra_act_fraction = extra / np;
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const RunOptions& options) {
  spec.validate();
  std::vector<SweepRow> rows;
  rows.reserve(spec.axis_values.size());
  for (const auto& v : spec.axis_values) {
    SimConfig c = spec.fixed;
    apply_axis(c, spec.axis, v);
    rows.push_back(run_suite(c, spec.patterns, spec.seeds, options, v));
  }
  return rows;
}

double para_default_p(std::uint64_t k) {
  switch (k) {
    case 1: return 0.006;
    case 2: return 0.012;
    case 4: return 0.025;
    case 8: return 0.05;
    default: return std::min(1.0, 0.006 * static_cast<double>(k));
  }
}

double proteas_default_p(std::uint64_t k) {
  switch (k) {
    case 1: return 0.01;
    case 2: return 0.03;
    case 4: return 0.05;
    case 8: return 0.10;
    default: return std::min(1.0, 0.0125 * static_cast<double>(k));
  }
}

std::vector<SchemeSeries> default_comparison() {
  std::vector<SchemeSeries> out;
  out.push_back({"baseline", PolicySpec::baseline(), {}});
  SchemeSeries proteas{"proteas", PolicySpec::proteas(0.01), {}};
  SchemeSeries para{"para", PolicySpec::para(0.006), {}};
  for (std::uint64_t k : {1, 2, 4, 8}) {
    proteas.per_k_p[k] = proteas_default_p(k);
    para.per_k_p[k] = para_default_p(k);
  }
  out.push_back(proteas);
  out.push_back({"dsac", PolicySpec::dsac(), {}});
  out.push_back({"prohit", PolicySpec::prohit(), {}});
  out.push_back(para);
  return out;
}

std::vector<ComparisonCell> compare_schemes(const std::vector<SchemeSeries>& schemes,
                                            const std::vector<std::uint64_t>& k_values,
                                            const std::vector<AttackPattern>& patterns,
                                            std::uint64_t seeds, const SimConfig& base,
                                            const RunOptions& options) {
  std::vector<ComparisonCell> out;
  for (const auto& s : schemes) {
    for (std::uint64_t k : k_values) {
      SimConfig c = base;
      c.policy = s.policy;
      c.mitigations_per_trefi = k;
      if (auto it = s.per_k_p.find(k); it != s.per_k_p.end()) set_sampled_p(c.policy, it->second);
      out.push_back({s.label, k, run_suite(c, patterns, seeds, options, s.label)});
    }
  }
  return out;
}

double analytic_sampling_rate(double mitigations_per_act, double miss_rate) {
  if (!(miss_rate > 0.0 && miss_rate <= 1.0)) throw ConfigError("miss_rate", "must lie in (0, 1]");
  if (!(mitigations_per_act > 0.0)) throw ConfigError("mitigations_per_act", "must be positive");
  return mitigations_per_act / miss_rate;
}

std::string config_key(const SimConfig& c) {
  std::ostringstream o;
  o.precision(17);
  const auto& t = c.timings;
  const auto& p = c.policy;
  o << "t=" << t.trefw_ns << ',' << t.trefi_ns << ',' << t.trfc_ns << ',' << t.trc_ns << ','
    << t.refs_per_trefw << ";k=" << c.mitigations_per_trefi << ";br=" << c.blast_radius
    << ";rows=" << c.num_rows << ";cap=" << c.tracker_capacity << ";seed=" << c.master_seed
    << ";avg=" << static_cast<int>(c.avg_mode) << ";pol=" << scheme_name(p.scheme)
    << ";ev=" << eviction_name(p.eviction);
  switch (p.scheme) {
    case Scheme::Baseline: break;
    case Scheme::Proteas:
    case Scheme::Pmss: o << ";p=" << p.sampling_p; break;
    case Scheme::Dsac: o << ";floor=" << p.p_floor; break;
    case Scheme::Prohit:
      o << ";hot=" << p.hot_capacity << ";cold=" << p.cold_capacity << ";promote=" << p.promote_p;
      break;
    case Scheme::Para: o << ";mp=" << p.mitigate_p; break;
    case Scheme::Graphene: o << ";trh=" << p.trh << ";entries=" << p.graphene_entries; break;
  }
  return o.str();
}

SuiteCache::SuiteCache(std::vector<AttackPattern> patterns, std::uint64_t seeds, RunOptions options)
    : patterns_(std::move(patterns)), seeds_(seeds), options_(options) {}

const SweepRow& SuiteCache::get(const SimConfig& config, const std::string& label) {
  const std::string key = config_key(config);
  auto it = rows_.find(key);
  if (it == rows_.end()) {
    auto row = std::make_unique<SweepRow>(run_suite(config, patterns_, seeds_, options_, label));
    it = rows_.emplace(key, std::move(row)).first;
    if (on_computed) on_computed(*it->second);
  }
  return *it->second;
}

std::vector<const SweepRow*> SuiteCache::rows() const {
  std::vector<const SweepRow*> out;
  out.reserve(rows_.size());
  for (const auto& [key, row] : rows_) out.push_back(row.get());
  return out;
}

}  // namespace rhsim
