#include <cmath>

#include "doctest.h"
#include "rhsim/error.hpp"
#include "rhsim/experiments.hpp"
#include "rhsim/output.hpp"

using namespace rhsim;

namespace {
std::vector<AttackPattern> few() {
  return {make_uniform(20, false), make_nonuniform(4, 4, 40, false), make_uniform(8, true)};
}
SimConfig proteas(double p) {
  SimConfig c;
  c.policy = PolicySpec::proteas(p);
  return c;
}
}  // namespace

TEST_CASE("axes") {
  CHECK(parse_axis("p") == Axis::SamplingP);
  CHECK(parse_axis("k") == Axis::MitigationsPerTrefi);
  CHECK(parse_axis("tracker_capacity") == Axis::TrackerSize);
  CHECK(parse_axis("eviction_rule") == Axis::EvictionRule);
  CHECK(parse_axis(axis_name(Axis::Policy)) == Axis::Policy);
  CHECK_THROWS_AS(parse_axis("colour"), ConfigError);

  SimConfig c;
  c.policy = PolicySpec::para(0.006);
  apply_axis(c, Axis::SamplingP, "0.05");
  CHECK(c.policy.mitigate_p == 0.05);
  apply_axis(c, Axis::Policy, "proteas");
  CHECK(c.policy.scheme == Scheme::Proteas);
  CHECK(c.policy.eviction.kind == EvictionKind::Random);
  apply_axis(c, Axis::TrackerSize, "32");
  CHECK(c.tracker_capacity == 32);
  apply_axis(c, Axis::EvictionRule, "lru");
  CHECK(c.policy.eviction.kind == EvictionKind::Lru);
  CHECK_THROWS_AS(apply_axis(c, Axis::MitigationsPerTrefi, "zero"), ConfigError);
}

TEST_CASE("suite statistics") {
  const auto pats = few();
  const SweepRow row = run_suite(proteas(0.05), pats, 3, {1, true}, "x");
  REQUIRE(row.patterns.size() == 3);
  double best = 0;
  std::string best_id;
  double avg = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& pr = row.patterns[i];
    CHECK(pr.pattern_index == i);
    CHECK(pr.pattern.id() == pats[i].id());
    CHECK(pr.seeds == 3);
    CHECK(pr.conserved);
    if (pr.stats.max_disturbance.mean > best) {
      best = pr.stats.max_disturbance.mean;
      best_id = pr.pattern.id();
    }
    avg += pr.stats.avg_disturbance.mean / 3;
    // pattern i, seed s reproduces on its own
    SimConfig one = proteas(0.05);
    one.pattern = pats[i];
    one.pattern_index = i;
    std::vector<SimResult> rs;
    for (std::uint64_t s = 0; s < 3; ++s) {
      one.seed_index = s;
      rs.push_back(simulate(one));
    }
    CHECK(aggregate(std::span<const SimResult>(rs)).max_disturbance.mean == pr.stats.max_disturbance.mean);
  }
  CHECK(row.suite_max == best);
  CHECK(row.suite_max_pattern == best_id);
  CHECK(row.suite_avg == doctest::Approx(avg));
}

TEST_CASE("worker count does not change results") {
  const auto pats = few();
  const std::vector<SweepRow> a{run_suite(proteas(0.1), pats, 4, {1, true})};
  const std::vector<SweepRow> b{run_suite(proteas(0.1), pats, 4, {3, true})};
  CHECK(sweep_csv(a) == sweep_csv(b));
}

TEST_CASE("replicating a deterministic point equals running every seed") {
  SimConfig c;
  c.policy = PolicySpec::baseline();
  const auto pats = few();
  const std::vector<SweepRow> a{run_suite(c, pats, 3, {1, true})};
  const std::vector<SweepRow> b{run_suite(c, pats, 3, {1, false})};
  CHECK(sweep_csv(a) == sweep_csv(b));
  CHECK(a[0].patterns[0].stats.max_disturbance.ci95 == 0.0);
}

TEST_CASE("sweep") {
  SweepSpec s;
  s.fixed = proteas(0.01);
  s.axis = Axis::SamplingP;
  s.axis_values = {"0.01", "0.5"};
  s.patterns = {make_uniform(20, false)};
  s.seeds = 2;
  const auto rows = run_sweep(s, {1, true});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].axis_value == "0.01");
  CHECK(rows[1].config.policy.sampling_p == 0.5);
  s.axis_values = {"1.5"};
  CHECK_THROWS_AS(run_sweep(s), ConfigError);
  s.axis_values = {};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("analytic sampling rate") {
  const double want[] = {1.2, 2.4, 4.8, 9.6};
  const std::uint64_t ks[] = {1, 2, 4, 8};
  for (int i = 0; i < 4; ++i)
    CHECK(std::round(1000.0 * analytic_sampling_rate(ks[i] / 166.0, 0.5)) / 10.0 == want[i]);
  CHECK(100.0 * analytic_sampling_rate(1.0 / 166.0, 1.0) == doctest::Approx(0.6).epsilon(0.01));
  CHECK_THROWS_AS(analytic_sampling_rate(0.01, 0.0), ConfigError);
  CHECK_THROWS_AS(analytic_sampling_rate(0.01, 1.5), ConfigError);
  CHECK_THROWS_AS(analytic_sampling_rate(0.0, 0.5), ConfigError);
}

TEST_CASE("default comparison probabilities") {
  CHECK(para_default_p(1) == 0.006);
  CHECK(para_default_p(8) == 0.05);
  CHECK(proteas_default_p(1) == 0.01);
  CHECK(proteas_default_p(8) == 0.10);
  CHECK(default_comparison().size() == 5);
}

TEST_CASE("cache memoises by configuration") {
  SuiteCache cache({make_uniform(4, false)}, 2, {1, true});
  int computed = 0;
  cache.on_computed = [&](const SweepRow&) { ++computed; };
  const SweepRow& a = cache.get(proteas(0.1));
  const SweepRow& b = cache.get(proteas(0.1));
  CHECK(&a == &b);
  cache.get(proteas(0.2));
  CHECK(cache.size() == 2);
  CHECK(computed == 2);
  CHECK(config_key(proteas(0.1)) != config_key(proteas(0.2)));
  SimConfig other = proteas(0.1);
  other.pattern = make_uniform(99, true);
  other.seed_index = 5;
  CHECK(config_key(other) == config_key(proteas(0.1)));
}
