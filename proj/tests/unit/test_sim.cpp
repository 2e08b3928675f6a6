#include <cmath>
#include <map>

#include "doctest.h"
#include "rhsim/error.hpp"
#include "rhsim/sim.hpp"

using namespace rhsim;

namespace {
SimConfig with(PolicySpec policy, AttackPattern pattern, std::uint64_t k = 1) {
  SimConfig c;
  c.policy = policy;
  c.pattern = std::move(pattern);
  c.mitigations_per_trefi = k;
  return c;
}
}  // namespace

TEST_CASE("lazy ledger equals eager counting") {
  const auto p = make_nonuniform(3, 2, 5, false);
  const ActivationStream s(p, 165);
  DisturbanceLedger ledger(s);
  std::vector<std::uint64_t> eager(s.footprint(), 0), row_max(s.footprint(), 0);
  std::uint64_t gmax = 0;
  RngStream g = RngStream::derive(3, Purpose::TieBreak, 0, 0);
  const std::uint64_t n = 20000;
  for (std::uint64_t t = 0; t < n; ++t) {
    ++eager[s.at(t)];
    if (uniform_index(g, 30) == 0) {
      const auto id = static_cast<std::uint32_t>(uniform_index(g, s.footprint()));
      REQUIRE(ledger.count(id, t + 1) == eager[id]);
      CHECK(ledger.reset(id, t + 1) == eager[id]);
      row_max[id] = std::max(row_max[id], eager[id]);
      gmax = std::max(gmax, eager[id]);
      eager[id] = 0;
    }
  }
  ledger.finalize(n);
  for (std::uint32_t id = 0; id < s.footprint(); ++id) {
    row_max[id] = std::max(row_max[id], eager[id]);
    gmax = std::max(gmax, eager[id]);
    CHECK(ledger.row_max(id) == row_max[id]);
  }
  CHECK(ledger.max_disturbance() == gmax);
}

TEST_CASE("victim_count matches victim_set") {
  for (std::uint64_t br : {1, 2, 4})
    for (RowId r : {0u, 1u, 3u, 500u, 131068u, 131071u})
      CHECK(victim_count(r, br, 131072) == victim_set(r, br, 131072).size());
  CHECK(victim_count(200000, 2, 131072) == 0);
}

TEST_CASE("conservation and slot accounting") {
  for (auto policy : {PolicySpec::baseline(), PolicySpec::proteas(0.05), PolicySpec::para(0.01),
                      PolicySpec::prohit(), PolicySpec::graphene(500)}) {
    for (std::uint64_t k : {1, 3}) {
      const SimConfig c = with(policy, make_nonuniform(8, 3, 20, true), k);
      const SimResult r = simulate(c);
      CAPTURE(std::string(scheme_name(policy.scheme)));
      CHECK(r.total_activations == 165ULL * 8192);
      CHECK(r.ledger_total == r.total_activations);
      CHECK(r.scheduled_slots == r.total_activations / (165 / k));
      if (policy.scheme != Scheme::Para && policy.scheme != Scheme::Graphene)
        CHECK(r.mitigations_issued + r.empty_mitigation_slots == r.scheduled_slots);
      CHECK(r.extra_activation_fraction ==
            doctest::Approx(double(r.mitigations_issued) * 4 / double(r.total_activations)));
      CHECK(r.victim_refreshes == r.mitigations_issued * 4);
    }
  }
}

TEST_CASE("determinism and seed sensitivity") {
  SimConfig c = with(PolicySpec::proteas(0.05), make_uniform(20, false));
  const SimResult a = simulate(c), b = simulate(c);
  CHECK(a == b);
  c.seed_index = 1;
  CHECK_FALSE(simulate(c) == a);
}

TEST_CASE("one row gets mitigated at every slot") {
  const SimResult r = simulate(with(PolicySpec::baseline(), make_custom({4242}, false)));
  CHECK(r.max_disturbance <= 165);
  CHECK(r.max_disturbance == 165);
  CHECK(r.empty_mitigation_slots == 0);
}

TEST_CASE("anchor behaviour of the baseline and PROTEAS") {
  const SimResult base = simulate(with(PolicySpec::baseline(), make_uniform(20, true)));
  CHECK(base.max_disturbance >= 20000);
  const SimResult pro = simulate(with(PolicySpec::proteas(0.01), make_uniform(20, true)));
  CHECK(pro.max_disturbance >= 500);
  CHECK(pro.max_disturbance <= 5000);
}

TEST_CASE("avg modes") {
  SimConfig c = with(PolicySpec::baseline(), make_uniform(4, false));
  const SimResult r = simulate(c);
  c.avg_mode = AvgMode::ResetEvent;
  const SimResult e = simulate(c);
  CHECK(r.max_disturbance == e.max_disturbance);
  CHECK(r.avg_disturbance >= e.avg_disturbance);
  CHECK(e.avg_disturbance > 0);
}

TEST_CASE("validation") {
  SimConfig c = with(PolicySpec::baseline(), make_uniform(4, false));
  c.num_rows = 1001;
  CHECK_THROWS_AS(simulate(c), ConfigError);
  c = with(PolicySpec::baseline(), make_uniform(4, false));
  c.blast_radius = 3;
  CHECK_THROWS_AS(simulate(c), ConfigError);
  c.blast_radius = 2;
  c.tracker_capacity = 0;
  CHECK_THROWS_AS(simulate(c), ConfigError);
}

TEST_CASE("aggregate") {
  const double v[] = {2, 4, 6};
  const SweepStats s = aggregate(std::span<const double>(v));
  CHECK(s.n == 3);
  CHECK(s.mean == doctest::Approx(4.0));
  CHECK(s.stddev == doctest::Approx(2.0));
  CHECK(s.ci95 == doctest::Approx(1.96 * 2.0 / std::sqrt(3.0)));
  CHECK(s.ci95 == doctest::Approx(2.263).epsilon(1e-3));
  const double one[] = {7};
  CHECK(aggregate(std::span<const double>(one)).ci95 == 0.0);
  CHECK_THROWS(aggregate(std::span<const double>()));
  CHECK_THROWS(aggregate(std::span<const SimResult>()));
}
