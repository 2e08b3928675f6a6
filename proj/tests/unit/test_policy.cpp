#include <cmath>
#include <unordered_map>

#include "doctest.h"
#include "rhsim/error.hpp"
#include "rhsim/policy.hpp"

using namespace rhsim;

namespace {
PolicyState make(const PolicySpec& spec, std::size_t cap = 16, std::uint64_t seed = 0) {
  return PolicyState(spec, cap, PolicyStreams::derive(1234, 0, seed), 0, 64);
}
}  // namespace

TEST_CASE("dsac insertion probability") {
  CHECK(dsac_evict_prob(0, 0.05) == 1.0);
  CHECK(dsac_evict_prob(3, 0.05) == doctest::Approx(0.25));
  CHECK(dsac_evict_prob(19, 0.05) == doctest::Approx(0.05));
  CHECK(dsac_evict_prob(1000, 0.05) == 0.05);
}

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::Baseline, Scheme::Proteas, Scheme::Pmss, Scheme::Dsac, Scheme::Prohit,
                   Scheme::Para, Scheme::Graphene})
    CHECK(parse_scheme(scheme_name(s)) == s);
  CHECK_THROWS_AS(parse_scheme("trr"), ConfigError);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(make(PolicySpec::proteas(1.2)), ConfigError);
  CHECK_THROWS_AS(make(PolicySpec::para(-0.1)), ConfigError);
  CHECK_THROWS_AS(make(PolicySpec::graphene(1)), ConfigError);
  CHECK_THROWS_AS(make(PolicySpec::prohit(0, 12, 0.1)), ConfigError);
  CHECK_THROWS_AS(make(PolicySpec::dsac(2.0)), ConfigError);
}

TEST_CASE("uses_randomness") {
  CHECK_FALSE(PolicySpec::baseline().uses_randomness());
  CHECK(PolicySpec::baseline(EvictionRule::random()).uses_randomness());
  CHECK_FALSE(PolicySpec::proteas(1.0, EvictionRule::lfu()).uses_randomness());
  CHECK(PolicySpec::proteas(1.0).uses_randomness());
  CHECK(PolicySpec::proteas(0.5, EvictionRule::lfu()).uses_randomness());
  CHECK_FALSE(PolicySpec::proteas(0.0).uses_randomness());
  CHECK(PolicySpec::pmss(0.01).uses_randomness());
  CHECK(PolicySpec::dsac().uses_randomness());
  CHECK(PolicySpec::prohit().uses_randomness());
  CHECK_FALSE(PolicySpec::prohit(4, 12, 1.0).uses_randomness());
  CHECK(PolicySpec::para(0.006).uses_randomness());
  CHECK_FALSE(PolicySpec::para(1.0).uses_randomness());
  CHECK_FALSE(PolicySpec::graphene(500).uses_randomness());
}

TEST_CASE("baseline tracks every activation, LFU evicts the older tie") {
  auto ps = make(PolicySpec::baseline(), 2);
  ps.on_activation(10, 0);
  ps.on_activation(20, 1);
  ps.on_activation(30, 2);
  CHECK_FALSE(ps.tracker()->lookup(10));
  CHECK(ps.tracker()->lookup(20));
  CHECK(ps.tracker()->lookup(30));
  ps.on_activation(20, 3);
  CHECK(ps.on_scheduled_mitigation() == RowId{20});
}

TEST_CASE("PROTEAS at p=0 never tracks") {
  auto ps = make(PolicySpec::proteas(0.0));
  for (std::uint64_t t = 0; t < 10000; ++t) ps.on_activation(t % 7, t);
  CHECK(ps.occupancy() == 0);
  CHECK_FALSE(ps.on_scheduled_mitigation());
  CHECK(ps.sampled_activations() == 0);
}

TEST_CASE("PROTEAS at p=1 matches the baseline with the same rule") {
  auto a = make(PolicySpec::proteas(1.0, EvictionRule::lfu()), 4);
  auto b = make(PolicySpec::baseline(), 4);
  for (std::uint64_t t = 0; t < 5000; ++t) {
    const RowId r = (t * 7919) % 11;
    a.on_activation(r, t);
    b.on_activation(r, t);
    if (t % 50 == 49) CHECK(a.on_scheduled_mitigation() == b.on_scheduled_mitigation());
  }
}

TEST_CASE("sparse driving equals dense driving") {
  for (const PolicySpec& spec : {PolicySpec::proteas(0.05), PolicySpec::para(0.02)}) {
    auto dense = make(spec, 8, 3);
    auto sparse = make(spec, 8, 3);
    REQUIRE(sparse.sparse());
    const std::uint64_t n = 50000;
    std::vector<RowId> hits_dense, hits_sparse;
    for (std::uint64_t t = 0; t < n; ++t)
      if (auto m = dense.on_activation(t % 13, t)) hits_dense.push_back(*m);
    std::uint64_t t = 0;
    while (t < n) {
      const std::uint64_t g = sparse.take_sampling_gap();
      if (g == BernoulliProcess::kNever || g >= n - t) break;
      t += g;
      if (auto m = sparse.on_sampled_activation(t % 13, t)) hits_sparse.push_back(*m);
      ++t;
    }
    CHECK(hits_dense == hits_sparse);
    CHECK(dense.sampled_activations() == sparse.sampled_activations());
    CHECK(dense.occupancy() == sparse.occupancy());
    for (int i = 0; i < 8; ++i) CHECK(dense.on_scheduled_mitigation() == sparse.on_scheduled_mitigation());
  }
}

TEST_CASE("PMSS only samples misses into a full tracker") {
  auto ps = make(PolicySpec::pmss(0.0), 4);
  for (RowId r = 0; r < 4; ++r) ps.on_activation(r, r);
  CHECK(ps.occupancy() == 4);
  for (std::uint64_t t = 0; t < 1000; ++t) ps.on_activation(100 + t, 10 + t);
  for (RowId r = 0; r < 4; ++r) CHECK(ps.tracker()->lookup(r));
  // hits still count
  ps.on_activation(2, 5000);
  CHECK(ps.on_scheduled_mitigation() == RowId{2});
}

TEST_CASE("DSAC replaces an untouched minimum at once") {
  auto ps = make(PolicySpec::dsac(), 2);
  ps.on_activation(1, 0);
  ps.on_activation(2, 1);
  ps.on_activation(3, 2);  // min count 0 -> probability 1
  CHECK(ps.tracker()->lookup(3));
  CHECK_FALSE(ps.tracker()->lookup(1));
}

TEST_CASE("PRoHIT: promotion, demotion, hot table first") {
  auto ps = make(PolicySpec::prohit(1, 4, 1.0));
  ps.on_activation(10, 0);
  CHECK(ps.cold_table()->lookup(10));
  ps.on_activation(10, 1);  // promoted with its count
  CHECK(ps.tracker()->lookup(10));
  CHECK_FALSE(ps.cold_table()->lookup(10));
  ps.on_activation(20, 2);
  ps.on_activation(20, 3);  // hot full: 10 goes back to the cold table
  CHECK(ps.tracker()->lookup(20));
  const auto back = ps.cold_table()->lookup(10);
  REQUIRE(back);
  CHECK(ps.cold_table()->entry(*back).count == 1);
  ps.on_activation(30, 4);
  CHECK(ps.on_scheduled_mitigation() == RowId{20});
  CHECK(ps.on_scheduled_mitigation() == RowId{10});
  CHECK(ps.on_scheduled_mitigation() == RowId{30});
  CHECK_FALSE(ps.on_scheduled_mitigation());

  auto none = make(PolicySpec::prohit(4, 12, 0.0));
  for (int i = 0; i < 5; ++i) none.on_activation(1, i);
  none.on_activation(2, 9);
  CHECK(none.tracker()->occupancy() == 0);
  CHECK(none.on_scheduled_mitigation() == RowId{1});
}

TEST_CASE("PRoHIT cold table is FIFO") {
  auto ps = make(PolicySpec::prohit(4, 2, 0.0));
  ps.on_activation(1, 0);
  ps.on_activation(2, 1);
  ps.on_activation(1, 2);
  ps.on_activation(3, 3);
  CHECK_FALSE(ps.cold_table()->lookup(1));
  CHECK(ps.cold_table()->lookup(2));
}

TEST_CASE("PARA mitigates about p of activations") {
  const double p = 0.006;
  const double n = 100000;
  auto ps = make(PolicySpec::para(p));
  std::uint64_t m = 0;
  for (std::uint64_t t = 0; t < n; ++t)
    if (auto r = ps.on_activation(t % 5, t)) {
      REQUIRE(*r == t % 5);
      ++m;
    }
  const double sd = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(m - n * p) <= 5 * sd);
  CHECK_FALSE(ps.on_scheduled_mitigation());
  CHECK(ps.occupancy() == 0);
}

TEST_CASE("Graphene mitigates a lone row on its 250th activation") {
  auto ps = make(PolicySpec::graphene(500, 8));
  CHECK(ps.graphene_threshold() == 250);
  for (int i = 1; i < 250; ++i) REQUIRE_FALSE(ps.on_activation(7, i));
  CHECK(ps.graphene_count(7) == 249);
  CHECK(ps.on_activation(7, 250) == RowId{7});
  CHECK(ps.graphene_count(7) == 0);
  CHECK_FALSE(ps.on_activation(7, 251));
}

TEST_CASE("Graphene undercounts by at most N/(entries+1)") {
  const std::uint64_t entries = 6;
  auto ps = make(PolicySpec::graphene(40, entries));
  RngStream rows = RngStream::derive(5, Purpose::TieBreak, 0, 0);
  std::unordered_map<RowId, std::uint64_t> exact;  // since the row's last mitigation
  const std::uint64_t n = 60000;
  std::uint64_t worst = 0;
  for (std::uint64_t t = 1; t <= n; ++t) {
    const RowId r = uniform_index(rows, 3) == 0 ? uniform_index(rows, 4) : uniform_index(rows, 200);
    ++exact[r];
    if (auto m = ps.on_activation(r, t)) {
      REQUIRE(*m == r);
      exact[r] = 0;
    }
    for (const auto& [row, c] : exact) {
      const std::uint64_t est = ps.graphene_count(row);
      REQUIRE(est <= c);
      worst = std::max(worst, c - est);
      REQUIRE(c - est <= t / (entries + 1));
    }
    REQUIRE(ps.occupancy() <= entries);
  }
  CHECK(worst > 0);
}
