#pragma once
// Brute-force reference: eager per-row counters, vector tables, one activation
// at a time. Shares only the RNG primitives and budget arithmetic with the
// library, and draws from them in the same order.
#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "rhsim/sim.hpp"

namespace oracle {
using namespace rhsim;

struct Slot { RowId row = 0; std::uint64_t count = 0, last = 0, ins = 0; bool valid = false; };

struct Table {
  std::vector<Slot> s;
  explicit Table(std::size_t n) : s(n) {}
  int find(RowId r) const { for (std::size_t i = 0; i < s.size(); ++i) if (s[i].valid && s[i].row == r) return int(i); return -1; }
  bool full() const { return std::all_of(s.begin(), s.end(), [](const Slot& e) { return e.valid; }); }
  template <class Key> int best(Key key, bool largest) const {
    int b = -1;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i].valid && (b < 0 || (largest ? key(s[i]) > key(s[b]) : key(s[i]) < key(s[b])))) b = int(i);
    return b;
  }
  int lfu() const { return best([](const Slot& e) { return e.count; }, false); }
  int lru() const { return best([](const Slot& e) { return e.last; }, false); }
  void hit(int i, std::uint64_t now) { ++s[i].count; s[i].last = now; }
  void insert(RowId r, EvictionRule rule, RngStream& g, std::uint64_t now) {
    int i = -1;
    for (std::size_t k = 0; k < s.size() && i < 0; ++k) if (!s[k].valid) i = int(k);
    if (i < 0) {
      switch (rule.kind) {
        case EvictionKind::Lfu: i = lfu(); break;
        case EvictionKind::Lru: i = lru(); break;
        case EvictionKind::Fifo: i = best([](const Slot& e) { return e.ins; }, false); break;
        case EvictionKind::Random: i = int(uniform_index(g, s.size())); break;
        case EvictionKind::Bip: if (!bernoulli(g, rule.epsilon)) return; i = lru(); break;
      }
    }
    s[i] = Slot{r, 0, now, now, true};
  }
  std::optional<RowId> take_mfu() {
    const int i = best([](const Slot& e) { return e.count; }, true);
    if (i < 0) return std::nullopt;
    s[i].valid = false;
    return s[i].row;
  }
};

struct Result { std::uint64_t max_disturbance = 0, mitigations = 0; };

inline Result run(const SimConfig& c) {
  const DerivedBudgets b = derive_budgets(c.timings);
  const std::uint64_t thr = c.schedule().rfm_threshold;
  const PolicySpec& p = c.policy;
  auto stream = [&](Purpose u) { return RngStream::derive(c.master_seed, u, c.pattern_index, c.seed_index); };
  RngStream ev = stream(Purpose::Eviction), smp = stream(Purpose::Sampling), pro = stream(Purpose::Promotion);
  BernoulliProcess sampler(stream(Purpose::Sampling), p.sampling_p), para(stream(Purpose::Para), p.mitigate_p);
  const bool prohit = p.scheme == Scheme::Prohit;
  Table t(prohit ? p.hot_capacity : c.tracker_capacity), cold(prohit ? p.cold_capacity : 1);
  std::map<RowId, std::uint64_t> mg;
  const std::uint64_t mg_cap = p.graphene_entries ? p.graphene_entries : graphene_capacity(b, std::max<std::uint64_t>(p.trh, 2));
  const std::uint64_t mg_thr = std::max<std::uint64_t>(1, p.trh / 2);
  std::map<RowId, std::uint64_t> ctr;
  Result out;
  auto mitigate = [&](RowId r) { out.max_disturbance = std::max(out.max_disturbance, ctr[r]); ctr[r] = 0; ++out.mitigations; };
  for (std::uint64_t now = 0; now < b.acts_per_trefw; ++now) {
    const RowId r = c.pattern.element(c.pattern.aligned ? now % b.acts_per_trefi : now);
    out.max_disturbance = std::max(out.max_disturbance, ++ctr[r]);
    const int h = p.scheme == Scheme::Para || p.scheme == Scheme::Graphene ? -1 : t.find(r);
    switch (p.scheme) {
      case Scheme::Baseline: h >= 0 ? t.hit(h, now) : t.insert(r, p.eviction, ev, now); break;
      case Scheme::Proteas: if (sampler.step()) h >= 0 ? t.hit(h, now) : t.insert(r, p.eviction, ev, now); break;
      case Scheme::Pmss: if (h >= 0) t.hit(h, now); else if (!t.full() || sampler.step()) t.insert(r, p.eviction, ev, now); break;
      case Scheme::Dsac:
        if (h >= 0) t.hit(h, now);
        else if (!t.full() || bernoulli(smp, std::max(p.p_floor, 1.0 / (1.0 + double(t.s[t.lfu()].count))))) t.insert(r, p.eviction, ev, now);
        break;
      case Scheme::Prohit: {
        if (h >= 0) { t.hit(h, now); break; }
        const int ch = cold.find(r);
        if (ch < 0) { cold.insert(r, EvictionRule::fifo(), ev, now); break; }
        cold.hit(ch, now);
        if (!bernoulli(pro, p.promote_p)) break;
        Slot up = cold.s[ch];
        cold.s[ch].valid = false;
        if (t.full()) { const int d = t.lfu(); cold.s[ch] = t.s[d]; cold.s[ch].last = cold.s[ch].ins = now; t.s[d].valid = false; }
        for (auto& e : t.s) if (!e.valid) { e = up; e.last = e.ins = now; break; }
        break;
      }
      case Scheme::Para: if (para.step()) mitigate(r); break;
      case Scheme::Graphene:
        if (auto it = mg.find(r); it != mg.end()) { if (++it->second >= mg_thr) { mg.erase(it); mitigate(r); } }
        else if (mg.size() < mg_cap) { if (mg_thr <= 1) mitigate(r); else mg[r] = 1; }
        else for (auto it = mg.begin(); it != mg.end();) it = --it->second == 0 ? mg.erase(it) : std::next(it);
        break;
    }
    if ((now + 1) % thr == 0 && p.scheme != Scheme::Para && p.scheme != Scheme::Graphene) {
      std::optional<RowId> m = t.take_mfu();
      if (!m && prohit) m = cold.take_mfu();
      if (m) mitigate(*m);
    }
  }
  return out;
}

}  // namespace oracle
