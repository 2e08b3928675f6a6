#include "rhsim/rng.hpp"

#include <cmath>

#include "rhsim/error.hpp"

namespace rhsim {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probability", "must lie in [0, 1]");
}

}  // namespace

std::string_view purpose_name(Purpose p) {
  switch (p) {
    case Purpose::Sampling: return "sampling";
    case Purpose::Eviction: return "eviction";
    case Purpose::TieBreak: return "tie-break";
    case Purpose::Para: return "para";
    case Purpose::Promotion: return "promotion";
  }
  return "unknown";
}

RngStream RngStream::derive(std::uint64_t master_seed, Purpose purpose,
                            std::uint64_t pattern_index, std::uint64_t seed_index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ (0x100 + static_cast<std::uint64_t>(purpose)));
  h = splitmix64(h ^ pattern_index);
  h = splitmix64(h ^ (seed_index * 0xd6e8feb86659fd93ULL));
  return RngStream(h);
}

namespace detail {
void bad_probability() { throw ConfigError("probability", "must lie in [0, 1]"); }
void bad_index_range() { throw ConfigError("n", "uniform_index needs n >= 1"); }
}  // namespace detail

BernoulliProcess::BernoulliProcess(RngStream stream, double p) : stream_(stream), p_(p) {
  check_probability(p);
  if (p > 0.0 && p < 1.0) log_q_ = std::log1p(-p);
  remaining_ = draw_gap();
}

std::uint64_t BernoulliProcess::draw_gap() {
  if (p_ <= 0.0) return kNever;
  if (p_ >= 1.0) return 0;
  // Inversion: failures before the first success ~ floor(ln U / ln(1 - p)).
  const double u = 1.0 - stream_.unit();  // (0, 1]
  const double g = std::floor(std::log(u) / log_q_);
  if (!(g < 9.0e18)) return kNever - 1;
  return static_cast<std::uint64_t>(g);
}

}  // namespace rhsim
