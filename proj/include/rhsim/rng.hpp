#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace rhsim {

/// What a random stream is used for. Each purpose gets its own engine so that
/// consuming draws for one decision never perturbs another.
enum class Purpose : std::uint8_t { Sampling, Eviction, TieBreak, Para, Promotion };

std::string_view purpose_name(Purpose p);

/// A deterministic substream keyed by (master seed, purpose, pattern, seed
/// index). The key is hashed into the engine seed, so substreams can be
/// created independently by any number of workers.
class RngStream {
 public:
  static RngStream derive(std::uint64_t master_seed, Purpose purpose,
                          std::uint64_t pattern_index, std::uint64_t seed_index);

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of precision, one draw.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  std::mt19937_64 engine_;
};

namespace detail {
[[noreturn]] void bad_probability();
[[noreturn]] void bad_index_range();
}  // namespace detail

/// True with probability p. Always consumes exactly one draw.
inline bool bernoulli(RngStream& stream, double p) {
  if (!(p >= 0.0 && p <= 1.0)) detail::bad_probability();
  return stream.unit() < p;
}

/// Uniform index in [0, n) (Lemire's multiply-shift with rejection).
inline std::uint64_t uniform_index(RngStream& stream, std::uint64_t n) {
  if (n == 0) detail::bad_index_range();
  unsigned __int128 m = static_cast<unsigned __int128>(stream.next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(stream.next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// An i.i.d. Bernoulli(p) trial per activation, generated by drawing the
/// geometric gap between successes. `step()` answers one trial at a time;
/// `take_gap()` returns how many failures precede the next success and
/// consumes that success. Both views consume the stream identically, so a
/// caller may skip whole runs of failures without changing the outcome.
class BernoulliProcess {
 public:
  static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

  BernoulliProcess(RngStream stream, double p);

  bool step() {
    if (remaining_ == 0) {
      remaining_ = draw_gap();
      return true;
    }
    if (remaining_ != kNever) --remaining_;
    return false;
  }

  std::uint64_t take_gap() {
    const std::uint64_t g = remaining_;
    if (g != kNever) remaining_ = draw_gap();
    return g;
  }

  double probability() const { return p_; }

 private:
  std::uint64_t draw_gap();

  RngStream stream_;
  double p_;
  double log_q_ = 0.0;
  std::uint64_t remaining_ = kNever;
};

}  // namespace rhsim
