#pragma once

// Prime-modulus multiplicative LCG that produces the message skips. The
// multiplier is restricted to a^2 <= q so a*s mod q can be evaluated with the
// two-word decomposition a*(s mod q1) - q2*floor(s/q1), q = a*q1 + q2, and
// neither intermediate reaches q.

#include <cstdint>
#include <span>
#include <vector>

#include "rsarand/numtheory.hpp"

namespace rsarand {

/// Largest prime below 2^63; the production skip modulus.
inline constexpr u64 kSkipModulus = (u64{1} << 63) - 25;

enum class Validation {
  production,  // full invariant checks
  test,        // small primes, small q and weak multipliers allowed
};

class SkipParams {
 public:
  /// Validates q prime (< 2^63), a a primitive root mod q with a^2 <= q.
  /// Production validation also requires 2^31 < a.
  static SkipParams make(u64 q, u64 a, Validation validation = Validation::production);

  u64 q() const noexcept { return q_; }
  u64 a() const noexcept { return a_; }
  u64 q1() const noexcept { return q1_; }
  u64 q2() const noexcept { return q2_; }

  friend bool operator==(const SkipParams&, const SkipParams&) = default;

 private:
  SkipParams(u64 q, u64 a) noexcept : q_(q), a_(a), q1_(q / a), q2_(q % a) {}

  u64 q_, a_, q1_, q2_;
};

struct SkipState {
  u64 s = 1;  // in [1, q-1]
};

/// a*s mod q as a*(s mod q1) - q2*floor(s/q1) with q1 = floor(q/a) and
/// q2 = q mod a. Exact whenever a^2 <= q and 0 < s < q; both terms then
/// stay below q and the difference is fixed up by one conditional add.
inline constexpr u64 schrage_mulmod(u64 s, u64 a, u64 q1, u64 q2, u64 q) noexcept {
  const u64 hi = s / q1;
  const u64 s1 = a * (s - hi * q1);
  const u64 s2 = q2 * hi;
  return s1 >= s2 ? s1 - s2 : s1 + (q - s2);
}

/// s := a*s mod q by the two-word decomposition; returns the new skip.
inline u64 next_skip(SkipState& state, const SkipParams& params) noexcept {
  state.s = schrage_mulmod(state.s, params.a(), params.q1(), params.q2(), params.q());
  return state.s;
}

/// a^k mod q.
u64 skip_power(const SkipParams& params, u64 k) noexcept;

/// Initial skips for Mv lanes spread evenly over the skip period:
/// element g is s0 * a^(g * floor((q-1)/Mv)) mod q.
std::vector<u64> lane_offset_seeds(const SkipParams& params, u64 s0, std::size_t lanes);

/// The multipliers a in {3, 6, 7, 10, 11}: the smallest primitive roots of
/// 2^63-25. Only accepted under Validation::test.
inline constexpr u64 kWeakMultipliers[] = {3, 6, 7, 10, 11};

/// Shipped restricted primitive roots of 2^63-25, all in (2^31, sqrt(q)].
std::span<const u64> default_multipliers() noexcept;

/// Factorization of 2^63-26, computed once.
const Factorization& skip_modulus_order_factors();

}  // namespace rsarand
