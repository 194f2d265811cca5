#pragma once

// Exact 64-bit modular arithmetic and deterministic primality predicates.
// Every function here is pure and safe to call concurrently.

#include <cstdint>
#include <utility>
#include <vector>

namespace rsarand {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// (x * y) mod m via a 128-bit intermediate; exact for all 64-bit operands.
constexpr u64 mulmod(u64 x, u64 y, u64 m) noexcept {
  return static_cast<u64>(static_cast<u128>(x) * y % m);
}

/// b^e mod m by left-to-right square-and-multiply: floor(log2 e) squarings
/// plus popcount(e) - 1 multiplications. b^0 mod m is 1 mod m.
constexpr u64 powmod(u64 b, u64 e, u64 m) noexcept {
  if (e == 0) return 1 % m;
  b %= m;
  u64 result = b;
  int bit = 63 - __builtin_clzll(e);
  while (--bit >= 0) {
    result = mulmod(result, result, m);
    if ((e >> bit) & 1) result = mulmod(result, b, m);
  }
  return result;
}

u64 gcd64(u64 a, u64 b) noexcept;

/// Multiplicative inverse of a modulo m (m >= 2) by the extended Euclidean
/// algorithm. Throws Error(not_invertible) when gcd(a, m) != 1.
u64 modinv(u64 a, u64 m);

/// Strong probable-prime test of odd n >= 3 to base g in [2, n-2].
bool miller_rabin_base(u64 n, u64 g) noexcept;

/// Exact primality for every 64-bit n: trial division by the primes below
/// 100, then Miller-Rabin with bases {2,3,5,7,11} below 2^32 and the twelve
/// smallest prime bases above.
bool is_prime64(u64 n) noexcept;

/// p and (p-1)/2 both prime.
bool is_safe_prime(u64 p) noexcept;

struct PrimePower {
  u64 prime;
  unsigned multiplicity;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
  u64 value = 0;
  std::vector<PrimePower> factors;  // strictly increasing primes

  u64 product() const noexcept;
};

/// Complete factorization of n >= 2: trial division, then Brent's variant
/// of Pollard rho with deterministic restarts.
Factorization factor64(u64 n);

/// True iff a generates Z_p^*. The second overload reuses a precomputed
/// factorization of p-1.
bool is_primitive_root(u64 a, u64 p);
bool is_primitive_root(u64 a, u64 p, const Factorization& p_minus_1);

/// Primes below 100, used by the trial-division prefilter.
inline constexpr unsigned kSmallPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                            29, 31, 37, 41, 43, 47, 53, 59, 61,
                                            67, 71, 73, 79, 83, 89, 97};

}  // namespace rsarand
