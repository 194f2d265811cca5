#include "rsarand/numtheory.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "rsarand/error.hpp"

namespace rsarand {

u64 gcd64(u64 a, u64 b) noexcept {
  while (b != 0) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u64 modinv(u64 a, u64 m) {
  if (m < 2) throw Error(ErrorCode::invalid_argument, "modinv: modulus must be >= 2");
  // Bezout coefficients tracked as signed 128-bit so no intermediate wraps.
  __int128 r0 = m, r1 = a % m;
  __int128 t0 = 0, t1 = 1;
  while (r1 != 0) {
    __int128 q = r0 / r1;
    __int128 r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    __int128 t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  if (r0 != 1) {
    throw Error(ErrorCode::not_invertible,
                "modinv: " + std::to_string(a) + " is not invertible mod " + std::to_string(m));
  }
  if (t0 < 0) t0 += m;
  return static_cast<u64>(t0);
}

bool miller_rabin_base(u64 n, u64 g) noexcept {
  u64 t = n - 1;
  int u = __builtin_ctzll(t);
  t >>= u;
  u64 x = powmod(g, t, n);
  if (x == 1 || x == n - 1) return true;
  for (int j = 1; j < u; ++j) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
    if (x == 1) return false;
  }
  return false;
}

bool is_prime64(u64 n) noexcept {
  if (n < 2) return false;
  for (unsigned p : kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  // No factor below 100, so anything below 100^2 is prime.
  if (n < 10000) return true;

  static constexpr std::array<u64, 5> kBases32{2, 3, 5, 7, 11};
  static constexpr std::array<u64, 12> kBases64{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (n < (u64{1} << 32)) {
    return std::all_of(kBases32.begin(), kBases32.end(),
                       [n](u64 g) { return miller_rabin_base(n, g); });
  }
  return std::all_of(kBases64.begin(), kBases64.end(),
                     [n](u64 g) { return miller_rabin_base(n, g); });
}

bool is_safe_prime(u64 p) noexcept {
  if (p < 5) return false;
  // Safe primes above 7 are 11 mod 12; cheap rejection before the heavy tests.
  if (p > 7 && p % 12 != 11) return false;
  return is_prime64(p) && is_prime64((p - 1) / 2);
}

u64 Factorization::product() const noexcept {
  u64 v = 1;
  for (const auto& f : factors)
    for (unsigned i = 0; i < f.multiplicity; ++i) v *= f.prime;
  return v;
}

namespace {

// Brent's cycle detection with batched gcd. Returns a nontrivial factor of
// the odd composite n, or n when this polynomial constant failed.
u64 brent_rho(u64 n, u64 c) {
  constexpr u64 kBatch = 128;
  auto f = [n, c](u64 x) {
    u64 y = mulmod(x, x, n) + c;
    return y >= n || y < c ? y - n : y;
  };
  u64 y = 2, x = 2, ys = 2, q = 1, g = 1;
  for (u64 r = 1; g == 1; r <<= 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = f(y);
    for (u64 k = 0; k < r && g == 1; k += kBatch) {
      ys = y;
      for (u64 i = 0; i < std::min(kBatch, r - k); ++i) {
        y = f(y);
        q = mulmod(q, x > y ? x - y : y - x, n);
      }
      g = gcd64(q, n);
    }
    if (r > (u64{1} << 40)) break;
  }
  if (g == n) {
    // Batch overshot; step back one element at a time.
    do {
      ys = f(ys);
      g = gcd64(x > ys ? x - ys : ys - x, n);
    } while (g == 1);
  }
  return g;
}

void factor_into(u64 n, std::map<u64, unsigned>& out) {
  if (n == 1) return;
  if (is_prime64(n)) {
    ++out[n];
    return;
  }
  for (u64 c = 1;; ++c) {
    u64 d = brent_rho(n, c);
    if (d != n && d != 1) {
      factor_into(d, out);
      factor_into(n / d, out);
      return;
    }
  }
}

}  // namespace

Factorization factor64(u64 n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "factor64: n must be >= 2");
  std::map<u64, unsigned> counts;
  u64 rest = n;
  for (u64 p = 2; p < 1000 && p * p <= rest; p += (p == 2 ? 1 : 2)) {
    while (rest % p == 0) {
      ++counts[p];
      rest /= p;
    }
  }
  if (rest > 1) factor_into(rest, counts);

  Factorization result{n, {}};
  result.factors.reserve(counts.size());
  for (auto [prime, mult] : counts) result.factors.push_back({prime, mult});
  return result;
}

bool is_primitive_root(u64 a, u64 p, const Factorization& p_minus_1) {
  if (p < 2 || a == 0 || a >= p) return false;
  if (p == 2) return a == 1;
  for (const auto& f : p_minus_1.factors) {
    if (powmod(a, (p - 1) / f.prime, p) == 1) return false;
  }
  return true;
}

bool is_primitive_root(u64 a, u64 p) {
  if (p < 3) return p == 2 && a == 1;
  return is_primitive_root(a, p, factor64(p - 1));
}

}  // namespace rsarand
