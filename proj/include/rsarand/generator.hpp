#pragma once

// Single-stream generator: a message counter advanced by pseudorandom skips
// and encrypted with c = m^e mod n, n = p1*p2. The message is held as its
// residues mod p1 and mod p2 so every product fits in 64 bits; the cipher
// text is recombined with Garner's formula.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>

#include "rsarand/numtheory.hpp"
#include "rsarand/skipgen.hpp"

namespace rsarand {

/// Barrett reduction by a fixed modulus p < 2^32 for inputs below 2^64.
class Mod32 {
 public:
  Mod32() = default;
  explicit Mod32(u64 p) noexcept
      : p_(p), m_(static_cast<u64>((static_cast<u128>(1) << 64) / p)) {}

  u64 modulus() const noexcept { return p_; }

  u64 reduce(u64 x) const noexcept {
    const u64 q = static_cast<u64>((static_cast<u128>(x) * m_) >> 64);
    const u64 r = x - q * p_;
    return r >= p_ ? r - p_ : r;
  }

  /// x^e mod p for x < p and e >= 1, left-to-right binary.
  u64 pow(u64 x, u64 e, int top_bit) const noexcept {
    u64 r = x;
    for (int bit = top_bit - 1; bit >= 0; --bit) {
      r = reduce(r * r);
      if ((e >> bit) & 1) r = reduce(r * x);
    }
    return r;
  }

 private:
  u64 p_ = 1;
  u64 m_ = 0;
};

struct SkipMode {
  enum class Kind { lcg, unit, constant };

  Kind kind = Kind::lcg;
  u64 value = 0;  // the fixed skip for Kind::constant

  static constexpr SkipMode lcg() noexcept { return {Kind::lcg, 0}; }
  static constexpr SkipMode unit() noexcept { return {Kind::unit, 1}; }
  static constexpr SkipMode constant(u64 v) noexcept { return {Kind::constant, v}; }

  friend bool operator==(const SkipMode&, const SkipMode&) = default;
};

inline constexpr u64 kDefaultExponent = 9;
inline constexpr u64 kMinExponent = 3;
inline constexpr u64 kMaxExponent = 257;

/// Relative bound on |n - q| / q enforced for production parameters.
inline constexpr double kModulusTolerance = 1e-6;

class GeneratorParams {
 public:
  /// Builds and validates a parameter set; throws InvalidParams naming the
  /// first violated invariant. Test validation keeps the structural checks
  /// (distinct primes below 2^32, e >= 1, n coprime to q and q-1) and drops
  /// safe-prime, size, exponent-coprimality and |n-q| requirements.
  static GeneratorParams make(u64 p1, u64 p2, u64 e, const SkipParams& skip,
                              SkipMode mode = SkipMode::lcg(),
                              Validation validation = Validation::production);

  u64 p1() const noexcept { return mod1_.modulus(); }
  u64 p2() const noexcept { return mod2_.modulus(); }
  u64 n() const noexcept { return n_; }
  u64 e() const noexcept { return e_; }
  const SkipParams& skip() const noexcept { return skip_; }
  u64 p2inv() const noexcept { return p2inv_; }
  /// q(q-1)/2 mod n: the message increment over one full skip period.
  u64 b() const noexcept { return b_; }
  SkipMode skip_mode() const noexcept { return mode_; }
  Validation validation() const noexcept { return validation_; }

  GeneratorParams with_skip_mode(SkipMode mode) const;
  GeneratorParams with_skip(const SkipParams& skip) const;

  const Mod32& mod1() const noexcept { return mod1_; }
  const Mod32& mod2() const noexcept { return mod2_; }
  int exponent_top_bit() const noexcept { return top_bit_; }
  u64 fixed_skip1() const noexcept { return fixed1_; }
  u64 fixed_skip2() const noexcept { return fixed2_; }

  friend bool operator==(const GeneratorParams& x, const GeneratorParams& y) noexcept {
    return x.p1() == y.p1() && x.p2() == y.p2() && x.e_ == y.e_ && x.skip_ == y.skip_ &&
           x.mode_ == y.mode_ && x.validation_ == y.validation_;
  }

 private:
  GeneratorParams(u64 p1, u64 p2, u64 e, const SkipParams& skip, SkipMode mode,
                  Validation validation);

  Mod32 mod1_, mod2_;
  u64 n_;
  u64 e_;
  SkipParams skip_;
  u64 p2inv_;
  u64 b_;
  SkipMode mode_;
  Validation validation_;
  int top_bit_;
  u64 fixed1_ = 0, fixed2_ = 0;  // residues of the unit/constant skip
};

struct GeneratorState {
  u64 m1 = 0;  // message mod p1
  u64 m2 = 0;  // message mod p2
  SkipState skip;

  friend bool operator==(const GeneratorState& x, const GeneratorState& y) noexcept {
    return x.m1 == y.m1 && x.m2 == y.m2 && x.skip.s == y.skip.s;
  }
};

/// Initial state for message m0 and skip s0. Throws InvalidSeed when
/// s0 = 0 mod q.
GeneratorState init(const GeneratorParams& params, u64 m0 = 0, u64 s0 = 1);

/// Garner recombination of c1 = c mod p1 and c2 = c mod p2.
inline u64 garner(u64 c1, u64 c2, const GeneratorParams& params) noexcept {
  const Mod32& m1 = params.mod1();
  const u64 c2r = m1.reduce(c2);
  const u64 diff = c1 >= c2r ? c1 - c2r : c1 + m1.modulus() - c2r;
#ifdef RSARAND_INJECT_GARNER_FAULT
  return m1.reduce(diff * params.p2inv()) * params.p2() + c2 + 1;  // mutation-test build only
#else
  return m1.reduce(diff * params.p2inv()) * params.p2() + c2;
#endif
}

/// Advances the skip and message, then returns c = m^e mod n in [0, n).
inline u64 next_raw(GeneratorState& state, const GeneratorParams& params) noexcept {
  const Mod32& mod1 = params.mod1();
  const Mod32& mod2 = params.mod2();
  if (params.skip_mode().kind == SkipMode::Kind::lcg) {
    const u64 s = next_skip(state.skip, params.skip());
    state.m1 = mod1.reduce(state.m1 + s);
    state.m2 = mod2.reduce(state.m2 + s);
  } else {
    state.m1 += params.fixed_skip1();
    if (state.m1 >= mod1.modulus()) state.m1 -= mod1.modulus();
    state.m2 += params.fixed_skip2();
    if (state.m2 >= mod2.modulus()) state.m2 -= mod2.modulus();
  }
  const u64 c1 = mod1.pow(state.m1, params.e(), params.exponent_top_bit());
  const u64 c2 = mod2.pow(state.m2, params.e(), params.exponent_top_bit());
  return garner(c1, c2, params);
}

/// Largest double below 1.0.
inline constexpr double kBelowOne = 0x1.fffffffffffffp-1;

/// c/n rounded to the nearest double (ties to even). Requires c < n.
/// Forms c * 2^k / n with 62 to 64 significant bits plus a sticky bit for the
/// remainder, then rounds once.
inline double unit_quotient_exact(u64 c, u64 n) noexcept {
  if (c == 0) return 0.0;
  const int bc = 64 - __builtin_clzll(c);
  const int bn = 64 - __builtin_clzll(n);
  const int k = 63 - bc + bn;
  const u128 num = static_cast<u128>(c) << k;
  u64 q, rem;
#if defined(__x86_64__)
  __asm__("divq %4" : "=a"(q), "=d"(rem) : "a"(static_cast<u64>(num)), "d"(static_cast<u64>(num >> 64)), "r"(n));
#else
  q = static_cast<u64>(num / n);
  rem = static_cast<u64>(num % n);
#endif
  const int shift = (64 - __builtin_clzll(q)) - 53;
  u64 mant = q >> shift;
  const u64 rest = q & ((u64{1} << shift) - 1);
  const u64 half = u64{1} << (shift - 1);
  if (rest > half || (rest == half && (rem != 0 || (mant & 1)))) ++mant;
  return std::ldexp(static_cast<double>(mant), shift - k);
}

/// c/n rounded to the nearest double, clamped below 1.0.
inline double to_unit(u64 c, u64 n) noexcept {
#if defined(__x86_64__) && __LDBL_MANT_DIG__ == 64
  // Extended division is exact-input and rounds once to 64 bits; narrowing
  // to double can only go wrong when that lands on a double midpoint.
  const long double wide = static_cast<long double>(c) / static_cast<long double>(n);
  u64 bits;
  std::memcpy(&bits, &wide, sizeof bits);
  const double r = (bits & 0x7ff) == 0x400 ? unit_quotient_exact(c, n) : static_cast<double>(wide);
#else
  const double r = unit_quotient_exact(c, n);
#endif
  return r < 1.0 ? r : kBelowOne;
}

inline double next_f64(GeneratorState& state, const GeneratorParams& params) noexcept {
  return to_unit(next_raw(state, params), params.n());
}

/// c^d mod n with d = e^-1 mod (p1-1)(p2-1). Validation hook only; throws
/// Error(not_invertible) when e shares a factor with the totient.
u64 decrypt(u64 c, const GeneratorParams& params);

/// Advances the state by u*(q-1) draws in O(1): the skip returns to itself
/// and the message gains u*b. Throws Error(unsupported_skip_mode) unless
/// the skip mode is lcg.
GeneratorState jump_periods(const GeneratorState& state, const GeneratorParams& params, u64 u);

/// Params plus state plus a draw counter.
class Generator {
 public:
  explicit Generator(const GeneratorParams& params, u64 m0 = 0, u64 s0 = 1)
      : params_(params), state_(init(params, m0, s0)) {}
  Generator(const GeneratorParams& params, const GeneratorState& state, u64 count)
      : params_(params), state_(state), count_(count) {}

  u64 next_raw() noexcept {
    ++count_;
    return rsarand::next_raw(state_, params_);
  }
  double next_f64() noexcept { return to_unit(next_raw(), params_.n()); }

  void fill_raw(std::span<u64> out) noexcept {
    for (auto& v : out) v = rsarand::next_raw(state_, params_);
    count_ += out.size();
  }
  void fill_f64(std::span<double> out) noexcept {
    for (auto& v : out) v = to_unit(rsarand::next_raw(state_, params_), params_.n());
    count_ += out.size();
  }

  const GeneratorParams& params() const noexcept { return params_; }
  const GeneratorState& state() const noexcept { return state_; }
  u64 count() const noexcept { return count_; }

 private:
  GeneratorParams params_;
  GeneratorState state_;
  u64 count_ = 0;
};

}  // namespace rsarand
