#include "rsarand/generator.hpp"

#include <string>

#include "rsarand/error.hpp"

namespace rsarand {

namespace {

std::string num(u64 v) { return std::to_string(v); }

void require(bool ok, ParamViolation v, const std::string& what) {
  if (!ok) throw InvalidParams(v, "invalid generator parameters: " + what);
}

bool within_tolerance(u64 n, u64 q) {
  const u64 diff = n > q ? n - q : q - n;
  // diff <= 1e-6 * q, exactly.
  return static_cast<u128>(diff) * 1'000'000 <= q;
}

}  // namespace

GeneratorParams::GeneratorParams(u64 p1, u64 p2, u64 e, const SkipParams& skip, SkipMode mode,
                                 Validation validation)
    : mod1_(p1),
      mod2_(p2),
      n_(p1 * p2),
      e_(e),
      skip_(skip),
      p2inv_(modinv(p2 % p1, p1)),
      b_(mulmod(skip.q(), (skip.q() - 1) / 2, p1 * p2)),
      mode_(mode),
      validation_(validation),
      top_bit_(63 - __builtin_clzll(e)) {
  if (mode.kind != SkipMode::Kind::lcg) {
    fixed1_ = mode.value % p1;
    fixed2_ = mode.value % p2;
  }
}

GeneratorParams GeneratorParams::make(u64 p1, u64 p2, u64 e, const SkipParams& skip,
                                      SkipMode mode, Validation validation) {
  const bool production = validation == Validation::production;
  constexpr u64 k31 = u64{1} << 31, k32 = u64{1} << 32;

  require(p1 < k32 && is_prime64(p1), ParamViolation::prime_p1, "p1=" + num(p1) + " is not a prime below 2^32");
  require(p2 < k32 && is_prime64(p2), ParamViolation::prime_p2, "p2=" + num(p2) + " is not a prime below 2^32");
  require(p1 != p2, ParamViolation::equal_primes, "p1 and p2 must differ");
  if (production) {
    require(is_safe_prime(p1), ParamViolation::prime_p1, "p1=" + num(p1) + " is not a safe prime");
    require(is_safe_prime(p2), ParamViolation::prime_p2, "p2=" + num(p2) + " is not a safe prime");
    require(p1 > k31 && p2 > k31, ParamViolation::prime_range, "p1 and p2 must lie in (2^31, 2^32)");
  }
  const u64 n = p1 * p2;
  require(e >= 1, ParamViolation::exponent_range, "exponent must be >= 1");
  if (production) {
    const u64 totient = (p1 - 1) * (p2 - 1);
    require(gcd64(e, totient) == 1, ParamViolation::exponent_gcd,
            "exponent e=" + num(e) + " shares a factor with (p1-1)(p2-1)");
    require(e % 2 == 1 && e >= kMinExponent && e <= kMaxExponent, ParamViolation::exponent_range,
            "exponent e=" + num(e) + " must be odd and in [3, 257]");
  }
  const u64 q = skip.q();
  require(gcd64(n, q) == 1, ParamViolation::modulus_gcd_q, "gcd(n, q) != 1");
  require(gcd64(n, q - 1) == 1, ParamViolation::modulus_gcd_q_minus_1, "gcd(n, q-1) != 1");
  require(mulmod(q, (q - 1) / 2, n) != 0, ParamViolation::period_constant_zero, "q(q-1)/2 = 0 mod n");
  if (production) {
    require(within_tolerance(n, q), ParamViolation::modulus_tolerance,
            "|n - q| exceeds 1e-6 q for n=" + num(n));
    require(skip.a() > k31, ParamViolation::skip_multiplier,
            "multiplier a=" + num(skip.a()) + " is outside (2^31, sqrt(q)]");
  }
  if (mode.kind == SkipMode::Kind::constant) {
    require(mode.value >= 1 && mode.value < n, ParamViolation::skip_constant,
            "constant skip must lie in [1, n)");
  }
  if (mode.kind == SkipMode::Kind::unit) mode.value = 1;

  GeneratorParams params(p1, p2, e, skip, mode, validation);
  require(mulmod(p2, params.p2inv_, p1) == 1, ParamViolation::crt_inverse, "p2^-1 mod p1 is wrong");
  return params;
}

GeneratorParams GeneratorParams::with_skip_mode(SkipMode mode) const {
  return make(p1(), p2(), e_, skip_, mode, validation_);
}

GeneratorParams GeneratorParams::with_skip(const SkipParams& skip) const {
  return make(p1(), p2(), e_, skip, mode_, validation_);
}

GeneratorState init(const GeneratorParams& params, u64 m0, u64 s0) {
  const u64 q = params.skip().q();
  if (s0 % q == 0) throw Error(ErrorCode::invalid_seed, "initial skip s0 must be nonzero mod q");
  GeneratorState st;
  st.m1 = m0 % params.p1();
  st.m2 = m0 % params.p2();
  st.skip.s = s0 % q;
  return st;
}

u64 decrypt(u64 c, const GeneratorParams& params) {
  const u64 totient = (params.p1() - 1) * (params.p2() - 1);
  const u64 d = modinv(params.e(), totient);
  return powmod(c, d, params.n());
}

GeneratorState jump_periods(const GeneratorState& state, const GeneratorParams& params, u64 u) {
  if (params.skip_mode().kind != SkipMode::Kind::lcg) {
    throw Error(ErrorCode::unsupported_skip_mode,
                "jump_periods requires the lcg skip mode; unit and constant skips advance m by k*s");
  }
  const u64 shift = mulmod(u % params.n(), params.b(), params.n());
  GeneratorState out = state;
  out.m1 = params.mod1().reduce(state.m1 + params.mod1().reduce(shift));
  out.m2 = params.mod2().reduce(state.m2 + params.mod2().reduce(shift));
  return out;
}

}  // namespace rsarand
