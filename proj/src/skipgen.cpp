#include "rsarand/skipgen.hpp"

#include <algorithm>
#include <string>

#include "rsarand/error.hpp"

namespace rsarand {

namespace {

// Odd candidates drawn from splitmix64(0x5eed0000) in (2^31, floor(sqrt(q))]
// and kept when they are primitive roots mod 2^63-25. Regenerated and
// re-verified by tests/test_skipgen.cpp; tools/rsarand_tables.cpp prints them.
constexpr u64 kDefaultMultipliers[] = {
    0x850abeaf, 0x9184c209, 0x9042ad03, 0xa8cf1bdd, 0x966b3287, 0x811d2177, 0x8ef6cf71,
    0x973fe0cb, 0xaea4d391, 0x9bda40f7, 0x9fafca65, 0xadabb07b, 0x824011cf,
};


}  // namespace

SkipParams SkipParams::make(u64 q, u64 a, Validation validation) {
  if (q < 3 || q >= (u64{1} << 63) || !is_prime64(q)) {
    throw InvalidParams(ParamViolation::skip_modulus,
                        "skip modulus q=" + std::to_string(q) + " must be a prime below 2^63");
  }
  if (a < 2 || a >= q || static_cast<u128>(a) * a > q) {
    throw InvalidParams(ParamViolation::skip_multiplier,
                        "skip multiplier a=" + std::to_string(a) + " must satisfy a^2 <= q");
  }
  if (validation == Validation::production && a <= (u64{1} << 31)) {
    throw InvalidParams(ParamViolation::skip_multiplier,
                        "skip multiplier a=" + std::to_string(a) +
                            " is outside (2^31, sqrt(q)]; small multipliers need test mode");
  }
  const bool primitive = q == kSkipModulus ? is_primitive_root(a, q, skip_modulus_order_factors())
                                           : is_primitive_root(a, q);
  if (!primitive) {
    throw InvalidParams(ParamViolation::skip_multiplier,
                        "skip multiplier a=" + std::to_string(a) + " is not a primitive root mod " +
                            std::to_string(q));
  }
  return SkipParams(q, a);
}

u64 skip_power(const SkipParams& params, u64 k) noexcept { return powmod(params.a(), k, params.q()); }

std::vector<u64> lane_offset_seeds(const SkipParams& params, u64 s0, std::size_t lanes) {
  if (lanes == 0) throw Error(ErrorCode::invalid_argument, "lane count must be >= 1");
  const u64 q = params.q();
  if (s0 % q == 0) throw Error(ErrorCode::invalid_seed, "initial skip must be nonzero mod q");
  const u64 stride = (q - 1) / lanes;
  std::vector<u64> seeds(lanes);
  for (std::size_t g = 0; g < lanes; ++g) {
    seeds[g] = mulmod(s0 % q, skip_power(params, g * stride), q);
  }
  return seeds;
}

std::span<const u64> default_multipliers() noexcept { return kDefaultMultipliers; }

const Factorization& skip_modulus_order_factors() {
  static const Factorization factors = factor64(kSkipModulus - 1);
  return factors;
}

}  // namespace rsarand
