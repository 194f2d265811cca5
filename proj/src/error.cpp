#include "rsarand/error.hpp"

namespace rsarand {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_params: return "invalid_params";
    case ErrorCode::invalid_seed: return "invalid_seed";
    case ErrorCode::not_invertible: return "not_invertible";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::derivation_exhausted: return "derivation_exhausted";
    case ErrorCode::unsupported_skip_mode: return "unsupported_skip_mode";
    case ErrorCode::malformed_snapshot: return "malformed_snapshot";
    case ErrorCode::insufficient_samples: return "insufficient_samples";
    case ErrorCode::tie_detected: return "tie_detected";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

const char* to_string(ParamViolation v) noexcept {
  switch (v) {
    case ParamViolation::none: return "none";
    case ParamViolation::prime_p1: return "prime_p1";
    case ParamViolation::prime_p2: return "prime_p2";
    case ParamViolation::equal_primes: return "equal_primes";
    case ParamViolation::prime_range: return "prime_range";
    case ParamViolation::modulus_product: return "modulus_product";
    case ParamViolation::exponent_gcd: return "exponent_gcd";
    case ParamViolation::exponent_range: return "exponent_range";
    case ParamViolation::modulus_gcd_q: return "modulus_gcd_q";
    case ParamViolation::modulus_gcd_q_minus_1: return "modulus_gcd_q_minus_1";
    case ParamViolation::period_constant_zero: return "period_constant_zero";
    case ParamViolation::modulus_tolerance: return "modulus_tolerance";
    case ParamViolation::crt_inverse: return "crt_inverse";
    case ParamViolation::skip_modulus: return "skip_modulus";
    case ParamViolation::skip_multiplier: return "skip_multiplier";
    case ParamViolation::skip_constant: return "skip_constant";
  }
  return "unknown";
}

}  // namespace rsarand
