#pragma once

#include <stdexcept>
#include <string>

namespace rsarand {

enum class ErrorCode {
  invalid_argument,
  invalid_params,
  invalid_seed,
  not_invertible,
  not_found,
  derivation_exhausted,
  unsupported_skip_mode,
  malformed_snapshot,
  insufficient_samples,
  tie_detected,
  io,
};

const char* to_string(ErrorCode code) noexcept;

/// Which generator-parameter invariant a configuration violated.
enum class ParamViolation {
  none,
  prime_p1,
  prime_p2,
  equal_primes,
  prime_range,
  modulus_product,
  exponent_gcd,
  exponent_range,
  modulus_gcd_q,
  modulus_gcd_q_minus_1,
  period_constant_zero,
  modulus_tolerance,
  crt_inverse,
  skip_modulus,
  skip_multiplier,
  skip_constant,
};

const char* to_string(ParamViolation v) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidParams : public Error {
 public:
  InvalidParams(ParamViolation violation, const std::string& what)
      : Error(ErrorCode::invalid_params, what), violation_(violation) {}

  ParamViolation violation() const noexcept { return violation_; }

 private:
  ParamViolation violation_;
};

}  // namespace rsarand
