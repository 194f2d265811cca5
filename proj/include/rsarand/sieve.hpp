#pragma once

// Segmented Eratosthenes sieve over 32-bit ranges, used to enumerate primes
// and safe primes in bulk.

#include <cstdint>
#include <span>
#include <vector>

namespace rsarand {

/// Primes below 2^16, enough to sieve any range below 2^32.
std::span<const std::uint32_t> sieving_primes();

/// Marks the odd numbers of [lo, hi) that are prime. flags[i] refers to the
/// odd number first_odd(lo) + 2*i. Requires hi <= 2^32.
void sieve_odd_range(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint8_t>& flags);

struct RangeCounts {
  std::uint64_t primes = 0;
  std::uint64_t safe_primes = 0;
};

/// Safe primes in [lo, hi), ascending. Requires hi <= 2^32.
std::vector<std::uint32_t> safe_primes_in(std::uint64_t lo, std::uint64_t hi);

/// Counts primes and safe primes in [lo, hi) chunk by chunk. Requires hi <= 2^32.
RangeCounts count_primes_in(std::uint64_t lo, std::uint64_t hi);

}  // namespace rsarand
