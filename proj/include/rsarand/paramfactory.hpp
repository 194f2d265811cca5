#pragma once

// Deterministic per-stream parameters. A stream key (master seed t, stream
// id alpha) is mapped to an index beta = (t + alpha*sigma)^eps mod N over
// N = N_p1 * N_a, which selects p1 among the safe primes of (2^31, sqrt(q)]
// and the multiplier among the shipped table. p2 is then the safe prime
// that puts n = p1*p2 closest to q.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "rsarand/generator.hpp"

namespace rsarand {

struct StreamKey {
  u64 master_seed = 0;
  u64 stream_id = 0;
};

/// k-th (from 0) safe prime >= lo and < hi. Throws Error(not_found) when
/// fewer than k+1 exist.
u64 nth_safe_prime_in(u64 lo, u64 hi, u64 k);

/// Safe prime p2 nearest floor(q/p1) with |p1*p2 - q| <= tol*q, p2 != p1 and
/// 2^31 < p2 < 2^32. Ties go to the smaller candidate.
std::optional<std::pair<u64, u64>> find_pair(u64 p1, u64 q = kSkipModulus,
                                             double tol = kModulusTolerance);

/// Constants of the stream index map. The defaults are fixed for the
/// shipped multiplier table; derive_stream_params checks them on use.
struct IndexMap {
  u64 p1_count;     // N_p1: safe primes in (2^31, floor(sqrt(q))]
  u64 a_count;      // N_a
  u64 sigma;        // coprime to N
  u64 epsilon;      // coprime to phi(N), N squarefree
  u64 total() const noexcept { return p1_count * a_count; }
};

inline constexpr IndexMap kDefaultIndexMap{1'291'847, 13, 10'379'270, 7};

/// Throws std::logic_error unless sigma is coprime to N, N is squarefree and
/// epsilon is coprime to phi(N), i.e. unless beta is a bijection of Z_N.
void check_index_map(const IndexMap& map);

/// beta for a stream key.
u64 stream_index(const StreamKey& key, const IndexMap& map = kDefaultIndexMap);

/// The p1 candidate of ordinal k among the safe primes of (2^31, sqrt(q)].
u64 lower_safe_prime(u64 ordinal);

/// Pure derivation of production parameters for a stream. Multipliers must
/// be restricted primitive roots of 2^63-25; the table size must match the
/// index map. Throws Error(derivation_exhausted) if no pair is found after a
/// bounded number of ordinal advances.
GeneratorParams derive_stream_params(const StreamKey& key, u64 e = kDefaultExponent,
                                     std::span<const u64> multipliers = default_multipliers());

}  // namespace rsarand
