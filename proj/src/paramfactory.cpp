#include "rsarand/paramfactory.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsarand/error.hpp"
#include "rsarand/sieve.hpp"

namespace rsarand {

namespace {

constexpr u64 kSegmentBits = 24;
constexpr u64 kSegment = u64{1} << kSegmentBits;
constexpr u64 kSieveLimit = u64{1} << 32;
constexpr u64 kLowerStart = u64{1} << 31;
constexpr u64 kSqrtSkipModulus = 3037000499ULL;  // floor(sqrt(2^63 - 25))

// Cumulative count of safe primes in [2^31, 2^31 + (i+1)*2^24), capped at
// sqrt(q) for the final entry. Produced by tools/rsarand_tables.cpp and
// re-verified by tests/test_paramfactory.cpp.
constexpr u64 kLowerCheckpoints[] = {
    24570,   49416,   74140,   98888,   123724,  148361,  173229,  197823,  222353,
    246775,  271364,  295743,  320308,  344959,  369338,  393827,  418455,  442918,
    467449,  492123,  516612,  541124,  565509,  590113,  614580,  638940,  663291,
    687641,  711784,  736057,  760601,  784885,  809143,  833328,  857487,  881711,
    905796,  929967,  954253,  978144,  1002418, 1026522, 1050370, 1074676, 1098748,
    1122832, 1147033, 1171151, 1195273, 1219291, 1243355, 1267295, 1291390, 1291847,
};

constexpr std::size_t kMaxAdvance = 1024;

// Safe primes of aligned 2^24-wide segments below 2^32, sieved on demand.
class SegmentCache {
 public:
  using Segment = std::shared_ptr<const std::vector<std::uint32_t>>;

  Segment get(u64 index) {
    {
      std::shared_lock lock(mutex_);
      auto it = segments_.find(index);
      if (it != segments_.end()) return it->second;
    }
    // Sieve outside the lock so concurrent lookups of cached segments proceed.
    const u64 lo = index * kSegment;
    auto seg = std::make_shared<const std::vector<std::uint32_t>>(
        safe_primes_in(lo, std::min(lo + kSegment, kSieveLimit)));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = segments_.emplace(index, seg);
    if (inserted) {
      order_.push_back(index);
      if (order_.size() > kCapacity) {
        segments_.erase(order_.front());
        order_.pop_front();
      }
    }
    return it->second;
  }

 private:
  static constexpr std::size_t kCapacity = 80;
  std::shared_mutex mutex_;
  std::map<u64, Segment> segments_;
  std::deque<u64> order_;
};

SegmentCache& segment_cache() {
  static SegmentCache cache;
  return cache;
}

[[noreturn]] void not_found(u64 lo, u64 hi, u64 k) {
  throw Error(ErrorCode::not_found, "fewer than " + std::to_string(k + 1) + " safe primes in [" +
                                        std::to_string(lo) + ", " + std::to_string(hi) + ")");
}

void validate_index_map_cached(const IndexMap& map) {
  static const bool default_ok = (check_index_map(kDefaultIndexMap), true);
  (void)default_ok;
  if (map.a_count != kDefaultIndexMap.a_count || map.p1_count != kDefaultIndexMap.p1_count ||
      map.sigma != kDefaultIndexMap.sigma || map.epsilon != kDefaultIndexMap.epsilon) {
    check_index_map(map);
  }
}

}  // namespace

u64 nth_safe_prime_in(u64 lo, u64 hi, u64 k) {
  if (lo >= hi) throw Error(ErrorCode::invalid_argument, "nth_safe_prime_in requires lo < hi");
  u64 remaining = k;
  u64 pos = lo;
  // Sieved segments below 2^32.
  while (pos < hi && pos < kSieveLimit) {
    const u64 index = pos >> kSegmentBits;
    const auto seg = segment_cache().get(index);
    const u64 seg_end = std::min({(index + 1) * kSegment, hi, kSieveLimit});
    auto first = std::lower_bound(seg->begin(), seg->end(), pos);
    auto last = std::lower_bound(first, seg->end(), seg_end);
    const u64 available = static_cast<u64>(last - first);
    if (remaining < available) return first[remaining];
    remaining -= available;
    pos = seg_end;
  }
  // Above 2^32 candidates are tested one by one.
  for (u64 p = std::max(pos, u64{5}); p < hi; ++p) {
    if (is_safe_prime(p)) {
      if (remaining == 0) return p;
      --remaining;
    }
    if (p == ~u64{0}) break;
  }
  not_found(lo, hi, k);
}

std::optional<std::pair<u64, u64>> find_pair(u64 p1, u64 q, double tol) {
  if (p1 < 2 || tol < 0) return std::nullopt;
  const u64 bound = static_cast<u64>(std::floor(static_cast<long double>(tol) * q));
  const u64 center = q / p1;
  const u64 reach = bound / p1 + 2;
  auto acceptable = [&](u64 p2) {
    if (p2 <= kLowerStart || p2 >= kSieveLimit || p2 == p1) return false;
    const u128 n = static_cast<u128>(p1) * p2;
    const u128 diff = n > q ? n - q : q - n;
    return diff <= bound && is_safe_prime(p2);
  };
  for (u64 d = 0; d <= reach; ++d) {
    if (d <= center && acceptable(center - d)) return std::pair{p1, center - d};
    if (d != 0 && acceptable(center + d)) return std::pair{p1, center + d};
  }
  return std::nullopt;
}

void check_index_map(const IndexMap& map) {
  const u64 total = map.total();
  if (map.p1_count == 0 || map.a_count == 0)
    throw std::logic_error("stream index map: empty parameter space");
  if (gcd64(map.sigma % total, total) != 1)
    throw std::logic_error("stream index map: sigma is not coprime to N");
  if (total == 1) return;
  const Factorization f = factor64(total);
  u64 phi = 1;
  for (const auto& pp : f.factors) {
    if (pp.multiplicity != 1) throw std::logic_error("stream index map: N is not squarefree");
    phi *= pp.prime - 1;
  }
  if (gcd64(map.epsilon, phi) != 1)
    throw std::logic_error("stream index map: epsilon is not coprime to phi(N)");
}

u64 stream_index(const StreamKey& key, const IndexMap& map) {
  const u64 total = map.total();
  const u64 x = (key.master_seed % total + mulmod(key.stream_id % total, map.sigma, total)) % total;
  return powmod(x, map.epsilon, total);
}

u64 lower_safe_prime(u64 ordinal) {
  constexpr u64 count = std::size(kLowerCheckpoints);
  if (ordinal >= kLowerCheckpoints[count - 1])
    throw Error(ErrorCode::not_found, "safe-prime ordinal out of range");
  const auto it = std::upper_bound(std::begin(kLowerCheckpoints), std::end(kLowerCheckpoints), ordinal);
  const u64 seg = static_cast<u64>(it - std::begin(kLowerCheckpoints));
  const u64 before = seg == 0 ? 0 : kLowerCheckpoints[seg - 1];
  const auto primes = segment_cache().get((kLowerStart >> kSegmentBits) + seg);
  return (*primes)[ordinal - before];
}

GeneratorParams derive_stream_params(const StreamKey& key, u64 e, std::span<const u64> multipliers) {
  if (multipliers.empty())
    throw Error(ErrorCode::invalid_argument, "multiplier table must not be empty");
  IndexMap map = kDefaultIndexMap;
  map.a_count = multipliers.size();
  validate_index_map_cached(map);

  const u64 beta = stream_index(key, map);
  const u64 ordinal = beta % map.p1_count;
  const SkipParams skip = SkipParams::make(kSkipModulus, multipliers[beta / map.p1_count % map.a_count]);

  for (std::size_t attempt = 0; attempt < kMaxAdvance; ++attempt) {
    const u64 p1 = lower_safe_prime((ordinal + attempt) % map.p1_count);
    const auto pair = find_pair(p1, kSkipModulus, kModulusTolerance);
    if (!pair) continue;
    try {
      return GeneratorParams::make(p1, pair->second, e, skip);
    } catch (const InvalidParams& err) {
      // A prime dividing q-1 would break the period; move to the next p1.
      if (err.violation() != ParamViolation::modulus_gcd_q_minus_1 &&
          err.violation() != ParamViolation::modulus_gcd_q)
        throw;
    }
  }
  throw Error(ErrorCode::derivation_exhausted,
              "no safe-prime pair within tolerance after " + std::to_string(kMaxAdvance) +
                  " advances from ordinal " + std::to_string(ordinal));
}

}  // namespace rsarand
