#include "rsarand/sieve.hpp"

#include <algorithm>

#include "rsarand/error.hpp"

namespace rsarand {

namespace {

constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
constexpr std::uint64_t kChunk = std::uint64_t{1} << 21;  // numbers per chunk

std::vector<std::uint32_t> make_sieving_primes() {
  constexpr std::uint32_t n = 1u << 16;
  std::vector<std::uint8_t> composite(n, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint32_t i = 2; i < n; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint32_t j = i * i; j < n; j += i) composite[j] = 1;
  }
  return primes;
}

void check_range(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi || hi > kLimit)
    throw Error(ErrorCode::invalid_argument, "sieve range must satisfy lo <= hi <= 2^32");
}

std::uint64_t first_odd(std::uint64_t lo) { return lo | 1; }

bool flag_at(const std::vector<std::uint8_t>& flags, std::uint64_t base, std::uint64_t v) {
  return flags[(v - base) / 2] != 0;
}

}  // namespace

std::span<const std::uint32_t> sieving_primes() {
  static const std::vector<std::uint32_t> primes = make_sieving_primes();
  return primes;
}

void sieve_odd_range(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint8_t>& flags) {
  check_range(lo, hi);
  const std::uint64_t base = first_odd(lo);
  const std::uint64_t count = hi > base ? (hi - base + 1) / 2 : 0;
  flags.assign(count, 1);
  if (count == 0) return;

  for (std::uint32_t p : sieving_primes().subspan(1)) {
    const std::uint64_t pp = std::uint64_t{p} * p;
    if (pp >= hi) break;
    std::uint64_t start = std::max(pp, (base + p - 1) / p * p);
    if ((start & 1) == 0) start += p;
    for (std::uint64_t i = (start - base) / 2; i < count; i += p) flags[i] = 0;
  }
  // 1 is not prime; small primes below the first square are left marked.
  if (base == 1) flags[0] = 0;
}

std::vector<std::uint32_t> safe_primes_in(std::uint64_t lo, std::uint64_t hi) {
  check_range(lo, hi);
  std::vector<std::uint32_t> out;
  if (lo < 5) {
    for (std::uint32_t p : {5u, 7u})
      if (p >= lo && p < hi) out.push_back(p);
    lo = 8;
  }
  std::vector<std::uint8_t> upper, lower;
  for (std::uint64_t a = lo; a < hi; a += kChunk) {
    const std::uint64_t b = std::min(hi, a + kChunk);
    sieve_odd_range(a, b, upper);
    // Sophie Germain halves of the candidates in [a, b).
    const std::uint64_t half_lo = (a - 1) / 2, half_hi = (b - 1) / 2 + 1;
    sieve_odd_range(half_lo, half_hi, lower);
    const std::uint64_t ubase = first_odd(a), lbase = first_odd(half_lo);

    // Safe primes above 7 are 11 mod 12.
    std::uint64_t p = ubase + ((11 + 12 - ubase % 12) % 12);
    for (; p < b; p += 12) {
      if (flag_at(upper, ubase, p) && flag_at(lower, lbase, (p - 1) / 2))
        out.push_back(static_cast<std::uint32_t>(p));
    }
  }
  return out;
}

RangeCounts count_primes_in(std::uint64_t lo, std::uint64_t hi) {
  check_range(lo, hi);
  RangeCounts counts;
  if (lo <= 2 && hi > 2) ++counts.primes;
  std::vector<std::uint8_t> flags;
  for (std::uint64_t a = lo; a < hi; a += kChunk) {
    const std::uint64_t b = std::min(hi, a + kChunk);
    sieve_odd_range(a, b, flags);
    counts.primes += static_cast<std::uint64_t>(std::count(flags.begin(), flags.end(), 1));
  }
  counts.safe_primes = safe_primes_in(lo, hi).size();
  return counts;
}

}  // namespace rsarand
