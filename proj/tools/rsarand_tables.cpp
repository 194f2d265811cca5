// Regenerates the constant tables compiled into the library: the default
// skip multipliers and the safe-prime checkpoint counts used for ordinal
// lookup of p1. Maintainer tool; not part of the shipped CLI.

#include <cinttypes>
#include <algorithm>
#include <cstdio>
#include <string_view>
#include <vector>

#include "rsarand/numtheory.hpp"
#include "rsarand/sieve.hpp"
#include "rsarand/skipgen.hpp"

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kSqrtQ = 3037000499ULL;
constexpr std::uint64_t kLow = std::uint64_t{1} << 31;

void print_multipliers(std::size_t count) {
  const auto& factors = rsarand::skip_modulus_order_factors();
  std::printf("q-1 =");
  for (const auto& f : factors.factors) std::printf(" %" PRIu64 "^%u", f.prime, f.multiplicity);
  std::printf("\n");

  std::uint64_t state = 0x5eed0000ULL;
  std::size_t found = 0, tried = 0;
  std::printf("multipliers:\n");
  while (found < count) {
    const std::uint64_t span = kSqrtQ - kLow;
    std::uint64_t a = kLow + 1 + splitmix64(state) % span;
    a |= 1;
    if (a > kSqrtQ) continue;
    ++tried;
    if (rsarand::is_primitive_root(a, rsarand::kSkipModulus, factors)) {
      std::printf("    0x%" PRIx64 ",\n", a);
      ++found;
    }
  }
  std::printf("(%zu candidates tried)\n", tried);
}

void print_checkpoints(std::uint64_t segment) {
  std::printf("checkpoints (segment 0x%" PRIx64 "):\n", segment);
  std::uint64_t total = 0;
  for (std::uint64_t lo = kLow; lo <= kSqrtQ; lo += segment) {
    const std::uint64_t hi = std::min(lo + segment, kSqrtQ + 1);
    total += rsarand::safe_primes_in(lo, hi).size();
    std::printf("    %" PRIu64 ",\n", total);
  }
  std::printf("total safe primes in (2^31, sqrt q]: %" PRIu64 "\n", total);
}

}  // namespace

int main(int argc, char** argv) {
  const bool census = argc > 1 && std::string_view(argv[1]) == "--census";
  print_multipliers(13);
  print_checkpoints(std::uint64_t{1} << 24);
  if (census) {
    auto c = rsarand::count_primes_in(kLow, (std::uint64_t{1} << 32));
    std::printf("census [2^31, 2^32]: primes=%" PRIu64 " safe=%" PRIu64 "\n", c.primes,
                c.safe_primes);
  }
}
