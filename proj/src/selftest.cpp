#include "rsarand/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "rsarand/error.hpp"
#include "rsarand/paramfactory.hpp"

namespace rsarand {

namespace {

struct Failure {
  std::string detail;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

void miniature_period() {
  const auto skip = SkipParams::make(13, 2, Validation::test);
  const auto params = GeneratorParams::make(11, 23, 3, skip, SkipMode::lcg(), Validation::test);
  const GeneratorState start = init(params);
  GeneratorState st = start;
  std::vector<u64> seen(params.n(), 0);
  const u64 period = 12 * 253;
  for (u64 k = 1; k <= period; ++k) {
    const u64 c = next_raw(st, params);
    expect(c < params.n(), "ciphertext " + std::to_string(c) + " out of range");
    ++seen[c];
    if (k < period) expect(!(st == start), "state recurred after " + std::to_string(k) + " draws");
  }
  expect(st == start, "state did not recur after 3036 draws");
  for (u64 c = 0; c < params.n(); ++c)
    expect(seen[c] == 12, "ciphertext " + std::to_string(c) + " appeared " + std::to_string(seen[c]) + " times");
}

void bijectivity() {
  const auto skip = SkipParams::make(13, 2, Validation::test);
  const auto params = GeneratorParams::make(11, 23, 3, skip, SkipMode::lcg(), Validation::test);
  std::vector<bool> hit(params.n(), false);
  for (u64 m = 0; m < params.n(); ++m) {
    const u64 c = powmod(m, 3, params.n());
    expect(!hit[c], "m^3 mod 253 is not injective at m=" + std::to_string(m));
    hit[c] = true;
    expect(powmod(c, 147, params.n()) == m, "(m^3)^147 != m at m=" + std::to_string(m));
    expect(decrypt(c, params) == m, "decrypt failed at m=" + std::to_string(m));
  }
}

void crt_equivalence() {
  const auto params = derive_stream_params({0, 0});
  GeneratorState st = init(params);
  const u64 n = params.n(), q = params.skip().q(), a = params.skip().a();
  u64 m = 0, s = 1;
  for (int k = 0; k < 1'000'000; ++k) {
    s = mulmod(a, s, q);
    m = static_cast<u64>((static_cast<u128>(m) + s) % n);
    const u64 expected = powmod(m, params.e(), n);
    const u64 got = next_raw(st, params);
    expect(got == expected, "draw " + std::to_string(k) + ": CRT path gave " + std::to_string(got) +
                                ", direct exponentiation " + std::to_string(expected));
  }
}

void schrage_equivalence() {
  const auto small = SkipParams::make(13, 2, Validation::test);
  for (u64 s = 1; s < 13; ++s) {
    SkipState st{s};
    expect(next_skip(st, small) == s * 2 % 13, "q=13 a=2 s=" + std::to_string(s));
    expect(schrage_mulmod(s, 3, 4, 1, 13) == s * 3 % 13, "q=13 a=3 s=" + std::to_string(s));
  }
  std::mt19937_64 rng(20240601);
  for (u64 a : default_multipliers()) {
    const auto params = SkipParams::make(kSkipModulus, a);
    std::uniform_int_distribution<u64> dist(1, kSkipModulus - 1);
    for (int k = 0; k < 1'000'000; ++k) {
      SkipState st{dist(rng)};
      const u64 expected = mulmod(a, st.s, kSkipModulus);
      expect(next_skip(st, params) == expected, "a=" + std::to_string(a) + " s mismatch");
    }
  }
}

bool trial_division(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void primality() {
  for (u64 n = 0; n <= 1'000'000; ++n)
    expect(is_prime64(n) == trial_division(n), "is_prime64 disagrees with trial division at " + std::to_string(n));
  expect(is_prime64(kSkipModulus), "2^63-25 not reported prime");
  expect(!is_prime64(3215031751ULL), "3215031751 reported prime");
}

struct Suite {
  const char* name;
  void (*run)();
};

constexpr Suite kSuites[] = {
    {"miniature-period", miniature_period}, {"bijectivity", bijectivity},
    {"crt-equivalence", crt_equivalence},   {"schrage-equivalence", schrage_equivalence},
    {"primality", primality},
};

}  // namespace

std::vector<std::string> selftest_suites() {
  std::vector<std::string> names;
  for (const auto& s : kSuites) names.emplace_back(s.name);
  return names;
}

std::vector<SuiteResult> run_selftest(const std::vector<std::string>& suites,
                                      const std::function<void(const SuiteResult&)>& progress) {
  for (const auto& name : suites) {
    const auto all = selftest_suites();
    if (std::find(all.begin(), all.end(), name) == all.end())
      throw Error(ErrorCode::invalid_argument, "unknown selftest suite '" + name + "'");
  }
  std::vector<SuiteResult> results;
  for (const auto& suite : kSuites) {
    if (!suites.empty() && std::find(suites.begin(), suites.end(), suite.name) == suites.end()) continue;
    SuiteResult r{suite.name, true, "ok", 0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      suite.run();
    } catch (const Failure& f) {
      r.passed = false;
      r.detail = f.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) progress(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace rsarand
