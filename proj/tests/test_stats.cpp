#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracle.hpp"
#include "rsarand/error.hpp"
#include "rsarand/paramfactory.hpp"
#include "rsarand/stats.hpp"

using namespace rsarand;
using namespace rsarand::stats;

namespace {

/// 53-bit uniform doubles from a fixed-seed Mersenne twister.
FunctionSource mt_source(u64 seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return FunctionSource([rng] { return static_cast<double>((*rng)() >> 11) * 0x1p-53; });
}

std::vector<double> mt_values(u64 seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(count);
  for (auto& x : v) x = static_cast<double>(rng() >> 11) * 0x1p-53;
  return v;
}

double pearson(const std::vector<u64>& counts, double expected_each) {
  double s = 0;
  for (u64 c : counts) s += (c - expected_each) * (c - expected_each) / expected_each;
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io;
}

}  // namespace

TEST(Stats, ChiSquarePValueMatchesClosedForms) {
  for (unsigned k = 1; k <= 60; ++k) {
    for (double x : {0.01, 0.5, 1.0, 3.3, 10.0, 25.0, 60.0, 120.0}) {
      const long double want = oracle::chi2_upper(x, k);
      const double got = chi2_pvalue(x, k);
      ASSERT_NEAR(got / static_cast<double>(want), 1.0, 1e-10) << "k=" << k << " x=" << x;
    }
  }
  for (double x : {0.0, 0.1, 2.0, 20.0, 200.0}) EXPECT_NEAR(chi2_pvalue(x, 2), std::exp(-x / 2), 1e-12);
  EXPECT_EQ(chi2_pvalue(0.0, 5), 1.0);
}

TEST(Stats, ChiSquareStatistic) {
  const std::vector<u64> obs = {10, 20, 30};
  const std::vector<double> exp = {20, 20, 20};
  const ChiSquareResult r = chi_square(obs, exp);
  EXPECT_DOUBLE_EQ(r.statistic, 10.0);
  EXPECT_EQ(r.dof, 2u);
  EXPECT_NEAR(r.p_value, std::exp(-5.0), 1e-12);
  EXPECT_EQ(chi_square(obs, exp, 2).dof, 1u);
}

TEST(Stats, MergeCells) {
  const std::vector<u64> obs = {1, 2, 3, 4, 5};
  const std::vector<double> exp = {5, 5, 5, 5, 5};
  const MergedCells m = merge_cells(obs, exp, 10);
  EXPECT_EQ(m.observed, (std::vector<u64>{3, 12}));
  EXPECT_EQ(m.expected, (std::vector<double>{10, 15}));
  const MergedCells same = merge_cells(obs, exp, 1);
  EXPECT_EQ(same.observed, obs);
}

TEST(Stats, Selectors) {
  EXPECT_EQ(select_value(u64{1}, 77, Selector::raw_low_bits), 0.5);
  EXPECT_EQ(select_value(u64{0x80000000}, ~u64{0}, Selector::raw_low_bits), 0x1p-32);
  EXPECT_EQ(select_value(u64{1}, 77, Selector::raw_word), 0x1p-32);
  EXPECT_EQ(select_value((u64{5} << 32) | 3, ~u64{0}, Selector::raw_word), 3 * 0x1p-32);
  EXPECT_EQ(select_value(u64{38}, 77, Selector::float_leading), 38.0 / 77.0);
  EXPECT_EQ(select_value(0.25, Selector::float_leading), 0.25);
  EXPECT_EQ(select_value(0x1p-53, Selector::raw_word), 0x1p-32);
}

TEST(Stats, PokerCountsMatchEnumeration) {
  std::array<u64, 5> counts{};
  for (unsigned h = 0; h < (1u << 20); ++h) {
    unsigned seen = 0;
    for (int k = 0; k < 5; ++k) seen |= 1u << ((h >> (4 * k)) & 15);
    ++counts[std::popcount(seen) - 1];
  }
  EXPECT_EQ(poker_hand_counts(), counts);
  EXPECT_EQ(counts, (std::array<u64, 5>{16, 3600, 84000, 436800, 524160}));
}

TEST(Stats, CollisionDistributionMatchesBruteForce) {
  for (auto [balls, urns] : {std::pair<u64, u64>{5, 4}, {6, 6}, {4, 10}, {7, 3}, {1, 1}}) {
    std::vector<double> want(balls + 1, 0.0);
    u64 total = 1;
    for (u64 i = 0; i < balls; ++i) total *= urns;
    for (u64 code = 0; code < total; ++code) {
      std::set<u64> used;
      u64 c = code;
      for (u64 i = 0; i < balls; ++i, c /= urns) used.insert(c % urns);
      want[balls - used.size()] += 1.0 / static_cast<double>(total);
    }
    const auto& got = collision_distribution(balls, urns);
    for (std::size_t c = 0; c < want.size(); ++c)
      EXPECT_NEAR(c < got.size() ? got[c] : 0.0, want[c], 1e-12) << balls << "/" << urns << " c=" << c;
  }
}

TEST(Stats, DefaultCollisionDistribution) {
  const auto& p = collision_distribution();
  double sum = 0, mean = 0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    sum += p[c];
    mean += c * p[c];
  }
  const double m = kCollisionUrns, n = kCollisionBalls;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(mean, n - m * (1 - std::pow(1 - 1 / m, n)), 1e-6);
}

TEST(Stats, MaxOfTEdges) {
  const auto e = max_of_t_edges();
  ASSERT_EQ(e.size(), kMaxOfTBins + 1u);
  EXPECT_EQ(e.front(), 0.0);
  EXPECT_EQ(e.back(), 1.0);
  for (unsigned j = 1; j <= kMaxOfTBins; ++j) {
    EXPECT_GT(e[j], e[j - 1]);
    EXPECT_NEAR(std::pow(e[j], kMaxOfT), static_cast<double>(j) / kMaxOfTBins, 1e-13);
  }
}

TEST(Stats, PermutationRank) {
  std::vector<double> v = {0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(permutation_rank(v), 0u);
  std::set<u64> ranks;
  do ranks.insert(permutation_rank(v));
  while (std::next_permutation(v.begin(), v.end()));
  EXPECT_EQ(ranks.size(), 24u);
  EXPECT_EQ(*ranks.rbegin(), 23u);
  const std::vector<double> desc = {9, 8, 7, 6, 5, 4, 3, 2, 1, 0};
  EXPECT_EQ(permutation_rank(desc), 3628799u);
  const std::vector<double> tie = {0.3, 0.1, 0.3};
  EXPECT_EQ(code_of([&] { permutation_rank(tie); }), ErrorCode::tie_detected);
}

TEST(Stats, FourierMatchesNaiveDftAndParseval) {
  constexpr std::size_t M = 64;
  std::mt19937_64 rng(51);
  std::vector<std::complex<double>> x(M);
  for (auto& z : x) z = {static_cast<double>(rng() % 1000) / 1000 - 0.5, static_cast<double>(rng() % 1000) / 1000};
  const auto X = fourier_coefficients(x);
  ASSERT_EQ(X.size(), M);
  double ex = 0, eX = 0;
  for (std::size_t k = 0; k < M; ++k) {
    std::complex<double> s = 0;
    for (std::size_t j = 0; j < M; ++j) s += x[j] * std::polar(1.0, 2 * std::numbers::pi * j * k / M);
    s /= std::sqrt(static_cast<double>(M));
    EXPECT_NEAR(std::abs(X[k] - s), 0.0, 1e-12);
    ex += std::norm(x[k]);
    eX += std::norm(X[k]);
  }
  EXPECT_NEAR(ex, eX, 1e-10);
  std::vector<std::complex<double>> tone(M);
  for (std::size_t j = 0; j < M; ++j) tone[j] = std::polar(1.0, -2 * std::numbers::pi * j * 5 / M);
  EXPECT_NEAR(std::abs(fourier_coefficients(tone)[5] - std::sqrt(64.0)), 0.0, 1e-12);
}

TEST(Stats, SerialAxisBins) {
  EXPECT_EQ(serial_axis_bins(2), 1024u);
  EXPECT_EQ(serial_axis_bins(3), 100u);
  EXPECT_EQ(serial_axis_bins(4), 32u);
  EXPECT_EQ(serial_axis_bins(5), 16u);
  EXPECT_EQ(serial_axis_bins(6), 10u);
  EXPECT_THROW(serial_axis_bins(7), Error);
}

TEST(Stats, FrequencyStatisticMatchesOracle) {
  constexpr u64 n = u64{1} << 21;
  const auto v = mt_values(61, n);
  std::vector<u64> counts(kFreqBins);
  for (double x : v) ++counts[static_cast<u64>(x * kFreqBins)];
  auto src = mt_source(61);
  const TestReport r = freq_test(src, n);
  EXPECT_EQ(r.samples, n);
  EXPECT_EQ(r.result.dof, kFreqBins - 1);
  EXPECT_NEAR(r.result.statistic, pearson(counts, 2.0), 1e-6);
}

TEST(Stats, SerialAndMaxOfTStatisticsMatchOracle) {
  constexpr u64 n = 3'000'000;
  const auto v = mt_values(62, n);
  {
    std::vector<u64> c3(1'000'000);
    for (u64 i = 0; i + 3 <= n; i += 3)
      ++c3[static_cast<u64>(v[i] * 100) * 10000 + static_cast<u64>(v[i + 1] * 100) * 100 +
           static_cast<u64>(v[i + 2] * 100)];
    auto src = mt_source(62);
    const TestReport r = serial_test(src, 3, n);
    EXPECT_EQ(r.observations, n / 3);
    EXPECT_NEAR(r.result.statistic, pearson(c3, 1.0), 1e-6);
    EXPECT_EQ(r.result.dof, 999'999u);
  }
  {
    std::vector<u64> counts(kMaxOfTBins);
    const u64 groups = n / kMaxOfT;
    for (u64 g = 0; g < groups; ++g) {
      const double m = *std::max_element(v.begin() + g * kMaxOfT, v.begin() + (g + 1) * kMaxOfT);
      ++counts[std::min<u64>(kMaxOfTBins - 1, static_cast<u64>(std::pow(m, kMaxOfT) * kMaxOfTBins))];
    }
    auto src = mt_source(62);
    const TestReport r = max_of_t_test(src, n);
    EXPECT_NEAR(r.result.statistic, pearson(counts, static_cast<double>(groups) / kMaxOfTBins), 1e-8);
    EXPECT_EQ(r.result.dof, kMaxOfTBins - 1u);
  }
}

TEST(Stats, PokerStatisticMatchesOracle) {
  constexpr u64 n = 1'000'000;
  const auto v = mt_values(63, n);
  std::array<u64, 5> obs{};
  for (u64 g = 0; g < n / 5; ++g) {
    std::set<u64> d;
    for (int k = 0; k < 5; ++k) d.insert(static_cast<u64>(v[g * 5 + k] * 16));
    ++obs[d.size() - 1];
  }
  const double groups = n / 5;
  const double e[5] = {groups * 16 / 1048576, groups * 3600 / 1048576, groups * 84000 / 1048576,
                       groups * 436800 / 1048576, groups * 524160 / 1048576};
  // The one-denomination cell is too small at this size and merges with the next.
  const double o01 = obs[0] + obs[1], e01 = e[0] + e[1];
  double stat = (o01 - e01) * (o01 - e01) / e01;
  for (int k = 2; k < 5; ++k) stat += (obs[k] - e[k]) * (obs[k] - e[k]) / e[k];
  auto src = mt_source(63);
  const TestReport r = poker_test(src, n);
  EXPECT_NEAR(r.result.statistic, stat, 1e-9);
  EXPECT_EQ(r.result.dof, 3u);
}

TEST(Stats, UniformSourcePassesEachTest) {
  auto src = mt_source(64);
  const u64 n = 1u << 22;
  std::vector<TestReport> reports = {
      freq_test(src, n),
      serial_test(src, 2, n),
      serial_test(src, 4, n),
      poker_test(src, n),
      collision_test(src, CollisionVariant::top20, n),
      collision_test(src, CollisionVariant::msb20, n * 8),
      gaps_test(src, n),
      max_of_t_test(src, n),
      fourier_test(src, n),
      freq_test(src, n, Selector::raw_low_bits),
      gaps_test(src, n, Selector::raw_word),
  };
  for (const auto& r : reports) {
    EXPECT_EQ(r.status, TestStatus::completed) << r.name;
    EXPECT_TRUE(r.pass_1e6()) << r.name << " p=" << r.result.p_value;
    EXPECT_LE(r.samples, 8 * n) << r.name;
  }
}

TEST(Stats, DegenerateSourcesFail) {
  FunctionSource constant([] { return 0.5; });
  EXPECT_FALSE(freq_test(constant, 1u << 21).pass_1e6());
  EXPECT_EQ(code_of([&] { permutation_test(constant, 1000, 3); }), ErrorCode::tie_detected);

  double w = 0;
  FunctionSource weyl([&w] { return w = std::fmod(w + std::numbers::phi, 1.0); });
  EXPECT_FALSE(serial_test(weyl, 2, 1u << 22).pass_1e6());
  EXPECT_FALSE(freq_test(weyl, 1u << 21).pass_1e6());  // far too even
  EXPECT_FALSE(gaps_test(weyl, 1u << 20).pass_1e6());
}

TEST(Stats, InsufficientSamples) {
  auto src = mt_source(65);
  EXPECT_EQ(code_of([&] { freq_test(src, 1000); }), ErrorCode::insufficient_samples);
  EXPECT_EQ(code_of([&] { serial_test(src, 2, 1000); }), ErrorCode::insufficient_samples);
  EXPECT_EQ(code_of([&] { poker_test(src, 4999); }), ErrorCode::insufficient_samples);
  EXPECT_EQ(code_of([&] { fourier_test(src, kFourierM - 1); }), ErrorCode::insufficient_samples);
  EXPECT_EQ(code_of([&] { gaps_test(src, 999); }), ErrorCode::insufficient_samples);
  BatteryConfig cfg{10'000, {"freq", "poker"}};
  const BatteryResult res = run_battery(src, cfg);
  ASSERT_EQ(res.reports.size(), 2u);
  EXPECT_EQ(res.reports[0].status, TestStatus::skipped);
  EXPECT_EQ(res.reports[1].status, TestStatus::completed);
  EXPECT_EQ(res.skipped, 1u);
  EXPECT_TRUE(res.reports[0].pass_1e6());
}

TEST(Stats, TestNames) {
  const auto& all = battery_test_names();
  EXPECT_EQ(all.size(), 23u);
  const std::vector<std::string> a = {"all"}, lsb = {"lsb"}, serial = {"serial"}, coll = {"collision"},
                                 mixed = {"fourier", "freq"}, bad = {"ising"};
  EXPECT_EQ(expand_test_names(a), all);
  EXPECT_EQ(expand_test_names(lsb).size(), 10u);
  EXPECT_EQ(expand_test_names(serial).size(), 5u);
  EXPECT_EQ(expand_test_names(coll), (std::vector<std::string>{"collision-top20", "collision-msb20"}));
  EXPECT_EQ(expand_test_names(mixed), (std::vector<std::string>{"freq", "fourier"}));
  EXPECT_EQ(code_of([&] { expand_test_names(bad); }), ErrorCode::invalid_argument);
  for (const auto& n : all) EXPECT_EQ(n.ends_with("-lsb"), &n >= &all[13]);
}

TEST(Stats, ReaderSource) {
  const std::vector<double> v = {0.0, 0.25, 0.5, kBelowOne};
  std::string bytes(reinterpret_cast<const char*>(v.data()), v.size() * 8);
  {
    std::istringstream in(bytes);
    ReaderSource src(in, InputFormat::f64le);
    std::vector<double> out(4);
    src.fill(out, Selector::float_leading);
    EXPECT_EQ(out, v);
    std::vector<double> more(1);
    EXPECT_EQ(code_of([&] { src.fill(more, Selector::float_leading); }), ErrorCode::insufficient_samples);
  }
  {
    const double bad[] = {1.0};
    std::istringstream in(std::string(reinterpret_cast<const char*>(bad), 8));
    ReaderSource src(in, InputFormat::f64le);
    std::vector<double> out(1);
    EXPECT_EQ(code_of([&] { src.fill(out, Selector::float_leading); }), ErrorCode::invalid_argument);
  }
  {
    const u64 raw[] = {38, 1};
    std::istringstream in(std::string(reinterpret_cast<const char*>(raw), 16));
    ReaderSource src(in, InputFormat::raw64, 77);
    std::vector<double> out(2);
    src.fill(out, Selector::float_leading);
    EXPECT_EQ(out[0], 38.0 / 77.0);
    EXPECT_EQ(out[1], 1.0 / 77.0);
  }
}

TEST(Stats, SourcesAgreeWithGenerators) {
  const GeneratorParams p = derive_stream_params({0, 0});
  GeneratorSource gs{Generator(p)};
  VectorSource vs{VectorStream(init_vector(p, 0, 1, 1))};
  std::vector<double> a(1000), b(1000);
  gs.fill(a, Selector::raw_low_bits);
  vs.fill(b, Selector::raw_low_bits);
  EXPECT_EQ(a, b);
  Generator ref(p);
  for (double x : a) EXPECT_EQ(x, select_value(ref.next_raw(), p.n(), Selector::raw_low_bits));

  std::vector<Generator> streams;
  for (u64 id = 0; id < 3; ++id) streams.emplace_back(derive_stream_params({0, id}));
  std::vector<Generator> refs = streams;
  InterleavedSource il(std::move(streams));
  std::vector<double> out(9);
  il.fill(out, Selector::float_leading);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(out[i], refs[i % 3].next_f64());
}

TEST(Stats, ReportsFormat) {
  const GeneratorParams p = derive_stream_params({0, 0});
  GeneratorSource src{Generator(p)};
  const BatteryResult res = run_battery(src, {2'000'000, {"poker", "gaps", "max-of-t"}});
  EXPECT_EQ(res.completed, 3u);
  EXPECT_NEAR(res.expected_outside_1e3, 3 * 2e-3, 1e-15);
  EXPECT_NEAR(res.sigma_outside_1e3, std::sqrt(3 * 2e-3 * (1 - 2e-3)), 1e-15);
  const std::string text = format_text(res);
  EXPECT_NE(text.find("poker"), std::string::npos);
  EXPECT_NE(text.find(res.passed() ? "result: PASS" : "result: FAIL"), std::string::npos);
  const auto j = nlohmann::json::parse(format_json(res));
  ASSERT_EQ(j["tests"].size(), 3u);
  EXPECT_EQ(j["tests"][0]["name"], "poker");
  EXPECT_DOUBLE_EQ(j["tests"][1]["p_value"].get<double>(), res.reports[1].result.p_value);
  EXPECT_EQ(j["summary"]["completed"], 3);
}

TEST(Stats, WeakMultiplierWithSmallExponentPasses) {
  const GeneratorParams base = derive_stream_params({0, 0}, 3);
  const GeneratorParams weak =
      GeneratorParams::make(base.p1(), base.p2(), 3, SkipParams::make(base.skip().q(), 3, Validation::test),
                            SkipMode::lcg(), Validation::test);
  GeneratorSource src{Generator(weak)};
  const BatteryResult res = run_battery(src, {1u << 22, {"all"}});
  EXPECT_EQ(res.errors, 0u);
  EXPECT_EQ(res.outside_1e6, 0u);
  for (const auto& r : res.reports)
    if (r.status == TestStatus::completed) EXPECT_TRUE(r.pass_1e6()) << r.name << " p=" << r.result.p_value;
}
