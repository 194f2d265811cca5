#pragma once

// Chi-squared randomness battery: frequency, serial, poker, collision, gaps,
// max-of-t, permutation and Fourier tests over a stream of unit-interval
// values, each reduced to a statistic, a degree-of-freedom count and an
// upper-tail p-value.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rsarand/generator.hpp"
#include "rsarand/vecgen.hpp"

namespace rsarand::stats {

/// Which bits of the generator output a test sees, as a value in [0, 1).
///   float_leading  r = c/n
///   raw_low_bits   the low 32 bits of c, bit-reversed, scaled by 2^-32, so
///                  the leading bits of the value are the least significant
///                  bits of c
///   raw_word       the low 32 bits of c scaled by 2^-32
/// Sources that only carry doubles take the raw word from floor(r * 2^53).
enum class Selector { float_leading, raw_low_bits, raw_word };

const char* to_string(Selector sel) noexcept;

double select_value(u64 c, u64 n, Selector sel) noexcept;
double select_value(double r, Selector sel) noexcept;

/// Stream of values under test. A source is single-consumer.
class Source {
 public:
  virtual ~Source() = default;
  virtual void fill(std::span<double> out, Selector sel) = 0;
};

class GeneratorSource final : public Source {
 public:
  explicit GeneratorSource(Generator gen) : gen_(std::move(gen)) {}
  void fill(std::span<double> out, Selector sel) override;
  const Generator& generator() const noexcept { return gen_; }

 private:
  Generator gen_;
  std::vector<u64> raw_;
};

class VectorSource final : public Source {
 public:
  explicit VectorSource(VectorStream stream) : stream_(std::move(stream)) {}
  void fill(std::span<double> out, Selector sel) override;
  VectorStream& stream() noexcept { return stream_; }

 private:
  VectorStream stream_;
  std::vector<u64> raw_;
};

/// Round-robin over several scalar streams: r_1 of every stream in order,
/// then r_2 of every stream, and so on.
class InterleavedSource final : public Source {
 public:
  explicit InterleavedSource(std::vector<Generator> streams);
  void fill(std::span<double> out, Selector sel) override;
  std::size_t streams() const noexcept { return streams_.size(); }

 private:
  std::vector<Generator> streams_;
  std::size_t next_ = 0;
};

/// Doubles from a callable; used for synthetic and sabotaged inputs.
class FunctionSource final : public Source {
 public:
  explicit FunctionSource(std::function<double()> fn) : fn_(std::move(fn)) {}
  void fill(std::span<double> out, Selector sel) override;

 private:
  std::function<double()> fn_;
};

enum class InputFormat { f64le, raw64 };

/// Little-endian binary input. raw64 needs the modulus n of the stream that
/// produced it. Running out of input raises Error(insufficient_samples).
class ReaderSource final : public Source {
 public:
  ReaderSource(std::istream& in, InputFormat format, u64 modulus = 0);
  void fill(std::span<double> out, Selector sel) override;

 private:
  std::istream& in_;
  InputFormat format_;
  u64 modulus_;
  std::vector<unsigned char> bytes_;
};

struct ChiSquareResult {
  double statistic = 0;
  u64 dof = 0;
  double p_value = 1;
};

/// Upper-tail probability of a chi-squared variable with `dof` degrees of
/// freedom, Q(dof/2, statistic/2).
double chi2_pvalue(double statistic, double dof);

/// Pearson statistic of observed counts against expected counts, with
/// dof = cells - constraints.
ChiSquareResult chi_square(std::span<const u64> observed, std::span<const double> expected,
                           u64 constraints = 1);

/// Merges adjacent cells until every expected count reaches `min_expected`;
/// a short remainder joins the last full cell. Returns the merged pair.
struct MergedCells {
  std::vector<u64> observed;
  std::vector<double> expected;
};
MergedCells merge_cells(std::span<const u64> observed, std::span<const double> expected,
                        double min_expected = 10.0);

enum class TestStatus { completed, skipped, error };

const char* to_string(TestStatus status) noexcept;

struct TestReport {
  std::string name;
  std::string params;
  Selector selector = Selector::float_leading;
  u64 samples = 0;        // values drawn from the source
  u64 observations = 0;   // tuples, fills or runs that were histogrammed
  ChiSquareResult result;
  TestStatus status = TestStatus::completed;
  std::string message;

  bool pass_1e3() const noexcept;
  bool pass_1e6() const noexcept;
};

inline constexpr u64 kFreqBins = u64{1} << 20;
inline constexpr u64 kCollisionBalls = u64{1} << 14;
inline constexpr u64 kCollisionUrns = u64{1} << 20;
inline constexpr u64 kCollisionFills = 1024;
inline constexpr unsigned kMaxOfT = 32;
inline constexpr unsigned kMaxOfTBins = 128;
inline constexpr unsigned kPermutationT = 10;
inline constexpr u64 kFourierM = u64{1} << 20;
inline constexpr unsigned kFourierBins = 64;

enum class CollisionVariant { top20, msb20 };

// Each test draws at most `samples` values and throws
// Error(insufficient_samples) when they cannot fill its histogram.
TestReport freq_test(Source& src, u64 samples, Selector sel = Selector::float_leading);
TestReport serial_test(Source& src, unsigned dim, u64 samples, Selector sel = Selector::float_leading);
TestReport poker_test(Source& src, u64 samples, Selector sel = Selector::float_leading);
TestReport collision_test(Source& src, CollisionVariant variant, u64 samples,
                          Selector sel = Selector::float_leading);
TestReport gaps_test(Source& src, u64 samples, Selector sel = Selector::float_leading);
TestReport max_of_t_test(Source& src, u64 samples, unsigned t = kMaxOfT,
                         Selector sel = Selector::float_leading);
/// Throws Error(tie_detected) if a tuple holds two equal values.
TestReport permutation_test(Source& src, u64 samples, unsigned t = kPermutationT,
                            Selector sel = Selector::float_leading);
TestReport fourier_test(Source& src, u64 samples, u64 block = kFourierM,
                        Selector sel = Selector::float_leading);

/// Per-axis bin count of the serial test in `dim` dimensions: 2^20 cells for
/// D in {2, 4, 5}, 10^6 cells for D in {3, 6}.
unsigned serial_axis_bins(unsigned dim);

/// Hand counts of five cards over sixteen denominations by number of
/// distinct denominations (index 0 = one distinct value), out of 16^5.
std::array<u64, 5> poker_hand_counts();

/// P(collisions = c) for `balls` into `urns`, c = 0..size-1, truncated where
/// the remaining mass is below double precision.
const std::vector<double>& collision_distribution(u64 balls = kCollisionBalls, u64 urns = kCollisionUrns);

/// Equiprobable bin edges (j/bins)^(1/t), j = 0..bins.
std::vector<double> max_of_t_edges(unsigned bins = kMaxOfTBins, unsigned t = kMaxOfT);

/// Rank of the ordering of `values` in [0, t!), 0 for ascending input.
/// Throws Error(tie_detected) on equal values.
u64 permutation_rank(std::span<const double> values);

/// x_hat_k = M^(-1/2) * sum_j x_j exp(+2 pi i j k / M).
std::vector<std::complex<double>> fourier_coefficients(std::span<const std::complex<double>> x);

struct BatteryConfig {
  u64 samples = 100'000'000;       // per test
  std::vector<std::string> tests;  // empty: every test
};

struct BatteryResult {
  std::vector<TestReport> reports;
  u64 completed = 0;
  u64 skipped = 0;
  u64 errors = 0;
  u64 outside_1e6 = 0;
  u64 outside_1e3 = 0;
  double expected_outside_1e3 = 0;
  double sigma_outside_1e3 = 0;
  bool rate_consistent = true;

  /// No completed test outside (1e-6, 1 - 1e-6) and no errors.
  bool passed() const noexcept { return outside_1e6 == 0 && errors == 0; }
};

/// Names accepted by run_battery, in run order. Leading-bit tests first,
/// then the least-significant-bit reruns (suffix "-lsb").
const std::vector<std::string>& battery_test_names();

/// Expands group aliases ("all", "lsb", "serial", "collision") and rejects
/// unknown names with Error(invalid_argument).
std::vector<std::string> expand_test_names(std::span<const std::string> names);

BatteryResult run_battery(Source& src, const BatteryConfig& config);

std::string format_text(const BatteryResult& result);
std::string format_json(const BatteryResult& result);

}  // namespace rsarand::stats
