#include "rsarand/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numeric>

#include "rsarand/error.hpp"

namespace rsarand::stats {

namespace {

constexpr std::size_t kChunk = std::size_t{1} << 16;
constexpr double kTwoPow32Inv = 0x1p-32;

std::uint32_t reverse_bits(std::uint32_t x) noexcept {
  x = ((x >> 1) & 0x55555555u) | ((x & 0x55555555u) << 1);
  x = ((x >> 2) & 0x33333333u) | ((x & 0x33333333u) << 2);
  x = ((x >> 4) & 0x0f0f0f0fu) | ((x & 0x0f0f0f0fu) << 4);
  x = ((x >> 8) & 0x00ff00ffu) | ((x & 0x00ff00ffu) << 8);
  return (x >> 16) | (x << 16);
}

double select_word(std::uint32_t w, Selector sel) noexcept {
  return (sel == Selector::raw_low_bits ? reverse_bits(w) : w) * kTwoPow32Inv;
}

[[noreturn]] void insufficient(const std::string& test, const std::string& need) {
  throw Error(ErrorCode::insufficient_samples, test + ": insufficient samples, needs " + need);
}

// Reads at most `limit` values from a source in chunks, so a test never
// consumes more of the stream than it reports.
class Draw {
 public:
  Draw(Source& src, Selector sel, u64 limit) : src_(src), sel_(sel), remaining_(limit) {}

  double next() {
    if (pos_ == buf_.size()) refill();
    return buf_[pos_++];
  }

 private:
  void refill() {
    const std::size_t len = static_cast<std::size_t>(std::min<u64>(kChunk, remaining_));
    buf_.resize(len);
    src_.fill(buf_, sel_);
    remaining_ -= len;
    pos_ = 0;
  }

  Source& src_;
  Selector sel_;
  u64 remaining_;
  std::vector<double> buf_;
  std::size_t pos_ = 0;
};

// Equiprobable cells: the Pearson statistic has exactly the mean and
// variance of the chi-squared law for any expected count, so large tables
// only need one expected observation per cell; small tables keep ten.
double min_mean_expected(u64 cells) noexcept { return cells >= (u64{1} << 16) ? 1.0 : 10.0; }

void require_cells(const std::string& test, u64 observations, u64 cells, u64 per_observation) {
  const double need = min_mean_expected(cells) * static_cast<double>(cells);
  if (static_cast<double>(observations) < need) {
    insufficient(test, std::to_string(static_cast<u64>(std::ceil(need)) * per_observation) + " values");
  }
}

template <class Count>
ChiSquareResult uniform_chi_square(const std::vector<Count>& counts, u64 total, u64 constraints = 1) {
  const long double expected = static_cast<long double>(total) / counts.size();
  long double sum = 0;
  for (Count c : counts) {
    const long double d = c - expected;
    sum += d * d;
  }
  ChiSquareResult r;
  r.statistic = static_cast<double>(sum / expected);
  r.dof = counts.size() - constraints;
  r.p_value = chi2_pvalue(r.statistic, static_cast<double>(r.dof));
  return r;
}

ChiSquareResult merged_chi_square(const std::string& test, std::span<const u64> observed,
                                  std::span<const double> expected) {
  const MergedCells m = merge_cells(observed, expected);
  if (m.observed.size() < 2) insufficient(test, "more observations for two cells of expected count 10");
  return chi_square(m.observed, m.expected);
}

TestReport make_report(std::string name, std::string params, Selector sel, u64 samples,
                       u64 observations, ChiSquareResult result) {
  TestReport r;
  r.name = std::move(name);
  r.params = std::move(params);
  r.selector = sel;
  r.samples = samples;
  r.observations = observations;
  r.result = result;
  return r;
}

u64 ipow(u64 b, unsigned e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

std::size_t bin_of(double r, u64 bins) noexcept {
  const u64 k = static_cast<u64>(r * static_cast<double>(bins));
  return static_cast<std::size_t>(std::min(k, bins - 1));
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlan {
  explicit FftwPlan(std::size_t m)
      : size(m), data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m))) {
    if (!data) throw std::bad_alloc();
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftwPlan() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    fftw_free(data);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;

  std::size_t size;
  fftw_complex* data;
  fftw_plan plan;
};

}  // namespace

const char* to_string(Selector sel) noexcept {
  switch (sel) {
    case Selector::float_leading: return "float_leading";
    case Selector::raw_low_bits: return "raw_low_bits";
    case Selector::raw_word: return "raw_word";
  }
  return "unknown";
}

double select_value(u64 c, u64 n, Selector sel) noexcept {
  if (sel == Selector::float_leading) return to_unit(c, n);
  return select_word(static_cast<std::uint32_t>(c), sel);
}

double select_value(double r, Selector sel) noexcept {
  if (sel == Selector::float_leading) return r;
  return select_word(static_cast<std::uint32_t>(static_cast<u64>(r * 0x1p53)), sel);
}

void GeneratorSource::fill(std::span<double> out, Selector sel) {
  if (sel == Selector::float_leading) {
    gen_.fill_f64(out);
    return;
  }
  raw_.resize(out.size());
  gen_.fill_raw(raw_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = select_value(raw_[i], gen_.params().n(), sel);
}

void VectorSource::fill(std::span<double> out, Selector sel) {
  raw_.resize(out.size());
  stream_.fill_raw(raw_);
  const u64 n = stream_.params().n();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = select_value(raw_[i], n, sel);
}

InterleavedSource::InterleavedSource(std::vector<Generator> streams) : streams_(std::move(streams)) {
  if (streams_.empty()) throw Error(ErrorCode::invalid_argument, "interleave needs at least one stream");
}

void InterleavedSource::fill(std::span<double> out, Selector sel) {
  for (auto& v : out) {
    Generator& g = streams_[next_];
    v = select_value(g.next_raw(), g.params().n(), sel);
    if (++next_ == streams_.size()) next_ = 0;
  }
}

void FunctionSource::fill(std::span<double> out, Selector sel) {
  for (auto& v : out) v = select_value(fn_(), sel);
}

ReaderSource::ReaderSource(std::istream& in, InputFormat format, u64 modulus)
    : in_(in), format_(format), modulus_(modulus) {
  if (format == InputFormat::raw64 && modulus == 0)
    throw Error(ErrorCode::invalid_argument, "raw64 input needs the stream modulus n");
}

void ReaderSource::fill(std::span<double> out, Selector sel) {
  bytes_.resize(out.size() * 8);
  in_.read(reinterpret_cast<char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (static_cast<std::size_t>(in_.gcount()) != bytes_.size())
    throw Error(ErrorCode::insufficient_samples, "input ended before the test budget was reached");
  for (std::size_t i = 0; i < out.size(); ++i) {
    u64 w = 0;
    for (int b = 7; b >= 0; --b) w = (w << 8) | bytes_[i * 8 + b];
    if (format_ == InputFormat::raw64) {
      out[i] = select_value(w, modulus_, sel);
    } else {
      double r;
      std::memcpy(&r, &w, sizeof r);
      if (!(r >= 0.0 && r < 1.0)) throw Error(ErrorCode::invalid_argument, "f64le input value outside [0, 1)");
      out[i] = select_value(r, sel);
    }
  }
}

double chi2_pvalue(double statistic, double dof) {
  using namespace boost::math::policies;
  using Policy = policy<domain_error<errno_on_error>, overflow_error<errno_on_error>,
                        evaluation_error<errno_on_error>, underflow_error<ignore_error>>;
  if (!(dof > 0)) throw Error(ErrorCode::invalid_argument, "chi-squared dof must be positive");
  if (!(statistic > 0)) return 1.0;
  if (std::isinf(statistic)) return 0.0;
  return boost::math::gamma_q(dof / 2, statistic / 2, Policy());
}

ChiSquareResult chi_square(std::span<const u64> observed, std::span<const double> expected,
                           u64 constraints) {
  if (observed.size() != expected.size() || observed.size() <= constraints)
    throw Error(ErrorCode::invalid_argument, "chi-square needs more cells than constraints");
  long double sum = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const long double d = observed[i] - static_cast<long double>(expected[i]);
    sum += d * d / expected[i];
  }
  ChiSquareResult r;
  r.statistic = static_cast<double>(sum);
  r.dof = observed.size() - constraints;
  r.p_value = chi2_pvalue(r.statistic, static_cast<double>(r.dof));
  return r;
}

MergedCells merge_cells(std::span<const u64> observed, std::span<const double> expected,
                        double min_expected) {
  MergedCells m;
  u64 obs = 0;
  double exp = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    obs += observed[i];
    exp += expected[i];
    if (exp >= min_expected) {
      m.observed.push_back(obs);
      m.expected.push_back(exp);
      obs = 0;
      exp = 0;
    }
  }
  if (exp > 0 || obs > 0) {
    if (m.observed.empty()) {
      m.observed.push_back(obs);
      m.expected.push_back(exp);
    } else {
      m.observed.back() += obs;
      m.expected.back() += exp;
    }
  }
  return m;
}

const char* to_string(TestStatus status) noexcept {
  switch (status) {
    case TestStatus::completed: return "completed";
    case TestStatus::skipped: return "skipped";
    case TestStatus::error: return "error";
  }
  return "unknown";
}

bool TestReport::pass_1e3() const noexcept {
  if (status != TestStatus::completed) return status == TestStatus::skipped;
  return result.p_value > 1e-3 && result.p_value < 1 - 1e-3;
}

bool TestReport::pass_1e6() const noexcept {
  if (status != TestStatus::completed) return status == TestStatus::skipped;
  return result.p_value > 1e-6 && result.p_value < 1 - 1e-6;
}

TestReport freq_test(Source& src, u64 samples, Selector sel) {
  require_cells("freq", samples, kFreqBins, 1);
  std::vector<std::uint32_t> counts(kFreqBins);
  Draw draw(src, sel, samples);
  for (u64 i = 0; i < samples; ++i) ++counts[bin_of(draw.next(), kFreqBins)];
  return make_report("freq", "bins=" + std::to_string(kFreqBins), sel, samples, samples,
                     uniform_chi_square(counts, samples));
}

unsigned serial_axis_bins(unsigned dim) {
  switch (dim) {
    case 2: return 1024;
    case 3: return 100;
    case 4: return 32;
    case 5: return 16;
    case 6: return 10;
    default: throw Error(ErrorCode::invalid_argument, "serial test dimension must be in 2..6");
  }
}

TestReport serial_test(Source& src, unsigned dim, u64 samples, Selector sel) {
  const u64 axis = serial_axis_bins(dim);
  const u64 cells = ipow(axis, dim);
  const std::string name = "serial" + std::to_string(dim);
  const u64 tuples = samples / dim;
  require_cells(name, tuples, cells, dim);
  std::vector<std::uint32_t> counts(cells);
  Draw draw(src, sel, tuples * dim);
  for (u64 t = 0; t < tuples; ++t) {
    u64 cell = 0;
    for (unsigned d = 0; d < dim; ++d) cell = cell * axis + bin_of(draw.next(), axis);
    ++counts[cell];
  }
  return make_report(name, "D=" + std::to_string(dim) + " axis=" + std::to_string(axis) +
                               " cells=" + std::to_string(cells),
                     sel, tuples * dim, tuples, uniform_chi_square(counts, tuples));
}

std::array<u64, 5> poker_hand_counts() {
  // Stirling numbers of the second kind S(5, d) times 16 falling d.
  constexpr u64 stirling[5] = {1, 15, 25, 10, 1};
  std::array<u64, 5> counts{};
  u64 falling = 1;
  for (unsigned d = 1; d <= 5; ++d) {
    falling *= 16 - (d - 1);
    counts[d - 1] = stirling[d - 1] * falling;
  }
  return counts;
}

TestReport poker_test(Source& src, u64 samples, Selector sel) {
  const u64 groups = samples / 5;
  if (groups < 1000) insufficient("poker", "5000 values");
  const auto hands = poker_hand_counts();
  std::array<u64, 5> observed{};
  Draw draw(src, sel, groups * 5);
  for (u64 g = 0; g < groups; ++g) {
    unsigned seen = 0;
    for (int k = 0; k < 5; ++k) seen |= 1u << bin_of(draw.next(), 16);
    ++observed[std::popcount(seen) - 1];
  }
  std::array<double, 5> expected{};
  for (int d = 0; d < 5; ++d) expected[d] = static_cast<double>(groups) * hands[d] / 1048576.0;
  return make_report("poker", "cards=5 denominations=16", sel, groups * 5, groups,
                     merged_chi_square("poker", observed, expected));
}

const std::vector<double>& collision_distribution(u64 balls, u64 urns) {
  static std::mutex mutex;
  static std::map<std::pair<u64, u64>, std::vector<double>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({balls, urns});
  if (it != cache.end()) return it->second;
  if (urns == 0) throw Error(ErrorCode::invalid_argument, "collision test needs at least one urn");

  const double m = static_cast<double>(urns);
  const double mean = balls - m * -std::expm1(balls * std::log1p(-1.0 / m));
  const u64 cap = std::min<u64>(balls, static_cast<u64>(mean + 40 * std::sqrt(mean) + 64));
  std::vector<double> p(cap + 1, 0.0), next(cap + 1);
  p[0] = 1;
  for (u64 k = 0; k < balls; ++k) {
    // k balls placed with c collisions occupy k - c urns.
    std::fill(next.begin(), next.end(), 0.0);
    const u64 top = std::min(k, cap);
    for (u64 c = 0; c <= top; ++c) {
      const double hit = static_cast<double>(k - c) / m;
      next[c] += p[c] * (1 - hit);
      if (c + 1 <= cap) next[c + 1] += p[c] * hit;
    }
    p.swap(next);
  }
  return cache.emplace(std::pair{balls, urns}, std::move(p)).first->second;
}

TestReport collision_test(Source& src, CollisionVariant variant, u64 samples, Selector sel) {
  const bool top = variant == CollisionVariant::top20;
  const std::string name = top ? "collision-top20" : "collision-msb20";
  const u64 per_fill = top ? kCollisionBalls : 20 * kCollisionBalls;
  const u64 fills = std::min(kCollisionFills, samples / per_fill);
  if (fills < 2) insufficient(name, std::to_string(2 * per_fill) + " values");
  const auto& dist = collision_distribution();
  std::vector<u64> observed(dist.size());
  std::vector<u64> urns(kCollisionUrns / 64);
  Draw draw(src, sel, fills * per_fill);
  for (u64 f = 0; f < fills; ++f) {
    std::fill(urns.begin(), urns.end(), 0);
    u64 collisions = 0;
    for (u64 b = 0; b < kCollisionBalls; ++b) {
      u64 urn;
      if (top) {
        urn = bin_of(draw.next(), kCollisionUrns);
      } else {
        urn = 0;
        for (int k = 0; k < 20; ++k) urn = (urn << 1) | (draw.next() >= 0.5 ? 1 : 0);
      }
      const u64 bit = u64{1} << (urn & 63);
      if (urns[urn >> 6] & bit) ++collisions;
      urns[urn >> 6] |= bit;
    }
    ++observed[std::min<u64>(collisions, observed.size() - 1)];
  }
  std::vector<double> expected(dist.size());
  for (std::size_t c = 0; c < dist.size(); ++c) expected[c] = static_cast<double>(fills) * dist[c];
  return make_report(name, "balls=16384 urns=1048576 fills=" + std::to_string(fills), sel,
                     fills * per_fill, fills, merged_chi_square(name, observed, expected));
}

TestReport gaps_test(Source& src, u64 samples, Selector sel) {
  constexpr unsigned kLongest = 64;  // last cell collects runs of 64 or more
  if (samples < 1000) insufficient("gaps", "1000 values");
  std::vector<u64> observed(kLongest);
  Draw draw(src, sel, samples);
  bool bit = draw.next() > 0.5;
  u64 length = 1, runs = 0;
  for (u64 i = 1; i < samples; ++i) {
    const bool b = draw.next() > 0.5;
    if (b == bit) {
      ++length;
      continue;
    }
    ++observed[std::min<u64>(length, kLongest) - 1];
    ++runs;
    bit = b;
    length = 1;
  }
  // The final run may continue past the sample and is not counted.
  std::vector<double> expected(kLongest);
  for (unsigned k = 1; k < kLongest; ++k) expected[k - 1] = std::ldexp(static_cast<double>(runs), -static_cast<int>(k));
  expected[kLongest - 1] = std::ldexp(static_cast<double>(runs), -static_cast<int>(kLongest - 1));
  return make_report("gaps", "threshold=0.5", sel, samples, runs,
                     merged_chi_square("gaps", observed, expected));
}

std::vector<double> max_of_t_edges(unsigned bins, unsigned t) {
  std::vector<double> edges(bins + 1);
  for (unsigned j = 0; j <= bins; ++j) edges[j] = std::pow(static_cast<double>(j) / bins, 1.0 / t);
  return edges;
}

TestReport max_of_t_test(Source& src, u64 samples, unsigned t, Selector sel) {
  if (t < 2) throw Error(ErrorCode::invalid_argument, "max-of-t needs t >= 2");
  const u64 groups = samples / t;
  require_cells("max-of-t", groups, kMaxOfTBins, t);
  std::vector<u64> counts(kMaxOfTBins);
  Draw draw(src, sel, groups * t);
  for (u64 g = 0; g < groups; ++g) {
    double m = 0;
    for (unsigned k = 0; k < t; ++k) m = std::max(m, draw.next());
    ++counts[bin_of(std::pow(m, static_cast<double>(t)), kMaxOfTBins)];
  }
  return make_report("max-of-t", "t=" + std::to_string(t) + " bins=" + std::to_string(kMaxOfTBins), sel,
                     groups * t, groups, uniform_chi_square(counts, groups));
}

u64 permutation_rank(std::span<const double> values) {
  u64 rank = 0;
  const std::size_t t = values.size();
  for (std::size_t i = 0; i < t; ++i) {
    u64 smaller = 0;
    for (std::size_t j = i + 1; j < t; ++j) {
      if (values[j] == values[i]) throw Error(ErrorCode::tie_detected, "permutation: equal values in a tuple");
      smaller += values[j] < values[i];
    }
    rank = rank * (t - i) + smaller;
  }
  return rank;
}

TestReport permutation_test(Source& src, u64 samples, unsigned t, Selector sel) {
  if (t < 2 || t > 10) throw Error(ErrorCode::invalid_argument, "permutation test needs 2 <= t <= 10");
  u64 cells = 1;
  for (unsigned k = 2; k <= t; ++k) cells *= k;
  const u64 tuples = samples / t;
  require_cells("permutation", tuples, cells, t);
  std::vector<std::uint32_t> counts(cells);
  std::array<double, 10> tuple{};
  Draw draw(src, sel, tuples * t);
  for (u64 k = 0; k < tuples; ++k) {
    for (unsigned j = 0; j < t; ++j) tuple[j] = draw.next();
    ++counts[permutation_rank(std::span(tuple).first(t))];
  }
  return make_report("permutation", "t=" + std::to_string(t) + " cells=" + std::to_string(cells), sel,
                     tuples * t, tuples, uniform_chi_square(counts, tuples));
}

std::vector<std::complex<double>> fourier_coefficients(std::span<const std::complex<double>> x) {
  if (x.empty()) return {};
  FftwPlan fft(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    fft.data[j][0] = x[j].real();
    fft.data[j][1] = x[j].imag();
  }
  fftw_execute(fft.plan);
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  std::vector<std::complex<double>> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = {fft.data[k][0] * scale, fft.data[k][1] * scale};
  return out;
}

TestReport fourier_test(Source& src, u64 samples, u64 block, Selector sel) {
  if (block < 2 || (block & (block - 1)) != 0)
    throw Error(ErrorCode::invalid_argument, "Fourier block length must be a power of two");
  const u64 blocks = samples / (2 * block);
  if (blocks < 1 || blocks * block < 10 * kFourierBins)
    insufficient("fourier", std::to_string(2 * std::max<u64>(block, 10 * kFourierBins)) + " values");
  FftwPlan fft(block);
  const double scale = 1.0 / std::sqrt(static_cast<double>(block));
  const double inv_sigma_sqrt2 = std::sqrt(12.0) / std::sqrt(2.0);  // component variance 1/12
  std::vector<u64> counts(2 * kFourierBins);
  auto bin = [&](double v) {
    const double u = 0.5 * std::erfc(-v * inv_sigma_sqrt2);
    return bin_of(u, kFourierBins);
  };
  Draw draw(src, sel, blocks * 2 * block);
  for (u64 b = 0; b < blocks; ++b) {
    for (u64 j = 0; j < block; ++j) {
      fft.data[j][0] = draw.next() - 0.5;
      fft.data[j][1] = draw.next() - 0.5;
    }
    fftw_execute(fft.plan);
    for (u64 k = 0; k < block; ++k) {
      ++counts[bin(fft.data[k][0] * scale)];
      ++counts[kFourierBins + bin(fft.data[k][1] * scale)];
    }
  }
  // Real and imaginary histograms each have a fixed total.
  const std::vector<double> expected(2 * kFourierBins, static_cast<double>(blocks * block) / kFourierBins);
  return make_report("fourier",
                     "M=" + std::to_string(block) + " blocks=" + std::to_string(blocks) +
                         " bins=" + std::to_string(kFourierBins) + "x2",
                     sel, blocks * 2 * block, blocks * block, chi_square(counts, expected, 2));
}

namespace {

struct BatteryEntry {
  std::string name;
  Selector selector;
  std::function<TestReport(Source&, u64, Selector)> run;
};

const std::vector<BatteryEntry>& battery() {
  static const std::vector<BatteryEntry> entries = [] {
    using S = Selector;
    std::vector<BatteryEntry> e;
    auto serial = [](unsigned d) {
      return [d](Source& s, u64 n, S sel) { return serial_test(s, d, n, sel); };
    };
    auto collision = [](CollisionVariant v) {
      return [v](Source& s, u64 n, S sel) { return collision_test(s, v, n, sel); };
    };
    auto add_shared = [&](S sel, const std::string& suffix) {
      e.push_back({"freq" + suffix, sel, [](Source& s, u64 n, S x) { return freq_test(s, n, x); }});
      for (unsigned d = 2; d <= 6; ++d) e.push_back({"serial" + std::to_string(d) + suffix, sel, serial(d)});
      e.push_back({"poker" + suffix, sel, [](Source& s, u64 n, S x) { return poker_test(s, n, x); }});
      e.push_back({"collision-top20" + suffix, sel, collision(CollisionVariant::top20)});
      e.push_back({"collision-msb20" + suffix, sel, collision(CollisionVariant::msb20)});
      e.push_back({"gaps" + suffix, sel, [](Source& s, u64 n, S x) { return gaps_test(s, n, x); }});
    };
    add_shared(S::float_leading, "");
    e.push_back({"max-of-t", S::float_leading,
                 [](Source& s, u64 n, S x) { return max_of_t_test(s, n, kMaxOfT, x); }});
    e.push_back({"permutation", S::float_leading,
                 [](Source& s, u64 n, S x) { return permutation_test(s, n, kPermutationT, x); }});
    e.push_back({"fourier", S::float_leading,
                 [](Source& s, u64 n, S x) { return fourier_test(s, n, kFourierM, x); }});
    add_shared(S::raw_low_bits, "-lsb");
    return e;
  }();
  return entries;
}

}  // namespace

const std::vector<std::string>& battery_test_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : battery()) v.push_back(e.name);
    return v;
  }();
  return names;
}

std::vector<std::string> expand_test_names(std::span<const std::string> names) {
  const auto& all = battery_test_names();
  std::vector<bool> chosen(all.size(), false);
  for (const auto& raw : names) {
    bool matched = false;
    for (std::size_t i = 0; i < all.size(); ++i) {
      const std::string& n = all[i];
      const bool lsb = n.ends_with("-lsb");
      const std::string base = lsb ? n.substr(0, n.size() - 4) : n;
      const bool hit = raw == "all" || raw == n || (raw == "lsb" && lsb) ||
                       (raw == "serial" && !lsb && base.starts_with("serial")) ||
                       (raw == "collision" && !lsb && base.starts_with("collision"));
      if (hit) {
        chosen[i] = true;
        matched = true;
      }
    }
    if (!matched) throw Error(ErrorCode::invalid_argument, "unknown test '" + raw + "'");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (chosen[i]) out.push_back(all[i]);
  return out;
}

BatteryResult run_battery(Source& src, const BatteryConfig& config) {
  const std::vector<std::string> selected =
      config.tests.empty() ? battery_test_names() : expand_test_names(config.tests);
  BatteryResult result;
  for (const auto& entry : battery()) {
    if (std::find(selected.begin(), selected.end(), entry.name) == selected.end()) continue;
    TestReport report;
    try {
      report = entry.run(src, config.samples, entry.selector);
      report.name = entry.name;
    } catch (const Error& err) {
      report.name = entry.name;
      report.selector = entry.selector;
      report.status = err.code() == ErrorCode::insufficient_samples ? TestStatus::skipped : TestStatus::error;
      report.message = err.what();
    }
    switch (report.status) {
      case TestStatus::completed:
        ++result.completed;
        if (!report.pass_1e6()) ++result.outside_1e6;
        if (!report.pass_1e3()) ++result.outside_1e3;
        break;
      case TestStatus::skipped: ++result.skipped; break;
      case TestStatus::error: ++result.errors; break;
    }
    result.reports.push_back(std::move(report));
  }
  constexpr double rate = 2e-3;
  result.expected_outside_1e3 = result.completed * rate;
  result.sigma_outside_1e3 = std::sqrt(result.completed * rate * (1 - rate));
  result.rate_consistent = std::abs(static_cast<double>(result.outside_1e3) - result.expected_outside_1e3) <=
                           3 * result.sigma_outside_1e3;
  return result;
}

std::string format_text(const BatteryResult& result) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %-14s %12s %18s %9s %12s  %s\n", "test", "selector", "samples",
                "statistic", "dof", "p-value", "result");
  out += line;
  for (const auto& r : result.reports) {
    if (r.status == TestStatus::completed) {
      std::snprintf(line, sizeof line, "%-22s %-14s %12llu %18.4f %9llu %12.6g  %s\n", r.name.c_str(),
                    to_string(r.selector), static_cast<unsigned long long>(r.samples), r.result.statistic,
                    static_cast<unsigned long long>(r.result.dof), r.result.p_value,
                    r.pass_1e6() ? (r.pass_1e3() ? "pass" : "pass (outside 1e-3)") : "FAIL");
      out += line;
    } else {
      std::snprintf(line, sizeof line, "%-22s %-14s %12s %18s %9s %12s  %s: ", r.name.c_str(),
                    to_string(r.selector), "-", "-", "-", "-",
                    r.status == TestStatus::skipped ? "skipped" : "ERROR");
      out += line;
      out += r.message;
      out += '\n';
    }
  }
  std::snprintf(line, sizeof line,
                "summary: %llu completed, %llu skipped, %llu errors; %llu outside (1e-6, 1-1e-6); "
                "%llu outside (1e-3, 1-1e-3), expected %.3f +- %.3f (%s)\n",
                static_cast<unsigned long long>(result.completed), static_cast<unsigned long long>(result.skipped),
                static_cast<unsigned long long>(result.errors), static_cast<unsigned long long>(result.outside_1e6),
                static_cast<unsigned long long>(result.outside_1e3), result.expected_outside_1e3,
                result.sigma_outside_1e3, result.rate_consistent ? "consistent" : "inconsistent");
  out += line;
  out += result.passed() ? "result: PASS\n" : "result: FAIL\n";
  return out;
}

std::string format_json(const BatteryResult& result) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& r : result.reports) {
    nlohmann::json t{{"name", r.name},
                     {"params", r.params},
                     {"selector", to_string(r.selector)},
                     {"status", to_string(r.status)},
                     {"n", r.samples},
                     {"observations", r.observations}};
    if (r.status == TestStatus::completed) {
      t["statistic"] = r.result.statistic;
      t["dof"] = r.result.dof;
      t["p_value"] = r.result.p_value;
      t["pass_1e3"] = r.pass_1e3();
      t["pass_1e6"] = r.pass_1e6();
    } else {
      t["message"] = r.message;
    }
    tests.push_back(std::move(t));
  }
  nlohmann::json doc{{"tests", tests},
                     {"summary",
                      {{"completed", result.completed},
                       {"skipped", result.skipped},
                       {"errors", result.errors},
                       {"outside_1e6", result.outside_1e6},
                       {"outside_1e3", result.outside_1e3},
                       {"expected_outside_1e3", result.expected_outside_1e3},
                       {"sigma_outside_1e3", result.sigma_outside_1e3},
                       {"rate_consistent", result.rate_consistent},
                       {"passed", result.passed()}}}};
  return doc.dump(2) + "\n";
}

}  // namespace rsarand::stats
