// rsarand command-line tool: params, gen, test, bench, selftest.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rsarand/rsarand.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
  std::string message;
};

void check(rsarand_status s) {
  if (s != RSARAND_OK) {
    const int code = s == RSARAND_E_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
    throw Failure{code, std::string(rsarand_status_name(s)) + ": " + rsarand_last_error()};
  }
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ParamsPtr = std::unique_ptr<rsarand_params, Deleter<rsarand_params, rsarand_params_free>>;
using StreamPtr = std::unique_ptr<rsarand_stream, Deleter<rsarand_stream, rsarand_stream_free>>;
using SourcePtr = std::unique_ptr<rsarand_source, Deleter<rsarand_source, rsarand_source_free>>;
using ReportPtr = std::unique_ptr<rsarand_report, Deleter<rsarand_report, rsarand_report_free>>;
using StringPtr = std::unique_ptr<char, Deleter<char, rsarand_string_free>>;

struct Options {
  uint64_t seed = 0;
  uint64_t stream = 0;
  uint64_t exp = 9;
  uint32_t lanes = 64;
  uint64_t count = 0;
  std::string format = "f64le";
  std::string skip_mode = "lcg";
  std::string tests;
  uint32_t interleave = 0;
  std::string out;
  std::string params_file;
  std::string restore_file;
  std::string snapshot_file;
  std::string input;
  std::string input_format = "f64le";
  std::string report_format = "text";
  uint64_t weak_multiplier = 0;
  bool test_mode = false;
  unsigned threads = 1;
  uint64_t m0 = 0;
  uint64_t s0 = 1;
  std::vector<uint64_t> bench_exps{3, 9, 17, 257};
  std::vector<unsigned> bench_threads;
  std::string suites;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitFailure, "io: cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Failure{kExitFailure, "io: cannot open " + path + " for writing"};
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw Failure{kExitFailure, "io: write failed"};
  }

 private:
  std::ofstream file_;
};

void validate_exponent(const Options& o) {
  if (o.test_mode) return;
  if (o.exp < 3 || o.exp > 257 || o.exp % 2 == 0)
    throw Failure{kExitUsage, "--exp must be odd and in [3, 257] (use --test-mode for other values)"};
}

ParamsPtr build_params(const Options& o) {
  rsarand_params* raw = nullptr;
  if (!o.params_file.empty()) {
    check(rsarand_params_from_text(read_file(o.params_file).c_str(), &raw));
  } else {
    validate_exponent(o);
    check(rsarand_params_derive(o.seed, o.stream, o.test_mode ? 9 : o.exp, &raw));
  }
  ParamsPtr params(raw);
  if (o.params_file.empty() && o.test_mode && o.exp != 9) {
    check(rsarand_params_with_exponent(params.get(), o.exp, 1, &raw));
    params.reset(raw);
  }
  if (o.weak_multiplier != 0) {
    if (!o.test_mode) throw Failure{kExitUsage, "--weak-multiplier requires --test-mode"};
    check(rsarand_params_with_multiplier(params.get(), o.weak_multiplier, 1, &raw));
    params.reset(raw);
  }
  if (o.skip_mode != "lcg") {
    rsarand_skip_kind kind;
    uint64_t value = 0;
    if (o.skip_mode == "unit") {
      kind = RSARAND_SKIP_UNIT;
    } else if (o.skip_mode.rfind("const:", 0) == 0) {
      kind = RSARAND_SKIP_CONSTANT;
      try {
        std::size_t used = 0;
        value = std::stoull(o.skip_mode.substr(6), &used, 0);
        if (used != o.skip_mode.size() - 6) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw Failure{kExitUsage, "--skip-mode const:<v> needs an integer value"};
      }
    } else {
      throw Failure{kExitUsage, "--skip-mode must be lcg, unit or const:<v>"};
    }
    check(rsarand_params_with_skip_mode(params.get(), kind, value, &raw));
    params.reset(raw);
  }
  return params;
}

StreamPtr build_stream(const Options& o) {
  rsarand_stream* raw = nullptr;
  if (!o.restore_file.empty()) {
    check(rsarand_stream_restore(read_file(o.restore_file).c_str(), &raw));
  } else {
    const ParamsPtr params = build_params(o);
    // Unit and constant skips give identical lanes, so they run as one lane.
    const uint32_t lanes = o.skip_mode == "lcg" ? o.lanes : 1;
    check(rsarand_stream_create(params.get(), o.m0, o.s0, lanes, &raw));
  }
  StreamPtr stream(raw);
  check(rsarand_stream_set_threads(stream.get(), o.threads));
  return stream;
}

int cmd_params(const Options& o) {
  const ParamsPtr params = build_params(o);
  char* text = nullptr;
  check(rsarand_params_to_text(params.get(), &text));
  StringPtr owned(text);
  Output out(o.out);
  out.stream() << text;
  out.finish();
  return 0;
}

void put_le(std::ostream& os, uint64_t w) {
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((w >> (8 * b)) & 0xff);
  os.write(bytes, 8);
}

int cmd_gen(const Options& o) {
  if (o.format != "raw64" && o.format != "f64le" && o.format != "text")
    throw Failure{kExitUsage, "--format must be raw64, f64le or text"};
  const StreamPtr stream = build_stream(o);
  Output out(o.out);
  constexpr std::size_t kChunk = std::size_t{1} << 16;
  std::vector<uint64_t> raw(kChunk);
  std::vector<double> f64(kChunk);
  char line[32];
  for (uint64_t done = 0; done < o.count;) {
    const std::size_t len = static_cast<std::size_t>(std::min<uint64_t>(kChunk, o.count - done));
    if (o.format == "raw64") {
      check(rsarand_stream_next_raw(stream.get(), raw.data(), len));
      for (std::size_t i = 0; i < len; ++i) put_le(out.stream(), raw[i]);
    } else {
      check(rsarand_stream_next_f64(stream.get(), f64.data(), len));
      for (std::size_t i = 0; i < len; ++i) {
        if (o.format == "f64le") {
          uint64_t w;
          std::memcpy(&w, &f64[i], sizeof w);
          put_le(out.stream(), w);
        } else {
          const int n = std::snprintf(line, sizeof line, "%.17g\n", f64[i]);
          out.stream().write(line, n);
        }
      }
    }
    done += len;
  }
  out.finish();
  if (!o.snapshot_file.empty()) {
    char* text = nullptr;
    check(rsarand_stream_snapshot(stream.get(), &text));
    StringPtr owned(text);
    std::ofstream snap(o.snapshot_file, std::ios::binary);
    snap << text;
    if (!snap) throw Failure{kExitFailure, "io: cannot write " + o.snapshot_file};
  }
  return 0;
}

SourcePtr build_source(const Options& o) {
  rsarand_source* raw = nullptr;
  if (!o.input.empty()) {
    if (o.input_format != "f64le" && o.input_format != "raw64")
      throw Failure{kExitUsage, "--input-format must be f64le or raw64"};
    uint64_t modulus = 0;
    const bool raw64 = o.input_format == "raw64";
    if (raw64) {
      const ParamsPtr params = build_params(o);
      rsarand_params_info info;
      check(rsarand_params_get_info(params.get(), &info));
      modulus = info.n;
    }
    check(rsarand_source_from_file(o.input.c_str(), raw64 ? RSARAND_INPUT_RAW64 : RSARAND_INPUT_F64LE, modulus,
                                   &raw));
  } else if (o.interleave > 0) {
    validate_exponent(o);
    check(rsarand_source_interleaved(o.seed, o.stream, o.interleave, o.exp, &raw));
  } else {
    StreamPtr stream = build_stream(o);
    check(rsarand_source_from_stream(stream.release(), &raw));
  }
  return SourcePtr(raw);
}

int cmd_test(const Options& o) {
  if (o.report_format != "text" && o.report_format != "json")
    throw Failure{kExitUsage, "--report-format must be text or json"};
  const SourcePtr source = build_source(o);
  rsarand_report* raw = nullptr;
  check(rsarand_battery_run(source.get(), o.count, o.tests.c_str(), &raw));
  const ReportPtr report(raw);
  char* text = nullptr;
  check(rsarand_report_to_string(report.get(), o.report_format == "json" ? RSARAND_REPORT_JSON : RSARAND_REPORT_TEXT,
                              &text));
  StringPtr owned(text);
  Output out(o.out);
  out.stream() << text;
  out.finish();
  rsarand_report_summary summary;
  check(rsarand_report_summary_get(report.get(), &summary));
  return summary.passed ? 0 : kExitFailure;
}

int cmd_bench(const Options& o) {
  std::vector<unsigned> threads = o.bench_threads;
  if (threads.empty()) {
    threads.push_back(1);
    const unsigned hw = std::thread::hardware_concurrency();
    if (hw > 1) threads.push_back(hw);
  }
  constexpr std::size_t kChunk = std::size_t{1} << 20;
  std::vector<double> buf(kChunk);
  Output out(o.out);
  char line[256];
  for (uint64_t e : o.bench_exps) {
    Options opt = o;
    opt.exp = e;
    for (unsigned t : threads) {
      opt.threads = t;
      const StreamPtr stream = build_stream(opt);
      check(rsarand_stream_next_f64(stream.get(), buf.data(), buf.size()));  // warm-up, untimed
      const auto t0 = std::chrono::steady_clock::now();
      for (uint64_t done = 0; done < o.count;) {
        const std::size_t len = static_cast<std::size_t>(std::min<uint64_t>(kChunk, o.count - done));
        check(rsarand_stream_next_f64(stream.get(), buf.data(), len));
        done += len;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::snprintf(line, sizeof line, "e=%llu lanes=%u threads=%u values=%llu seconds=%.3f values_per_second=%.4g\n",
                    static_cast<unsigned long long>(e), opt.skip_mode == "lcg" ? opt.lanes : 1u, t,
                    static_cast<unsigned long long>(o.count), secs, secs > 0 ? o.count / secs : 0.0);
      out.stream() << line << std::flush;
    }
  }
  out.finish();
  return 0;
}

int cmd_selftest(const Options& o) {
  struct Log {
    static void cb(const char* suite, int passed, const char* detail, double seconds, void*) {
      std::printf("%-20s %s  %.2fs%s%s\n", suite, passed ? "PASS" : "FAIL", seconds, passed ? "" : "  ",
                  passed ? "" : detail);
      std::fflush(stdout);
    }
  };
  int all = 0;
  check(rsarand_selftest(o.suites.empty() ? nullptr : o.suites.c_str(), &Log::cb, nullptr, &all));
  std::printf("selftest: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rsarand: parameterized RSA exponentiation-cipher pseudorandom number generator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rsarand_version()));
  Options o;

  auto stream_opts = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "master seed")->envname("RSARAND_SEED");
    c->add_option("--stream", o.stream, "stream id");
    c->add_option("--exp", o.exp, "encryption exponent, odd, in [3, 257]");
    c->add_option("--params", o.params_file, "parameter file written by `params` (overrides --seed/--stream/--exp)");
    c->add_option("--skip-mode", o.skip_mode, "lcg | unit | const:<v>");
    c->add_option("--weak-multiplier", o.weak_multiplier, "replace the skip multiplier (needs --test-mode)");
    c->add_flag("--test-mode", o.test_mode, "relax production parameter checks");
  };
  auto gen_opts = [&](CLI::App* c) {
    stream_opts(c);
    c->add_option("--lanes", o.lanes, "vector lanes (1 = scalar generator)")->check(CLI::PositiveNumber);
    c->add_option("--threads", o.threads, "worker threads over lanes")->check(CLI::PositiveNumber);
    c->add_option("--m0", o.m0, "initial message");
    c->add_option("--s0", o.s0, "initial skip");
    c->add_option("--restore", o.restore_file, "continue from a snapshot file");
  };

  auto* params = app.add_subcommand("params", "derive and print stream parameters");
  stream_opts(params);
  params->add_option("--out", o.out, "output path (default stdout)");

  auto* gen = app.add_subcommand("gen", "generate values");
  gen_opts(gen);
  gen->add_option("--count", o.count, "number of values")->default_val(1000);
  gen->add_option("--format", o.format, "raw64 | f64le | text");
  gen->add_option("--out", o.out, "output path (default stdout)");
  gen->add_option("--save-snapshot", o.snapshot_file, "write the stream snapshot after generating");

  auto* test = app.add_subcommand("test", "run the statistical battery");
  gen_opts(test);
  test->add_option("--count", o.count, "samples per test")->default_val(10'000'000);
  test->add_option("--tests", o.tests, "comma-separated tests or groups (all, lsb, serial, collision)");
  test->add_option("--interleave", o.interleave, "interstream mode over this many streams");
  test->add_option("--input", o.input, "test a file (- for stdin) instead of a generated stream");
  test->add_option("--input-format", o.input_format, "f64le | raw64 (raw64 uses --params or --seed/--stream for n)");
  test->add_option("--report-format", o.report_format, "text | json");
  test->add_option("--out", o.out, "report path (default stdout)");

  auto* bench = app.add_subcommand("bench", "measure generation throughput");
  gen_opts(bench);
  bench->add_option("--count", o.count, "timed values per configuration")->default_val(1'000'000'000);
  bench->add_option("--exps", o.bench_exps, "exponents to time")->delimiter(',');
  bench->add_option("--thread-counts", o.bench_threads, "thread counts to time (default 1 and all cores)")->delimiter(',');
  bench->add_option("--out", o.out, "report path (default stdout)");

  auto* selftest = app.add_subcommand("selftest", "run the built-in property suites");
  selftest->add_option("--suites", o.suites, "comma-separated suites (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*params) return cmd_params(o);
    if (*gen) return cmd_gen(o);
    if (*test) return cmd_test(o);
    if (*bench) return cmd_bench(o);
    if (*selftest) return cmd_selftest(o);
  } catch (const Failure& f) {
    std::cerr << "rsarand: " << f.message << '\n';
    return f.code;
  }
  return kExitUsage;
}
