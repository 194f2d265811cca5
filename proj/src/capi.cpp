#include "rsarand/rsarand.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "rsarand/error.hpp"
#include "rsarand/paramfactory.hpp"
#include "rsarand/selftest.hpp"
#include "rsarand/snapshot.hpp"
#include "rsarand/stats.hpp"

struct rsarand_params {
  rsarand::GeneratorParams value;
};

struct rsarand_stream {
  std::variant<rsarand::Generator, rsarand::VectorStream> value;
};

struct rsarand_source {
  std::unique_ptr<std::istream> file;  // owned input for file sources
  std::unique_ptr<rsarand::stats::Source> value;
};

struct rsarand_report {
  rsarand::stats::BatteryResult value;
};

namespace {

using rsarand::Error;
using rsarand::ErrorCode;

thread_local std::string last_error;

rsarand_status status_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return RSARAND_E_INVALID_ARGUMENT;
    case ErrorCode::invalid_params: return RSARAND_E_INVALID_PARAMS;
    case ErrorCode::invalid_seed: return RSARAND_E_INVALID_SEED;
    case ErrorCode::not_invertible: return RSARAND_E_NOT_INVERTIBLE;
    case ErrorCode::not_found: return RSARAND_E_NOT_FOUND;
    case ErrorCode::derivation_exhausted: return RSARAND_E_DERIVATION_EXHAUSTED;
    case ErrorCode::unsupported_skip_mode: return RSARAND_E_UNSUPPORTED_SKIP_MODE;
    case ErrorCode::malformed_snapshot: return RSARAND_E_MALFORMED_SNAPSHOT;
    case ErrorCode::insufficient_samples: return RSARAND_E_INSUFFICIENT_SAMPLES;
    case ErrorCode::tie_detected: return RSARAND_E_TIE_DETECTED;
    case ErrorCode::io: return RSARAND_E_IO;
  }
  return RSARAND_E_INTERNAL;
}

template <class Fn>
rsarand_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    last_error.clear();
    return RSARAND_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RSARAND_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RSARAND_E_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return RSARAND_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_list(const char* list) {
  std::vector<std::string> out;
  if (!list) return out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

rsarand::Validation validation_of(int test_mode) {
  return test_mode ? rsarand::Validation::test : rsarand::Validation::production;
}

}  // namespace

extern "C" {

const char* rsarand_version(void) { return "1.0.0"; }

const char* rsarand_last_error(void) { return last_error.c_str(); }

const char* rsarand_status_name(rsarand_status status) {
  switch (status) {
    case RSARAND_OK: return "ok";
    case RSARAND_E_INVALID_ARGUMENT: return "invalid_argument";
    case RSARAND_E_INVALID_PARAMS: return "invalid_params";
    case RSARAND_E_INVALID_SEED: return "invalid_seed";
    case RSARAND_E_NOT_INVERTIBLE: return "not_invertible";
    case RSARAND_E_NOT_FOUND: return "not_found";
    case RSARAND_E_DERIVATION_EXHAUSTED: return "derivation_exhausted";
    case RSARAND_E_UNSUPPORTED_SKIP_MODE: return "unsupported_skip_mode";
    case RSARAND_E_MALFORMED_SNAPSHOT: return "malformed_snapshot";
    case RSARAND_E_INSUFFICIENT_SAMPLES: return "insufficient_samples";
    case RSARAND_E_TIE_DETECTED: return "tie_detected";
    case RSARAND_E_IO: return "io";
    case RSARAND_E_INTERNAL: return "internal";
  }
  return "unknown";
}

void rsarand_string_free(char* s) { std::free(s); }

rsarand_status rsarand_params_derive(uint64_t master_seed, uint64_t stream_id, uint64_t e,
                                     rsarand_params** out) {
  return guarded([&] {
    require(out, "out must not be null");
    *out = new rsarand_params{rsarand::derive_stream_params({master_seed, stream_id}, e)};
  });
}

rsarand_status rsarand_params_from_text(const char* text, rsarand_params** out) {
  return guarded([&] {
    require(text && out, "text and out must not be null");
    *out = new rsarand_params{rsarand::import_params(text)};
  });
}

rsarand_status rsarand_params_to_text(const rsarand_params* params, char** out) {
  return guarded([&] {
    require(params && out, "params and out must not be null");
    *out = duplicate(rsarand::export_params(params->value));
  });
}

rsarand_status rsarand_params_get_info(const rsarand_params* params, rsarand_params_info* out) {
  return guarded([&] {
    require(params && out, "params and out must not be null");
    const auto& p = params->value;
    *out = rsarand_params_info{p.p1(),      p.p2(),       p.n(),           p.e(),       p.skip().q(),
                               p.skip().a(), p.skip().q1(), p.skip().q2(), p.p2inv(), p.b(),
                               RSARAND_SKIP_LCG, 0, p.validation() == rsarand::Validation::test};
    switch (p.skip_mode().kind) {
      case rsarand::SkipMode::Kind::lcg: out->skip_kind = RSARAND_SKIP_LCG; break;
      case rsarand::SkipMode::Kind::unit: out->skip_kind = RSARAND_SKIP_UNIT; break;
      case rsarand::SkipMode::Kind::constant:
        out->skip_kind = RSARAND_SKIP_CONSTANT;
        out->skip_value = p.skip_mode().value;
        break;
    }
  });
}

rsarand_status rsarand_params_with_skip_mode(const rsarand_params* params, rsarand_skip_kind kind,
                                             uint64_t value, rsarand_params** out) {
  return guarded([&] {
    require(params && out, "params and out must not be null");
    rsarand::SkipMode mode;
    switch (kind) {
      case RSARAND_SKIP_LCG: mode = rsarand::SkipMode::lcg(); break;
      case RSARAND_SKIP_UNIT: mode = rsarand::SkipMode::unit(); break;
      case RSARAND_SKIP_CONSTANT: mode = rsarand::SkipMode::constant(value); break;
      default: throw Error(ErrorCode::invalid_argument, "unknown skip kind");
    }
    *out = new rsarand_params{params->value.with_skip_mode(mode)};
  });
}

rsarand_status rsarand_params_with_multiplier(const rsarand_params* params, uint64_t a, int test_mode,
                                              rsarand_params** out) {
  return guarded([&] {
    require(params && out, "params and out must not be null");
    const auto& p = params->value;
    const auto v = validation_of(test_mode);
    *out = new rsarand_params{rsarand::GeneratorParams::make(
        p.p1(), p.p2(), p.e(), rsarand::SkipParams::make(p.skip().q(), a, v), p.skip_mode(), v)};
  });
}

rsarand_status rsarand_params_with_exponent(const rsarand_params* params, uint64_t e, int test_mode,
                                            rsarand_params** out) {
  return guarded([&] {
    require(params && out, "params and out must not be null");
    const auto& p = params->value;
    const auto v = validation_of(test_mode);
    *out = new rsarand_params{rsarand::GeneratorParams::make(
        p.p1(), p.p2(), e, rsarand::SkipParams::make(p.skip().q(), p.skip().a(), v), p.skip_mode(), v)};
  });
}

void rsarand_params_free(rsarand_params* params) { delete params; }

rsarand_status rsarand_stream_create(const rsarand_params* params, uint64_t m0, uint64_t s0, uint32_t lanes,
                                     rsarand_stream** out) {
  return guarded([&] {
    require(params && out, "params and out must not be null");
    require(lanes >= 1, "lanes must be >= 1");
    if (lanes == 1) {
      *out = new rsarand_stream{rsarand::Generator(params->value, m0, s0)};
    } else {
      *out = new rsarand_stream{rsarand::VectorStream(rsarand::init_vector(params->value, m0, s0, lanes))};
    }
  });
}

rsarand_status rsarand_stream_restore(const char* snapshot_text, rsarand_stream** out) {
  return guarded([&] {
    require(snapshot_text && out, "snapshot and out must not be null");
    const auto snap = rsarand::parse_snapshot(snapshot_text);
    if (snap.vector) {
      *out = new rsarand_stream{rsarand::restore_vector(snap)};
    } else {
      *out = new rsarand_stream{rsarand::restore(snap)};
    }
  });
}

rsarand_status rsarand_stream_snapshot(const rsarand_stream* stream, char** out) {
  return guarded([&] {
    require(stream && out, "stream and out must not be null");
    *out = duplicate(std::visit([](const auto& s) { return rsarand::to_text(rsarand::snapshot(s)); },
                                stream->value));
  });
}

rsarand_status rsarand_stream_set_threads(rsarand_stream* stream, unsigned threads) {
  return guarded([&] {
    require(stream, "stream must not be null");
    if (auto* v = std::get_if<rsarand::VectorStream>(&stream->value)) v->set_threads(threads);
  });
}

rsarand_status rsarand_stream_next_f64(rsarand_stream* stream, double* out, size_t count) {
  return guarded([&] {
    require(stream && (out || count == 0), "stream and out must not be null");
    std::visit([&](auto& s) { s.fill_f64(std::span(out, count)); }, stream->value);
  });
}

rsarand_status rsarand_stream_next_raw(rsarand_stream* stream, uint64_t* out, size_t count) {
  return guarded([&] {
    require(stream && (out || count == 0), "stream and out must not be null");
    std::visit([&](auto& s) { s.fill_raw(std::span(out, count)); }, stream->value);
  });
}

rsarand_status rsarand_stream_modulus(const rsarand_stream* stream, uint64_t* n) {
  return guarded([&] {
    require(stream && n, "stream and n must not be null");
    *n = std::visit([](const auto& s) { return s.params().n(); }, stream->value);
  });
}

void rsarand_stream_free(rsarand_stream* stream) { delete stream; }

rsarand_status rsarand_source_from_stream(rsarand_stream* stream, rsarand_source** out) {
  return guarded([&] {
    require(stream && out, "stream and out must not be null");
    std::unique_ptr<rsarand_stream> owned(stream);
    auto src = std::make_unique<rsarand_source>();
    if (auto* g = std::get_if<rsarand::Generator>(&owned->value)) {
      src->value = std::make_unique<rsarand::stats::GeneratorSource>(std::move(*g));
    } else {
      src->value = std::make_unique<rsarand::stats::VectorSource>(
          std::move(std::get<rsarand::VectorStream>(owned->value)));
    }
    *out = src.release();
  });
}

rsarand_status rsarand_source_interleaved(uint64_t master_seed, uint64_t first_stream, uint32_t count,
                                          uint64_t e, rsarand_source** out) {
  return guarded([&] {
    require(out, "out must not be null");
    require(count >= 1, "interleave count must be >= 1");
    const auto a = rsarand::default_multipliers()[0];
    const auto common = rsarand::SkipParams::make(rsarand::kSkipModulus, a);
    std::vector<rsarand::Generator> streams;
    streams.reserve(count);
    for (uint32_t k = 0; k < count; ++k) {
      const auto p = rsarand::derive_stream_params({master_seed, first_stream + k}, e);
      streams.emplace_back(p.with_skip(common), 0, 1);
    }
    auto src = std::make_unique<rsarand_source>();
    src->value = std::make_unique<rsarand::stats::InterleavedSource>(std::move(streams));
    *out = src.release();
  });
}

rsarand_status rsarand_source_from_file(const char* path, rsarand_input_format format, uint64_t modulus,
                                        rsarand_source** out) {
  return guarded([&] {
    require(path && out, "path and out must not be null");
    auto src = std::make_unique<rsarand_source>();
    std::istream* in = &std::cin;
    if (std::strcmp(path, "-") != 0) {
      auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file) throw Error(ErrorCode::io, std::string("cannot open ") + path);
      in = file.get();
      src->file = std::move(file);
    }
    const auto fmt = format == RSARAND_INPUT_RAW64 ? rsarand::stats::InputFormat::raw64
                                                   : rsarand::stats::InputFormat::f64le;
    src->value = std::make_unique<rsarand::stats::ReaderSource>(*in, fmt, modulus);
    *out = src.release();
  });
}

void rsarand_source_free(rsarand_source* source) { delete source; }

rsarand_status rsarand_battery_run(rsarand_source* source, uint64_t samples, const char* tests,
                                   rsarand_report** out) {
  return guarded([&] {
    require(source && out, "source and out must not be null");
    rsarand::stats::BatteryConfig config{samples, split_list(tests)};
    *out = new rsarand_report{rsarand::stats::run_battery(*source->value, config)};
  });
}

rsarand_status rsarand_battery_test_names(char** out) {
  return guarded([&] {
    require(out, "out must not be null");
    std::string joined;
    for (const auto& n : rsarand::stats::battery_test_names()) {
      if (!joined.empty()) joined += ',';
      joined += n;
    }
    *out = duplicate(joined);
  });
}

size_t rsarand_report_count(const rsarand_report* report) { return report ? report->value.reports.size() : 0; }

rsarand_status rsarand_report_get(const rsarand_report* report, size_t index, rsarand_test_result* out) {
  return guarded([&] {
    require(report && out, "report and out must not be null");
    require(index < report->value.reports.size(), "report index out of range");
    const auto& r = report->value.reports[index];
    *out = rsarand_test_result{r.name.c_str(),
                               r.params.c_str(),
                               r.message.c_str(),
                               static_cast<rsarand_selector>(r.selector),
                               r.samples,
                               r.result.statistic,
                               r.result.dof,
                               r.result.p_value,
                               static_cast<int>(r.status),
                               r.pass_1e3(),
                               r.pass_1e6()};
  });
}

rsarand_status rsarand_report_summary_get(const rsarand_report* report, rsarand_report_summary* out) {
  return guarded([&] {
    require(report && out, "report and out must not be null");
    const auto& r = report->value;
    *out = rsarand_report_summary{r.completed,         r.skipped, r.errors,        r.outside_1e6,
                                  r.outside_1e3,       r.expected_outside_1e3,     r.sigma_outside_1e3,
                                  r.rate_consistent, r.passed()};
  });
}

rsarand_status rsarand_report_to_string(const rsarand_report* report, rsarand_report_format format, char** out) {
  return guarded([&] {
    require(report && out, "report and out must not be null");
    *out = duplicate(format == RSARAND_REPORT_JSON ? rsarand::stats::format_json(report->value)
                                                   : rsarand::stats::format_text(report->value));
  });
}

void rsarand_report_free(rsarand_report* report) { delete report; }

rsarand_status rsarand_selftest(const char* suites, rsarand_selftest_callback callback, void* user,
                                int* all_passed) {
  return guarded([&] {
    require(all_passed, "all_passed must not be null");
    const auto results = rsarand::run_selftest(split_list(suites), [&](const rsarand::SuiteResult& r) {
      if (callback) callback(r.name.c_str(), r.passed, r.detail.c_str(), r.seconds, user);
    });
    *all_passed = 1;
    for (const auto& r : results) *all_passed &= r.passed ? 1 : 0;
  });
}

}  // extern "C"
