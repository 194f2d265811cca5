#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "rsarand/error.hpp"
#include "rsarand/paramfactory.hpp"
#include "rsarand/snapshot.hpp"

using namespace rsarand;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_snapshot(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io;  // sentinel: parsed fine
}

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
  const auto at = text.find("\n" + key + "=");
  const auto end = text.find('\n', at + 1);
  return text.substr(0, at + 1) + line + text.substr(end);
}

}  // namespace

TEST(Snapshot, ParamsRoundTrip) {
  for (u64 id = 0; id < 5; ++id) {
    const GeneratorParams p = derive_stream_params({3, id}, 17);
    const std::string text = export_params(p);
    EXPECT_EQ(text.rfind("rsarand-params 1\n", 0), 0u);
    EXPECT_TRUE(import_params(text) == p);
  }
  const GeneratorParams p = derive_stream_params({0, 0});
  const std::string text = export_params(p);
  EXPECT_NE(text.find("p1=80000087\n"), std::string::npos);
  EXPECT_NE(text.find("n=8000001e7fff91c9\n"), std::string::npos);
  EXPECT_NE(text.find("b=1ff272af593f1281\n"), std::string::npos);
  const GeneratorParams unit = p.with_skip_mode(SkipMode::unit());
  EXPECT_TRUE(import_params(export_params(unit)) == unit);
  const GeneratorParams cst = p.with_skip_mode(SkipMode::constant(0xabc));
  EXPECT_NE(export_params(cst).find("skip_mode=const:abc"), std::string::npos);
  EXPECT_TRUE(import_params(export_params(cst)) == cst);
}

TEST(Snapshot, ScalarResumeIsIdentical) {
  Generator g(derive_stream_params({0, 1}), 10, 20);
  std::vector<u64> head(1234);
  g.fill_raw(head);
  const std::string text = to_text(snapshot(g));
  Generator restored = restore(parse_snapshot(text));
  EXPECT_EQ(restored.count(), 1234u);
  for (int i = 0; i < 5000; ++i) ASSERT_EQ(restored.next_raw(), g.next_raw());
}

TEST(Snapshot, VectorResumeMidBlock) {
  const GeneratorParams p = derive_stream_params({0, 2});
  for (std::size_t lanes : {2u, 8u, 64u}) {
    for (std::size_t consumed : {0u, 1u, 63u, 64u, 100u}) {
      VectorStream a(init_vector(p, 0, 1, lanes));
      std::vector<u64> head(consumed);
      a.fill_raw(head);
      const StreamSnapshot snap = parse_snapshot(to_text(snapshot(a)));
      EXPECT_TRUE(snap.vector);
      EXPECT_EQ(snap.lanes.size(), lanes);
      VectorStream b = restore_vector(snap);
      EXPECT_EQ(b.count(), consumed);
      std::vector<u64> x(777), y(777);
      a.fill_raw(x);
      b.fill_raw(y);
      ASSERT_EQ(x, y) << lanes << " " << consumed;
    }
  }
}

TEST(Snapshot, KindMismatchIsRejected) {
  const GeneratorParams p = derive_stream_params({0, 0});
  Generator g(p);
  EXPECT_THROW(restore_vector(snapshot(g)), Error);
}

TEST(Snapshot, TamperingIsDetected) {
  Generator g(derive_stream_params({0, 0}));
  g.next_raw();
  const std::string good = to_text(snapshot(g));
  ASSERT_EQ(code_of(good), ErrorCode::io);

  const std::vector<std::string> bad = {
      "",
      "rsarand-snapshot 2\n" + good.substr(good.find('\n') + 1),
      replace_line(good, "n", "n=8000001e7fff91c8"),
      replace_line(good, "p1", "p1=80000089"),
      replace_line(good, "q1", "q1=f64c57b3"),
      replace_line(good, "p2inv", "p2inv=64357241"),
      replace_line(good, "b", "b=1ff272af593f1280"),
      replace_line(good, "m1", "m1=80000087"),
      replace_line(good, "s", "s=0"),
      replace_line(good, "s", "s=7fffffffffffffe7"),
      replace_line(good, "e", "e=2"),
      replace_line(good, "mode", "mode=fast"),
      replace_line(good, "skip_mode", "skip_mode=wobble"),
      replace_line(good, "count", "count=XYZ"),
      replace_line(good, "count", "count=1\nextra=1"),
      replace_line(good, "count", "count=1\ncount=2"),
      replace_line(good, "a", "a=3"),
      good.substr(0, good.find("\nm2=")) + "\n",
  };
  for (const auto& text : bad) EXPECT_EQ(code_of(text), ErrorCode::malformed_snapshot) << text;
}

TEST(Snapshot, TestModeParamsRoundTrip) {
  const GeneratorParams p =
      GeneratorParams::make(11, 23, 3, SkipParams::make(13, 2, Validation::test), SkipMode::lcg(), Validation::test);
  const std::string text = export_params(p);
  EXPECT_NE(text.find("mode=test"), std::string::npos);
  EXPECT_TRUE(import_params(text) == p);
}
