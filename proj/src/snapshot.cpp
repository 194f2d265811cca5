#include "rsarand/snapshot.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <sstream>

#include "rsarand/error.hpp"

namespace rsarand {

namespace {

constexpr std::string_view kParamsHeader = "rsarand-params 1";
constexpr std::string_view kSnapshotHeader = "rsarand-snapshot 1";

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::malformed_snapshot, "malformed snapshot: " + what);
}

std::string hex(u64 v) {
  char buf[17];
  auto res = std::to_chars(buf, buf + sizeof buf, v, 16);
  return std::string(buf, res.ptr);
}

u64 parse_hex(std::string_view key, std::string_view s) {
  if (s.empty() || s.size() > 16) malformed("bad value for " + std::string(key));
  for (char ch : s) {
    if (!((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f')))
      malformed("value for " + std::string(key) + " is not lowercase hex");
  }
  u64 v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v, 16);
  return v;
}

using Fields = std::map<std::string, std::string, std::less<>>;

struct Document {
  std::string header;
  Fields fields;
};

Document parse_document(std::string_view text) {
  Document doc;
  bool have_header = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      doc.header = std::string(line);
      have_header = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) malformed("line without '=': " + std::string(line));
    auto [it, inserted] =
        doc.fields.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    if (!inserted) malformed("duplicate key " + it->first);
  }
  if (doc.header != kParamsHeader && doc.header != kSnapshotHeader)
    malformed("unknown header '" + doc.header + "'");
  return doc;
}

class FieldReader {
 public:
  explicit FieldReader(Fields& fields) : fields_(fields) {}

  std::string take_string(const std::string& key) {
    auto it = fields_.find(key);
    if (it == fields_.end()) malformed("missing key " + key);
    std::string v = std::move(it->second);
    fields_.erase(it);
    return v;
  }
  u64 take(const std::string& key) { return parse_hex(key, take_string(key)); }
  bool has(const std::string& key) const { return fields_.count(key) != 0; }

  void finish() const {
    if (!fields_.empty()) malformed("unknown key " + fields_.begin()->first);
  }

 private:
  Fields& fields_;
};

void write_params(std::ostringstream& os, const GeneratorParams& p) {
  os << "mode=" << (p.validation() == Validation::production ? "production" : "test") << '\n';
  os << "p1=" << hex(p.p1()) << '\n';
  os << "p2=" << hex(p.p2()) << '\n';
  os << "n=" << hex(p.n()) << '\n';
  os << "e=" << hex(p.e()) << '\n';
  os << "q=" << hex(p.skip().q()) << '\n';
  os << "a=" << hex(p.skip().a()) << '\n';
  os << "q1=" << hex(p.skip().q1()) << '\n';
  os << "q2=" << hex(p.skip().q2()) << '\n';
  os << "p2inv=" << hex(p.p2inv()) << '\n';
  os << "b=" << hex(p.b()) << '\n';
  os << "skip_mode=";
  switch (p.skip_mode().kind) {
    case SkipMode::Kind::lcg: os << "lcg"; break;
    case SkipMode::Kind::unit: os << "unit"; break;
    case SkipMode::Kind::constant: os << "const:" << hex(p.skip_mode().value); break;
  }
  os << '\n';
}

GeneratorParams read_params(FieldReader& in) {
  const std::string mode = in.take_string("mode");
  Validation validation;
  if (mode == "production") {
    validation = Validation::production;
  } else if (mode == "test") {
    validation = Validation::test;
  } else {
    malformed("mode must be production or test");
  }
  const u64 p1 = in.take("p1"), p2 = in.take("p2"), n = in.take("n"), e = in.take("e");
  const u64 q = in.take("q"), a = in.take("a"), q1 = in.take("q1"), q2 = in.take("q2");
  const u64 p2inv = in.take("p2inv"), b = in.take("b");
  const std::string skip = in.take_string("skip_mode");

  SkipMode skip_mode;
  if (skip == "lcg") {
    skip_mode = SkipMode::lcg();
  } else if (skip == "unit") {
    skip_mode = SkipMode::unit();
  } else if (skip.starts_with("const:")) {
    skip_mode = SkipMode::constant(parse_hex("skip_mode", std::string_view(skip).substr(6)));
  } else {
    malformed("unknown skip_mode '" + skip + "'");
  }

  std::optional<GeneratorParams> params;
  try {
    params = GeneratorParams::make(p1, p2, e, SkipParams::make(q, a, validation), skip_mode,
                                   validation);
  } catch (const InvalidParams& err) {
    malformed(err.what());
  }
  if (params->n() != n) malformed("n does not equal p1*p2");
  if (params->skip().q1() != q1 || params->skip().q2() != q2) malformed("q1/q2 inconsistent with q and a");
  if (params->p2inv() != p2inv) malformed("p2inv inconsistent with p1, p2");
  if (params->b() != b) malformed("b inconsistent with q and n");
  return *params;
}

GeneratorState read_state(FieldReader& in, const GeneratorParams& p, const std::string& suffix) {
  GeneratorState st;
  st.m1 = in.take("m1" + suffix);
  st.m2 = in.take("m2" + suffix);
  st.skip.s = in.take("s" + suffix);
  if (st.m1 >= p.p1() || st.m2 >= p.p2()) malformed("message residue out of range");
  if (st.skip.s == 0 || st.skip.s >= p.skip().q()) malformed("skip out of range");
  return st;
}

}  // namespace

std::string export_params(const GeneratorParams& params) {
  std::ostringstream os;
  os << kParamsHeader << '\n';
  write_params(os, params);
  return os.str();
}

GeneratorParams import_params(std::string_view text) {
  Document doc = parse_document(text);
  FieldReader in(doc.fields);
  return read_params(in);
}

std::string to_text(const StreamSnapshot& snap) {
  std::ostringstream os;
  os << kSnapshotHeader << '\n';
  write_params(os, snap.params);
  if (!snap.vector) {
    const auto& st = snap.lanes.at(0);
    os << "m1=" << hex(st.m1) << "\nm2=" << hex(st.m2) << "\ns=" << hex(st.skip.s) << '\n';
  } else {
    os << "lanes=" << hex(snap.lanes.size()) << '\n';
    os << "offset=" << hex(snap.offset) << '\n';
    for (std::size_t i = 0; i < snap.lanes.size(); ++i) {
      const auto& st = snap.lanes[i];
      os << "m1." << i << '=' << hex(st.m1) << '\n';
      os << "m2." << i << '=' << hex(st.m2) << '\n';
      os << "s." << i << '=' << hex(st.skip.s) << '\n';
    }
  }
  os << "count=" << hex(snap.count) << '\n';
  return os.str();
}

StreamSnapshot parse_snapshot(std::string_view text) {
  Document doc = parse_document(text);
  if (doc.header != kSnapshotHeader) malformed("expected a snapshot document, found params");
  FieldReader in(doc.fields);
  StreamSnapshot snap{read_params(in), {}, 0, false, 0};
  if (in.has("lanes")) {
    snap.vector = true;
    const u64 lanes = in.take("lanes");
    if (lanes == 0 || lanes > (u64{1} << 20)) malformed("lane count out of range");
    snap.offset = in.take("offset");
    if (snap.offset >= lanes) malformed("block offset out of range");
    for (u64 i = 0; i < lanes; ++i)
      snap.lanes.push_back(read_state(in, snap.params, "." + std::to_string(i)));
  } else {
    snap.lanes.push_back(read_state(in, snap.params, ""));
  }
  snap.count = in.take("count");
  in.finish();
  return snap;
}

StreamSnapshot snapshot(const Generator& gen) {
  return StreamSnapshot{gen.params(), {gen.state()}, gen.count(), false, 0};
}

Generator restore(const StreamSnapshot& snap) {
  if (snap.vector || snap.lanes.size() != 1)
    malformed("vector snapshot cannot be restored as a scalar stream");
  return Generator(snap.params, snap.lanes[0], snap.count);
}

StreamSnapshot snapshot(const VectorStream& stream) {
  return StreamSnapshot{stream.params(), stream.resume_lanes(), stream.count(), true, stream.pending_offset()};
}

VectorStream restore_vector(const StreamSnapshot& snap) {
  if (!snap.vector) malformed("scalar snapshot cannot be restored as a vector stream");
  return VectorStream(VectorState(snap.params, snap.lanes), snap.count, snap.offset);
}

}  // namespace rsarand
