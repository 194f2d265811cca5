#pragma once

// Versioned key=value text for parameter sets and stream snapshots. All
// numeric values are lowercase hexadecimal without a prefix.
//
//   rsarand-params 1            rsarand-snapshot 1
//   mode=production             (params keys as on the left)
//   p1=... p2=... n=... e=...   m1=... m2=... s=...     scalar stream
//   q=... a=... q1=... q2=...   lanes=... offset=...    vector stream, with
//   p2inv=... b=...             m1.<i>= m2.<i>= s.<i>=  one triple per lane
//   skip_mode=lcg|unit|const:<hex>                count=...

#include <string>
#include <string_view>
#include <vector>

#include "rsarand/generator.hpp"
#include "rsarand/vecgen.hpp"

namespace rsarand {

struct StreamSnapshot {
  GeneratorParams params;
  std::vector<GeneratorState> lanes;  // one entry for a scalar stream
  u64 count = 0;                      // values drawn so far
  bool vector = false;                // written with per-lane keys
  u64 offset = 0;  // vector streams: values of the block generated from `lanes` already consumed
};

std::string export_params(const GeneratorParams& params);

/// Parses either a params or a snapshot document and returns its params.
/// Throws Error(malformed_snapshot) on any syntax or invariant problem.
GeneratorParams import_params(std::string_view text);

std::string to_text(const StreamSnapshot& snapshot);
StreamSnapshot parse_snapshot(std::string_view text);

StreamSnapshot snapshot(const Generator& gen);
Generator restore(const StreamSnapshot& snapshot);

StreamSnapshot snapshot(const VectorStream& stream);
/// Throws Error(malformed_snapshot) for a scalar snapshot.
VectorStream restore_vector(const StreamSnapshot& snapshot);

}  // namespace rsarand
