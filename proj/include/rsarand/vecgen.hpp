#pragma once

// Lane-vectorized generation. Mv lanes share one parameter set; lane g
// starts at skip s0 * a^(g * floor((q-1)/Mv)) so the lanes walk widely
// separated stretches of the skip period. A block holds one draw per lane,
// in lane order.

#include <cstddef>
#include <span>
#include <vector>

#include "rsarand/generator.hpp"

namespace rsarand {

inline constexpr std::size_t kDefaultLanes = 64;

/// Lane states stored as separate arrays so the per-lane update vectorizes.
class VectorState {
 public:
  VectorState(const GeneratorParams& params, std::span<const GeneratorState> lanes);

  const GeneratorParams& params() const noexcept { return params_; }
  std::size_t lanes() const noexcept { return m1_.size(); }
  GeneratorState lane(std::size_t g) const noexcept { return {m1_[g], m2_[g], {s_[g]}}; }
  std::vector<GeneratorState> lane_states() const;

  /// Advances lanes [first, last) by `blocks` steps and writes the raw
  /// outputs to out[b * lanes() + g].
  void advance_raw(std::size_t first, std::size_t last, std::size_t blocks, std::span<u64> out) noexcept;

 private:
  GeneratorParams params_;
  std::vector<u64> m1_, m2_, s_;
};

/// Lane g gets message m0 and the g-th lane-offset skip. Mv > 1 requires
/// the lcg skip mode: unit and constant skips would make every lane equal.
VectorState init_vector(const GeneratorParams& params, u64 m0 = 0, u64 s0 = 1,
                        std::size_t lanes = kDefaultLanes);

/// One block of doubles, out.size() == lanes.
void next_block(VectorState& state, std::span<double> out) noexcept;
void next_block_raw(VectorState& state, std::span<u64> out) noexcept;

/// `out.size() / lanes` consecutive blocks, with lanes partitioned over
/// `threads` workers. Output is identical for every thread count.
void next_blocks_raw(VectorState& state, std::span<u64> out, unsigned threads = 1);

/// Sequential value stream over a VectorState: hands out block values in
/// order and keeps the unread tail of a partially consumed block, so draws
/// of any size concatenate to the same sequence.
class VectorStream {
 public:
  explicit VectorStream(VectorState state) : state_(std::move(state)) {}
  /// Resumes from a snapshot taken at `offset` values into a block.
  VectorStream(VectorState state, u64 count, u64 offset);

  void fill_raw(std::span<u64> out);
  void fill_f64(std::span<double> out);

  void set_threads(unsigned threads) noexcept { threads_ = threads == 0 ? 1 : threads; }
  unsigned threads() const noexcept { return threads_; }

  const GeneratorParams& params() const noexcept { return state_.params(); }
  std::size_t lanes() const noexcept { return state_.lanes(); }
  u64 count() const noexcept { return count_; }

  /// Lane states from which the pending block is regenerated, plus the
  /// number of its values already consumed.
  std::vector<GeneratorState> resume_lanes() const;
  u64 pending_offset() const noexcept { return pending_.empty() ? 0 : lanes() - (pending_.size() - pos_); }

 private:
  VectorState state_;
  std::vector<GeneratorState> before_pending_;
  std::vector<u64> pending_;
  std::size_t pos_ = 0;
  u64 count_ = 0;
  unsigned threads_ = 1;
};

}  // namespace rsarand
