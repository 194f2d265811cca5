#include "rsarand/vecgen.hpp"

#include <algorithm>
#include <thread>

#include "rsarand/error.hpp"

namespace rsarand {

VectorState::VectorState(const GeneratorParams& params, std::span<const GeneratorState> lanes)
    : params_(params) {
  if (lanes.empty()) throw Error(ErrorCode::invalid_argument, "lane count must be >= 1");
  m1_.reserve(lanes.size());
  m2_.reserve(lanes.size());
  s_.reserve(lanes.size());
  for (const auto& st : lanes) {
    m1_.push_back(st.m1);
    m2_.push_back(st.m2);
    s_.push_back(st.skip.s);
  }
}

std::vector<GeneratorState> VectorState::lane_states() const {
  std::vector<GeneratorState> out(lanes());
  for (std::size_t g = 0; g < lanes(); ++g) out[g] = lane(g);
  return out;
}

void VectorState::advance_raw(std::size_t first, std::size_t last, std::size_t blocks,
                              std::span<u64> out) noexcept {
  const std::size_t width = lanes();
  for (std::size_t b = 0; b < blocks; ++b) {
    u64* row = out.data() + b * width;
    for (std::size_t g = first; g < last; ++g) {
      GeneratorState st{m1_[g], m2_[g], {s_[g]}};
      row[g] = next_raw(st, params_);
      m1_[g] = st.m1;
      m2_[g] = st.m2;
      s_[g] = st.skip.s;
    }
  }
}

VectorState init_vector(const GeneratorParams& params, u64 m0, u64 s0, std::size_t lanes) {
  if (lanes == 0) throw Error(ErrorCode::invalid_argument, "lane count must be >= 1");
  if (lanes > 1 && params.skip_mode().kind != SkipMode::Kind::lcg) {
    throw Error(ErrorCode::unsupported_skip_mode,
                "multiple lanes need the lcg skip mode; use one lane for unit or constant skips");
  }
  const GeneratorState base = init(params, m0, s0);
  const auto seeds = lane_offset_seeds(params.skip(), base.skip.s, lanes);
  std::vector<GeneratorState> states(lanes, base);
  for (std::size_t g = 0; g < lanes; ++g) states[g].skip.s = seeds[g];
  return VectorState(params, states);
}

void next_block_raw(VectorState& state, std::span<u64> out) noexcept {
  state.advance_raw(0, state.lanes(), 1, out);
}

void next_block(VectorState& state, std::span<double> out) noexcept {
  std::vector<u64> raw(state.lanes());
  next_block_raw(state, raw);
  const u64 n = state.params().n();
  for (std::size_t g = 0; g < raw.size(); ++g) out[g] = to_unit(raw[g], n);
}

void next_blocks_raw(VectorState& state, std::span<u64> out, unsigned threads) {
  const std::size_t width = state.lanes();
  const std::size_t blocks = out.size() / width;
  if (blocks == 0) return;
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(width));
  if (threads == 1) {
    state.advance_raw(0, width, blocks, out);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t first = width * t / threads, last = width * (t + 1) / threads;
    workers.emplace_back([&state, first, last, blocks, out] { state.advance_raw(first, last, blocks, out); });
  }
  // jthread joins on destruction: the barrier before returning the blocks.
}

VectorStream::VectorStream(VectorState state, u64 count, u64 offset) : state_(std::move(state)) {
  if (offset >= lanes()) throw Error(ErrorCode::invalid_argument, "block offset out of range");
  if (offset != 0) {
    before_pending_ = state_.lane_states();
    pending_.resize(lanes());
    next_block_raw(state_, pending_);
    pos_ = offset;
  }
  count_ = count;
}

void VectorStream::fill_raw(std::span<u64> out) {
  std::size_t done = 0;
  while (done < out.size() && pos_ < pending_.size()) out[done++] = pending_[pos_++];
  if (pos_ == pending_.size()) {
    pending_.clear();
    pos_ = 0;
  }
  const std::size_t width = lanes();
  const std::size_t whole = (out.size() - done) / width * width;
  next_blocks_raw(state_, out.subspan(done, whole), threads_);
  done += whole;
  if (done < out.size()) {
    before_pending_ = state_.lane_states();
    pending_.resize(width);
    next_block_raw(state_, pending_);
    while (done < out.size()) out[done++] = pending_[pos_++];
  }
  count_ += out.size();
}

void VectorStream::fill_f64(std::span<double> out) {
  constexpr std::size_t kChunk = 1 << 14;
  std::vector<u64> raw(std::min(out.size(), kChunk));
  const u64 n = params().n();
  for (std::size_t i = 0; i < out.size(); i += raw.size()) {
    const std::size_t len = std::min(raw.size(), out.size() - i);
    fill_raw(std::span(raw).first(len));
    for (std::size_t j = 0; j < len; ++j) out[i + j] = to_unit(raw[j], n);
  }
}

std::vector<GeneratorState> VectorStream::resume_lanes() const {
  return pending_.empty() ? state_.lane_states() : before_pending_;
}

}  // namespace rsarand
