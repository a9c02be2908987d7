#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace pagraph {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The 128-bit counter is split into a 64-bit block index (low words) and a
/// 64-bit stream id (high words). Two generators with the same key and
/// different stream ids therefore never share a counter value: each stream
/// owns 2^64 blocks, i.e. 2^65 64-bit outputs, before it could wrap.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Key = std::array<std::uint32_t, 2>;
  using Counter = std::array<std::uint32_t, 4>;

  Philox() : Philox(0, 0) {}
  Philox(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  /// Stream for replicate `stream` of an experiment keyed on `seed`.
  static Philox for_stream(std::uint64_t seed, std::uint64_t stream) { return Philox(seed, stream); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ >= 2) refill();
    return buffer_[pos_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  // Serializable state: the buffer is recomputed from (key, stream, block).
  struct State {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t next_block = 0;
    std::uint32_t pos = 2;
  };

  State state() const {
    return {std::uint64_t{key_[0]} | (std::uint64_t{key_[1]} << 32), stream_, next_block_, pos_};
  }

  static Philox from_state(const State& s) {
    Philox rng(s.seed, s.stream);
    if (s.pos < 2) {
      rng.next_block_ = s.next_block - 1;
      rng.refill();
      rng.pos_ = s.pos;
    } else {
      rng.next_block_ = s.next_block;
    }
    return rng;
  }

  friend bool operator==(const Philox& a, const Philox& b) {
    return a.key_ == b.key_ && a.stream_ == b.stream_ && a.next_block_ == b.next_block_ &&
           a.pos_ == b.pos_ && (a.pos_ >= 2 || a.buffer_ == b.buffer_);
  }

 private:
  void refill() {
    const Counter ctr{static_cast<std::uint32_t>(next_block_), static_cast<std::uint32_t>(next_block_ >> 32),
                      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const Counter out = block(ctr, key_);
    buffer_[0] = std::uint64_t{out[0]} | (std::uint64_t{out[1]} << 32);
    buffer_[1] = std::uint64_t{out[2]} | (std::uint64_t{out[3]} << 32);
    ++next_block_;
    pos_ = 0;
  }

  Key key_;
  std::uint64_t stream_ = 0;
  std::uint64_t next_block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  std::uint32_t pos_ = 2;
};

}  // namespace pagraph
