#pragma once

#include <array>
#include <cstdint>

namespace fpboot {

// Philox4x64-10 block function (Salmon et al., Random123). Pure: the same
// (counter, key) always maps to the same four words.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) noexcept;

// Counter-based random stream. The key is (master_seed, stream_id), the
// counter enumerates blocks, so two streams never share state and a stream
// is reproducible from its two identifiers alone.
//
// Not thread-safe; give each worker its own stream_id.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : key_{master_seed, stream_id} {}

  std::uint64_t master_seed() const noexcept { return key_[0]; }
  std::uint64_t stream_id() const noexcept { return key_[1]; }

  // Each Philox block yields four 64-bit words, consumed as eight 32-bit
  // halves (low half first); an aligned next_u64() returns a whole word.
  std::uint32_t next_u32() noexcept {
    if (pos_ == 8) refill();
    const std::uint64_t word = buf_[pos_ >> 1];
    const auto half = static_cast<std::uint32_t>((pos_ & 1) ? word >> 32 : word);
    ++pos_;
    return half;
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bound >= 1. Lemire's multiply-and-reject,
  // exactly unbiased; bounds up to 2^32 use one 32-bit draw.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept {
    if (bound <= 0x100000000ULL) {
      std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * bound;
      auto low = static_cast<std::uint32_t>(m);
      if (low < bound) {
        const auto threshold = static_cast<std::uint32_t>((0x100000000ULL - bound) % bound);
        while (low < threshold) {
          m = static_cast<std::uint64_t>(next_u32()) * bound;
          low = static_cast<std::uint32_t>(m);
        }
      }
      return m >> 32;
    }
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller (one variate per call; the pair's second
  // half is discarded to keep the draw count per call fixed).
  double normal() noexcept;

 private:
  void refill() noexcept {
    buf_ = philox4x64({block_, 0, 0, 0}, key_);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint64_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buf_{};
  unsigned pos_ = 8;
};

RngStream make_rng(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

}  // namespace fpboot
