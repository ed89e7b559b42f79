#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace evidence::numkit {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The key is
// the 64-bit seed; the upper half of the 128-bit counter carries the stream
// id, the lower half counts blocks. Streams with distinct (seed, stream)
// pairs never share a counter value.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Raw block function, exposed for the known-answer test.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_word_ = 4;
};

// A reproducible random stream keyed by (seed, stream id). Never shared
// between threads: each task owns its own stream.
class RngStream {
 public:
  using result_type = Philox4x32::result_type;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Independent child stream; the same (parent, index) always yields the
  // same child.
  RngStream substream(std::uint64_t index) const;

  static constexpr result_type min() noexcept { return Philox4x32::min(); }
  static constexpr result_type max() noexcept { return Philox4x32::max(); }
  result_type operator()() noexcept { return engine_(); }

  // Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() noexcept;
  double normal();
  double gamma(double shape, double rate);
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
};

// SplitMix64 finaliser, used to derive child stream ids.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace evidence::numkit
