#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace infdist {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 128-bit counter is split into a 64-bit block index (low words) and a
// 64-bit stream id (high words), so generators constructed with the same seed
// and different stream ids never overlap. Each 128-bit block yields two
// 64-bit outputs (word 1 : word 0, then word 3 : word 2). Satisfies
// std::uniform_random_bit_generator.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr const char* kName = "philox4x32-10";

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Skips n 64-bit outputs.
  void discard(std::uint64_t n) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // The raw bijection: ten rounds of the Philox S-box over (counter, key).
  static Block encrypt(Block counter, Key key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  unsigned position_ = 2;
};

// Convenience wrapper handing out the variates the samplers need.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : engine_(seed, stream) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(engine_); }

  bool coin() noexcept { return (engine_() & 1u) != 0; }

  Philox4x32& engine() noexcept { return engine_; }

 private:
  Philox4x32 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace infdist
