#include "infdist/random.hpp"

namespace infdist {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream) {}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) noexcept {
  std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
    c0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
    c2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
    c1 = static_cast<std::uint32_t>(p1);
    c3 = static_cast<std::uint32_t>(p0);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

void Philox4x32::refill() noexcept {
  const Block ctr = {static_cast<std::uint32_t>(block_index_),
                     static_cast<std::uint32_t>(block_index_ >> 32),
                     static_cast<std::uint32_t>(stream_),
                     static_cast<std::uint32_t>(stream_ >> 32)};
  const Key key = {static_cast<std::uint32_t>(seed_),
                   static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = encrypt(ctr, key);
  ++block_index_;
  position_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (position_ == 2) refill();
  const unsigned w = 2 * position_++;
  return (static_cast<std::uint64_t>(buffer_[w + 1]) << 32) | buffer_[w];
}

void Philox4x32::discard(std::uint64_t n) noexcept {
  const std::uint64_t buffered = 2 - position_;
  if (n <= buffered) {
    position_ += static_cast<unsigned>(n);
    return;
  }
  n -= buffered;
  block_index_ += n / 2;
  position_ = 2;
  if (n % 2 != 0) {
    refill();
    position_ = 1;
  }
}

}  // namespace infdist
