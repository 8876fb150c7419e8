#include "tle/rng.hpp"

#include "tle/normal.hpp"

namespace tle {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 2> derive_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(stream ^ splitmix64(tag)));
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter)
    : seed_(seed),
      stream_id_(stream_id),
      counter_(counter),
      key_(derive_key(seed, stream_id, 0)),
      addr_key_(derive_key(seed, stream_id, 1)) {}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t block = counter_ >> 1;
  if (block != cached_block_) {
    cache_ = philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0u, 0u},
                        key_);
    cached_block_ = block;
  }
  const unsigned lane = static_cast<unsigned>(counter_ & 1u) * 2u;
  ++counter_;
  return (static_cast<std::uint64_t>(cache_[lane + 1]) << 32) | cache_[lane];
}

double RngStream::uniform() { return u64_to_open_unit(next_u64()); }

double RngStream::normal() { return norm_quantile(uniform()); }

RngStream RngStream::substream(std::uint64_t a, std::uint64_t b) const {
  const std::uint64_t id = splitmix64(stream_id_ ^ splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ull)));
  return RngStream(seed_, id, 0);
}

double RngStream::uniform_at(std::uint64_t a, std::uint32_t b, std::uint32_t c) const {
  const auto out = philox4x32({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), b, c},
                              addr_key_);
  return u64_to_open_unit((static_cast<std::uint64_t>(out[1]) << 32) | out[0]);
}

}  // namespace tle
