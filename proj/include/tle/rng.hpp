#pragma once

#include <array>
#include <cstdint>

namespace tle {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based random stream.
///
/// The full state is (seed, stream_id, counter): two streams with the same
/// triple produce the same sequence, and distinct stream ids are keyed
/// independently. `uniform_at` gives addressed draws that do not advance the
/// stream, which is how sweeps map (sweep, line, grid index) to a fixed
/// uniform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by inverse CDF.
  double normal();

  /// Independent stream derived from this one's identity and (a, b).
  RngStream substream(std::uint64_t a, std::uint64_t b = 0) const;

  /// Addressed uniform in (0, 1); depends only on (seed, stream_id, a, b, c).
  double uniform_at(std::uint64_t a, std::uint32_t b, std::uint32_t c) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> addr_key_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint32_t, 4> cache_{};
};

inline double u64_to_open_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace tle
