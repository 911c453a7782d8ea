#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ipd {

// Philox4x32-10 block function; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

// Counter-based random stream. The pair (seed, stream_id) fully determines
// the draw sequence: the seed is the Philox key and the stream id occupies
// the upper half of the 128-bit counter, so distinct streams never overlap.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Fresh stream with the same seed, positioned at its first draw.
  RngStream substream(std::uint64_t stream_id) const noexcept { return {seed_, stream_id}; }

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform integer in [0, n); unbiased. n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  // Standard normal via Box-Muller.
  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int consumed_ = 4;  // 32-bit words of block_ already used
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// n i.i.d. uniform draws from {0, ..., n-1}.
std::vector<std::size_t> resample_indices(std::size_t n, RngStream& rng);

// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace ipd
