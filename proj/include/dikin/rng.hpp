#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. SC 2011).
// Substreams are keyed by (seed, purpose, step, draw); any substream can be
// regenerated independently, which is what makes estimator draws both
// reproducible and safely parallelizable.

#include <array>
#include <cmath>
#include <cstdint>

namespace dikin {

enum class StreamPurpose : std::uint8_t {
  Proposal = 1,
  Accept = 2,
  EstimatorV = 3,
  EstimatorT = 4,
  Instance = 5,
  Generic = 6,
};

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += 0x9E3779B9u;
  key[1] += 0xBB67AE85u;
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
  for (int i = 0; i < 10; ++i) philox_round(ctr, key);
  return ctr;
}

}  // namespace detail

// One independent substream of the generator, identified by
// (seed, purpose, step, draw). Counter lanes are disjoint — c0 holds the
// running block index, c1 packs purpose and draw, c2/c3 hold the step — so
// distinct substreams never produce overlapping counters. Consuming state is
// just the block index; everything else is fixed at construction.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t step, std::uint64_t draw = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        lane1_((static_cast<std::uint32_t>(purpose) << 24) |
               static_cast<std::uint32_t>(draw & 0x00FFFFFFu)),
        step_lo_(static_cast<std::uint32_t>(step)),
        step_hi_(static_cast<std::uint32_t>(step >> 32)) {}

  std::uint64_t next_u64() {
    if (have_spare_u64_) {
      have_spare_u64_ = false;
      return spare_u64_;
    }
    const auto out = detail::philox10(
        {static_cast<std::uint32_t>(block_++), lane1_, step_lo_, step_hi_}, key_);
    spare_u64_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    have_spare_u64_ = true;
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  }

  // Uniform on the open interval (0, 1); never returns an exact endpoint.
  double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Standard normal via Box-Muller; pairs are cached.
  double gaussian() {
    if (have_spare_gauss_) {
      have_spare_gauss_ = false;
      return spare_gauss_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_gauss_ = r * std::sin(a);
    have_spare_gauss_ = true;
    return r * std::cos(a);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t lane1_ = 0;
  std::uint32_t step_lo_ = 0;
  std::uint32_t step_hi_ = 0;
  std::uint64_t block_ = 0;
  std::uint64_t spare_u64_ = 0;
  bool have_spare_u64_ = false;
  double spare_gauss_ = 0.0;
  bool have_spare_gauss_ = false;
};

}  // namespace dikin
