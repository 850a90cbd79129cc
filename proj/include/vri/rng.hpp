#pragma once

// Pinned pseudo-random source. Every seeded output of this project is a
// function of the algorithm below, so the constants are part of the file
// format contract and must never change.
//
//   * Core generator: PCG64, i.e. a 128-bit LCG
//       state <- state * 0x2360ED051FC65DA44385DF649FCCF645 + inc  (mod 2^128)
//     with the XSL-RR output function
//       out = rotr64(hi64(state) ^ lo64(state), state >> 122)
//     The state is advanced before each output.
//   * Seeding (seed, stream): SplitMix64 initialised at `seed` yields s1, s2, s3;
//       initstate = s1:s2,  initseq = s3:stream
//     followed by the standard PCG set-seq procedure
//       state = 0; inc = (initseq << 1) | 1; step; state += initstate; step.
//   * uniform():       (next() >> 11) * 2^-53, in [0, 1)
//   * uniform_open():  ((next() >> 11) + 0.5) * 2^-53, in (0, 1)
//   * bounded(n):      Lemire multiply-shift with rejection, in [0, n)
//   * normal():        Box-Muller on two uniform_open() draws, both outputs used

#include <cstdint>
#include <span>

namespace vri {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : x_(seed) {}
  std::uint64_t next() noexcept;

 private:
  std::uint64_t x_;
};

class Pcg64 {
 public:
  using result_type = std::uint64_t;
  __extension__ typedef unsigned __int128 uint128;

  /// Stream `stream` of seed `seed`; distinct streams are independent
  /// sequences, so per-realization work can be seeded by index.
  explicit Pcg64(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  /// Raw PCG set-seq initialisation (reference vectors use this form).
  static Pcg64 from_state(uint128 initstate, uint128 initseq) noexcept;

  std::uint64_t next() noexcept;
  std::uint64_t operator()() noexcept { return next(); }
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

  double uniform() noexcept;
  double uniform_open() noexcept;
  std::uint64_t bounded(std::uint64_t n) noexcept;
  double normal() noexcept;

 private:
  Pcg64() = default;
  void step() noexcept { state_ = state_ * kMultiplier + inc_; }
  void seed_setseq(uint128 initstate, uint128 initseq) noexcept;

  static constexpr uint128 kMultiplier =
      (uint128{0x2360ED051FC65DA4ULL} << 64) | uint128{0x4385DF649FCCF645ULL};

  uint128 state_ = 0;
  uint128 inc_ = 1;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// In-place Fisher-Yates shuffle driven by `rng.bounded`.
template <typename T>
void shuffle(std::span<T> values, Pcg64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace vri
