#include "vri/rng.hpp"

#include <cmath>
#include <numbers>

namespace vri {

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (x_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Pcg64::Pcg64(std::uint64_t seed, std::uint64_t stream) noexcept {
  SplitMix64 sm(seed);
  const uint128 s1 = sm.next();
  const uint128 s2 = sm.next();
  const uint128 s3 = sm.next();
  seed_setseq((s1 << 64) | s2, (s3 << 64) | uint128{stream});
}

Pcg64 Pcg64::from_state(uint128 initstate, uint128 initseq) noexcept {
  Pcg64 rng;
  rng.seed_setseq(initstate, initseq);
  return rng;
}

void Pcg64::seed_setseq(uint128 initstate, uint128 initseq) noexcept {
  state_ = 0;
  inc_ = (initseq << 1) | 1;
  step();
  state_ += initstate;
  step();
}

std::uint64_t Pcg64::next() noexcept {
  step();
  const auto value = static_cast<std::uint64_t>(state_ >> 64) ^ static_cast<std::uint64_t>(state_);
  const auto rot = static_cast<unsigned>(state_ >> 122);
  return (value >> rot) | (value << ((64U - rot) & 63U));
}

double Pcg64::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Pcg64::uniform_open() noexcept {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Pcg64::bounded(std::uint64_t n) noexcept {
  // Lemire, "Fast random integer generation in an interval" (2019).
  uint128 m = uint128{next()} * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = uint128{next()} * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Pcg64::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace vri
