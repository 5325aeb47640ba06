#pragma once

#include <cstdint>
#include <initializer_list>

namespace kcenter {

// Counter-based seed derivation. All randomness in the library flows from a
// root seed through these so results never depend on execution order.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = splitmix64(root);
  for (auto t : tags) s = mix(s, t);
  return s;
}

/// Uniform double in [0, 1) from a 64-bit key.
constexpr double unit_interval(std::uint64_t key) noexcept {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

}  // namespace kcenter
