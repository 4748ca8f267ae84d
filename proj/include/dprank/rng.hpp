#pragma once

#include <cstdint>
#include <random>

namespace dprank {

// splitmix64 finalizer, used to mix seeds with stream ids so that
// derived generators are decorrelated.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ b);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(a, b) ^ c);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(mix64(seed));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix64(seed, stream));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t s1,
                                std::uint64_t s2) {
  return std::mt19937_64(mix64(seed, s1, s2));
}

}  // namespace dprank
