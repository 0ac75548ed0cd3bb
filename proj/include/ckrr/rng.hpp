#pragma once

#include <cstdint>
#include <cstring>
#include <random>

namespace ckrr {

// splitmix64 finalizer; used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

inline std::uint64_t hash_double(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return mix64(bits);
}

// Seed for one sweep cell: repetition r of the cell at `axis_value`,
// independent of every other cell and of execution order.
inline std::uint64_t cell_seed(std::uint64_t base, double axis_value, std::uint64_t rep) {
  return hash_combine(base, hash_combine(hash_double(axis_value), rep));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace ckrr
