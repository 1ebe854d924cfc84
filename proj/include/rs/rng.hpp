#pragma once

#include <cstdint>
#include <random>

namespace rs {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive decorrelated stream seeds from one
// master seed so that deployment, channel draws and every GA attempt consume
// independent sequences regardless of how many draws each one makes.
inline std::uint64_t split_mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return split_mix64(master ^ split_mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

}  // namespace rs
