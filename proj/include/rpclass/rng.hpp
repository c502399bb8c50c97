#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rpclass {

struct RngSeed {
  std::uint64_t value = 0;
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives the seed of a child stream from a parent seed and an index path,
// e.g. derive(master, {b1, b2}). The result depends only on the arguments,
// never on the order in which streams are requested.
inline RngSeed derive(RngSeed parent, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(parent.value);
  for (std::uint64_t k : path) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return RngSeed{h};
}

using Engine = std::mt19937_64;

inline Engine make_engine(RngSeed seed) { return Engine(seed.value); }

}  // namespace rpclass
