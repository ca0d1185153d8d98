#pragma once

#include <cstdint>
#include <random>

namespace netlqr {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive decorrelated stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named substreams of one simulated episode.
enum class Stream : std::uint64_t { InitialState = 1, Channel = 2, ProcessNoise = 3, Generation = 4 };

/// Seed for substream `stream` of episode `episode` under master `seed`.
///
/// Each (seed, episode, stream) triple maps through three rounds of SplitMix64
/// so neighbouring episodes and streams get unrelated generator states.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t episode, Stream stream) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ episode);
  return splitmix64(h ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t episode, Stream stream) {
  return Rng(stream_seed(seed, episode, stream));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace netlqr
