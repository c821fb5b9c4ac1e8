#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace anderson {

// SplitMix64 finalizer. Per-site randomness is counter-based: one finalizer
// round per key component, so a value depends only on its key, never on
// evaluation order or worker scheduling.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ v); }

// Hash of (stream seed, sample index, site coordinates).
inline std::uint64_t site_hash(std::uint64_t stream_seed, std::uint64_t sample_index,
                               const Eigen::Ref<const Eigen::VectorXi>& coords) {
  std::uint64_t h = splitmix64(stream_seed);
  h = mix64(h, sample_index);
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    h = mix64(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(coords[i])));
  }
  return mix64(h, 0xd6e8feb86659fd93ull);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double u01(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

// Independent substream for a tagged stage of a run (event kind, scale index,
// coupling index). Keeps per-stage estimates statistically independent while
// staying a pure function of the master seed.
inline std::uint64_t substream(std::uint64_t master, std::uint64_t tag_a,
                               std::uint64_t tag_b = 0, std::uint64_t tag_c = 0) {
  return mix64(mix64(mix64(splitmix64(master), tag_a), tag_b), tag_c);
}

}  // namespace anderson
