#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gsh {

// 64-bit key addressing one random stream. Draws are a pure function of
// (key, index), so results never depend on evaluation order or chunking.
struct StreamKey {
  std::uint64_t value = 0;

  friend bool operator==(StreamKey, StreamKey) = default;
};

/// SplitMix64 / Stafford variant-13 finalizer. Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key for one operator invocation. The tuple is encoded canonically
/// (length-prefixed strings, little-endian u64 integers), hashed with
/// FNV-1a 64 and passed through mix64.
StreamKey derive_key(std::string_view axis, std::string_view dataset, std::string_view op,
                     std::uint64_t severity_index, std::uint64_t seed);

/// Child stream, e.g. one per target node.
StreamKey sub_key(StreamKey parent, std::uint64_t salt);

/// Raw 64 random bits at position `index`.
std::uint64_t bits(StreamKey key, std::uint64_t index);

/// Uniform real in [0, 1) with 53 bits of resolution.
double uniform(StreamKey key, std::uint64_t index);

/// Standard normal variate via Box-Muller from uniforms at 2*index and
/// 2*index + 1.
double gaussian(StreamKey key, std::uint64_t index);

/// Deterministic permutation of `ids`: sorted by (bits(key, id), id).
/// The result depends only on the set of ids and the key, not on their
/// input order.
std::vector<std::uint64_t> keyed_order(StreamKey key, std::span<const std::uint64_t> ids);

/// keyed_order over 0..n-1.
std::vector<std::uint64_t> keyed_permutation(StreamKey key, std::size_t n);

/// FNV-1a 64 over raw bytes.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace gsh
