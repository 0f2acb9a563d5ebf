#include "gsh/determinism.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace gsh {
namespace {

void put_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_str(std::vector<unsigned char>& buf, std::string_view s) {
  put_u64(buf, s.size());
  buf.insert(buf.end(), s.begin(), s.end());
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

StreamKey derive_key(std::string_view axis, std::string_view dataset, std::string_view op,
                     std::uint64_t severity_index, std::uint64_t seed) {
  std::vector<unsigned char> buf;
  buf.reserve(64 + axis.size() + dataset.size() + op.size());
  put_str(buf, axis);
  put_str(buf, dataset);
  put_str(buf, op);
  put_u64(buf, severity_index);
  put_u64(buf, seed);
  return StreamKey{mix64(fnv1a64(buf))};
}

StreamKey sub_key(StreamKey parent, std::uint64_t salt) {
  return StreamKey{mix64(parent.value ^ mix64(salt + kGolden))};
}

std::uint64_t bits(StreamKey key, std::uint64_t index) {
  // Two rounds keep neighbouring counters and neighbouring keys decorrelated.
  return mix64(mix64(index * kGolden + key.value) ^ key.value);
}

double uniform(StreamKey key, std::uint64_t index) {
  return static_cast<double>(bits(key, index) >> 11) * 0x1.0p-53;
}

double gaussian(StreamKey key, std::uint64_t index) {
  const double u1 = uniform(key, 2 * index);
  const double u2 = uniform(key, 2 * index + 1);
  // 1 - u1 lies in (0, 1], so the log is finite.
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::uint64_t> keyed_order(StreamKey key, std::span<const std::uint64_t> ids) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> tagged;
  tagged.reserve(ids.size());
  for (std::uint64_t id : ids) tagged.emplace_back(bits(key, id), id);
  std::sort(tagged.begin(), tagged.end());
  std::vector<std::uint64_t> out;
  out.reserve(tagged.size());
  for (const auto& [tag, id] : tagged) out.push_back(id);
  return out;
}

std::vector<std::uint64_t> keyed_permutation(StreamKey key, std::size_t n) {
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return keyed_order(key, ids);
}

}  // namespace gsh
