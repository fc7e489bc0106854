#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mixmerge {

/// Deterministic random streams keyed by (seed, purpose, index...). Each key
/// gets its own engine, so adding or removing draws for one purpose never
/// shifts the draws seen by another.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_purpose(std::string_view purpose) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char ch : purpose) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t stream_key(std::uint64_t seed, std::string_view purpose, std::uint64_t a = 0,
                                std::uint64_t b = 0) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ hash_purpose(purpose));
  k = splitmix64(k ^ a);
  return splitmix64(k ^ (b + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view purpose,
                                   std::uint64_t a = 0, std::uint64_t b = 0) {
  return std::mt19937_64(stream_key(seed, purpose, a, b));
}

}  // namespace mixmerge
