#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace gtt {

using Clock = std::chrono::system_clock;
using Timestamp = Clock::time_point;

/// ISO-8601 UTC with millisecond precision, e.g. "2026-10-16T12:00:00.123Z".
std::string format_utc(Timestamp t);

/// Compact form usable in file names, e.g. "20261016T120000123Z".
std::string format_utc_compact(Timestamp t);

/// Inverse of format_utc; throws DomainError on any other shape.
Timestamp parse_utc(std::string_view s);

std::string_view trim(std::string_view s);

/// SplitMix64 finalizer; used to derive independent per-call seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value));
}

/// FNV-1a, stable across platforms (std::hash is not).
constexpr std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gtt
