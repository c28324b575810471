// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zeal {

// Base error type. Subclasses map to CLI exit codes: ArgumentError -> 2,
// everything else -> 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid arguments, malformed config, violated preconditions.
struct ArgumentError : Error {
  using Error::Error;
};

// Dataset / manifest / fold-spec problems.
struct DataError : Error {
  using Error::Error;
};

// Failures inside the mask/feature/training pipeline.
struct PipelineError : Error {
  using Error::Error;
};

// FNV-1a, used for cache keys and config hashes. Not cryptographic.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view s,
                           std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a(s.data(), s.size(), seed);
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace zeal
