#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <string>

namespace tbx
{

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view data);

/// 64-bit seed derived from a run seed and a stable key, independent of
/// platform and of the order in which keys are visited.
std::uint64_t stable_seed(std::uint64_t seed, std::string_view key);

inline std::mt19937_64 keyed_rng(std::uint64_t seed, std::string_view key)
{
  return std::mt19937_64(stable_seed(seed, key));
}

} // namespace tbx
