#pragma once

#include <cstdint>
#include <optional>

namespace diffsum {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  const std::uint64_t s = a + b;
  return (s >= m || s < a) ? s - m : s;
}

inline std::uint64_t negmod(std::uint64_t a, std::uint64_t m) { return a == 0 ? 0 : m - a; }

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

// Inverse of a mod m, or nullopt when gcd(a, m) != 1.
std::optional<std::uint64_t> mod_inverse(std::uint64_t a, std::uint64_t m);

// Deterministic Miller-Rabin for all 64-bit inputs.
bool is_prime(std::uint64_t n);

}  // namespace diffsum
