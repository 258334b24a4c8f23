#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace diffsum {

struct SieveLimits {
  std::uint64_t max_value = 10'000'000'000ULL;  // largest integer the sieve may examine
  std::uint64_t max_count = 20'000'000ULL;      // most primes one request may return
};

// The `count` smallest primes p > lower_exclusive that divide no entry of
// `skip`, ascending. Segmented sieve of Eratosthenes; throws LimitError when
// the request would exceed `limits`.
std::vector<std::uint64_t> primes_above(std::uint64_t lower_exclusive, std::uint64_t count,
                                        std::span<const std::uint64_t> skip = {}, const SieveLimits& limits = {});

}  // namespace diffsum
