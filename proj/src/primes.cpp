#include "diffsum/primes.hpp"

#include "diffsum/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace diffsum {

namespace {

constexpr std::uint64_t kSegment = std::uint64_t{1} << 18;

std::vector<std::uint64_t> simple_sieve(std::uint64_t limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint64_t> primes;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool divides_any(std::uint64_t p, std::span<const std::uint64_t> skip) {
  return std::any_of(skip.begin(), skip.end(), [p](std::uint64_t s) { return s % p == 0; });
}

}  // namespace

std::vector<std::uint64_t> primes_above(std::uint64_t lower_exclusive, std::uint64_t count,
                                        std::span<const std::uint64_t> skip, const SieveLimits& limits) {
  if (count > limits.max_count) {
    throw LimitError("sieve: " + std::to_string(count) + " primes requested, limit is " +
                     std::to_string(limits.max_count));
  }
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 0) return out;

  std::uint64_t base_limit = 0;
  std::vector<std::uint64_t> base;
  std::vector<bool> composite(kSegment);

  std::uint64_t lo = lower_exclusive + 1;
  while (out.size() < count) {
    if (lo > limits.max_value) {
      throw LimitError("sieve: passed value limit " + std::to_string(limits.max_value) + " after " +
                       std::to_string(out.size()) + " of " + std::to_string(count) + " primes");
    }
    const std::uint64_t hi = std::min(lo + kSegment, limits.max_value + 1);  // exclusive
    const std::uint64_t need = isqrt(hi) + 1;
    if (need > base_limit) {
      base_limit = std::max(need, base_limit * 2);
      base = simple_sieve(base_limit);
    }
    std::fill(composite.begin(), composite.end(), false);
    for (std::uint64_t p : base) {
      if (p * p >= hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      for (std::uint64_t m = start; m < hi; m += p) composite[m - lo] = true;
    }
    for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n < hi && out.size() < count; ++n) {
      if (!composite[n - lo] && !divides_any(n, skip)) out.push_back(n);
    }
    lo = hi;
  }
  return out;
}

}  // namespace diffsum
