#pragma once

// Weight pairs (u, v) on a finite ground set and their canonical enumeration.
//
// A pair assigns nonnegative weights u(x), v(x) to finitely many points with
// total weight k; its level is the number of points carrying positive weight.
// Canonical order of the pairs of a fixed level L on {0, ..., q-1}:
//   1. support: sorted L-tuples of distinct points, lexicographic;
//   2. the composition (w_1, ..., w_L) of k into positive parts, lexicographic;
//   3. the split (u_1, ..., u_L), 0 <= u_i <= w_i, lexicographic (v_i = w_i - u_i).

#include <cstdint>
#include <functional>
#include <vector>

namespace diffsum {

struct PairWeight {
  unsigned u = 0;
  unsigned v = 0;
  unsigned total() const { return u + v; }
  friend bool operator==(const PairWeight&, const PairWeight&) = default;
};

template <class Point>
struct WeightedPoint {
  Point point;
  PairWeight weight;
  friend bool operator==(const WeightedPoint&, const WeightedPoint&) = default;
};

// Support entries sorted by point, each with u + v > 0.
template <class Point>
struct LevelPairOf {
  std::vector<WeightedPoint<Point>> support;

  std::size_t level() const { return support.size(); }
  unsigned weight() const {
    unsigned w = 0;
    for (const auto& e : support) w += e.weight.total();
    return w;
  }
  friend bool operator==(const LevelPairOf&, const LevelPairOf&) = default;
};

// Pairs on residues of a materializable modulus.
using LevelPair = LevelPairOf<std::uint64_t>;

// Binomial coefficient; throws OverflowError past 2^64.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r);

// Lexicographic rank of a sorted r-subset of {0..n-1} and its inverse.
std::uint64_t rank_combination(const std::vector<std::uint64_t>& combo, std::uint64_t n);
std::vector<std::uint64_t> unrank_combination(std::uint64_t rank, std::uint64_t n, std::size_t r);

// Compositions of `total` into `parts` positive parts, lexicographic.
std::vector<std::vector<unsigned>> compositions(unsigned total, unsigned parts);

class LevelPairEnumerator {
 public:
  // Pairs of exactly `level` on {0..q-1} with total weight k.
  // Throws DomainError unless 1 <= level <= min(k, q).
  LevelPairEnumerator(std::uint64_t q, unsigned k, unsigned level);

  std::uint64_t q() const { return q_; }
  unsigned k() const { return k_; }
  unsigned level() const { return level_; }

  std::uint64_t support_count() const { return support_count_; }
  // Weight assignments per support; identical for every support.
  std::uint64_t per_support() const { return per_support_; }
  std::uint64_t count() const { return count_; }

  LevelPair unrank(std::uint64_t rank) const;
  // Throws DomainError if the pair is not a valid level/weight match.
  std::uint64_t rank(const LevelPair& pair) const;

  // Weights for the support positions encoded by index in [0, per_support()).
  std::vector<PairWeight> decode_weights(std::uint64_t index) const;
  std::uint64_t encode_weights(const std::vector<PairWeight>& weights) const;

  // Calls fn(rank, weight at x) for every pair whose support contains x,
  // in increasing rank order.
  void for_each_pair_containing(std::uint64_t x, const std::function<void(std::uint64_t, PairWeight)>& fn) const;

 private:
  std::uint64_t q_;
  unsigned k_;
  unsigned level_;
  std::vector<std::vector<unsigned>> compositions_;
  std::vector<std::uint64_t> offsets_;  // offsets_[c] = first weight index of composition c
  std::uint64_t per_support_ = 0;
  std::uint64_t support_count_ = 0;
  std::uint64_t count_ = 0;
};

// Validates the LevelPair invariants for weight k; throws DomainError.
void validate_pair(const LevelPair& pair, unsigned k);

}  // namespace diffsum
