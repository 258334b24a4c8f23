#include "diffsum/level_pairs.hpp"

#include "diffsum/errors.hpp"

#include <algorithm>
#include <string>

namespace diffsum {

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 0; i < r; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > UINT64_MAX) {
      throw OverflowError("binomial(" + std::to_string(n) + ", " + std::to_string(r) + ") exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(c);
}

std::uint64_t rank_combination(const std::vector<std::uint64_t>& combo, std::uint64_t n) {
  const std::uint64_t r = combo.size();
  std::uint64_t rank = 0;
  std::uint64_t next_free = 0;  // prev + 1
  for (std::uint64_t i = 0; i < r; ++i) {
    const std::uint64_t rr = r - i;
    // combinations whose i-th entry lies in [next_free, combo[i])
    rank += binomial(n - next_free, rr) - binomial(n - combo[i], rr);
    next_free = combo[i] + 1;
  }
  return rank;
}

std::vector<std::uint64_t> unrank_combination(std::uint64_t rank, std::uint64_t n, std::size_t r) {
  std::vector<std::uint64_t> combo;
  combo.reserve(r);
  std::uint64_t next_free = 0;
  for (std::size_t i = 0; i < r; ++i) {
    const std::uint64_t rr = r - i;
    const std::uint64_t block = binomial(n - next_free, rr);
    // smallest x with (#combos whose entry i is <= x) > rank
    std::uint64_t lo = next_free;
    std::uint64_t hi = n - rr;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (block - binomial(n - mid - 1, rr) > rank) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    rank -= block - binomial(n - lo, rr);
    combo.push_back(lo);
    next_free = lo + 1;
  }
  return combo;
}

std::vector<std::vector<unsigned>> compositions(unsigned total, unsigned parts) {
  std::vector<std::vector<unsigned>> out;
  if (parts == 0 || parts > total) return out;
  std::vector<unsigned> cur;
  std::function<void(unsigned, unsigned)> rec = [&](unsigned remaining, unsigned slots) {
    if (slots == 1) {
      cur.push_back(remaining);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    for (unsigned first = 1; first + (slots - 1) <= remaining; ++first) {
      cur.push_back(first);
      rec(remaining - first, slots - 1);
      cur.pop_back();
    }
  };
  rec(total, parts);
  return out;
}

LevelPairEnumerator::LevelPairEnumerator(std::uint64_t q, unsigned k, unsigned level)
    : q_(q), k_(k), level_(level) {
  if (level < 1 || level > k) {
    throw DomainError("level " + std::to_string(level) + " outside [1, " + std::to_string(k) + "]");
  }
  if (level > q) throw DomainError("level " + std::to_string(level) + " exceeds ground set size");
  compositions_ = compositions(k, level);
  for (const auto& c : compositions_) {
    offsets_.push_back(per_support_);
    std::uint64_t splits = 1;
    for (unsigned w : c) splits *= w + 1;
    per_support_ += splits;
  }
  support_count_ = binomial(q, level);
  if (__builtin_mul_overflow(support_count_, per_support_, &count_)) {
    throw OverflowError("level-pair count exceeds 64 bits");
  }
}

std::vector<PairWeight> LevelPairEnumerator::decode_weights(std::uint64_t index) const {
  if (index >= per_support_) throw DomainError("weight index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  const auto c = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  std::uint64_t split = index - offsets_[c];
  const auto& comp = compositions_[c];
  std::vector<PairWeight> out(comp.size());
  // mixed radix, first position most significant
  for (std::size_t i = comp.size(); i-- > 0;) {
    const unsigned radix = comp[i] + 1;
    const auto u = static_cast<unsigned>(split % radix);
    split /= radix;
    out[i] = {u, comp[i] - u};
  }
  return out;
}

std::uint64_t LevelPairEnumerator::encode_weights(const std::vector<PairWeight>& weights) const {
  std::vector<unsigned> comp;
  comp.reserve(weights.size());
  for (const auto& w : weights) comp.push_back(w.total());
  const auto it = std::lower_bound(compositions_.begin(), compositions_.end(), comp);
  if (it == compositions_.end() || *it != comp) throw DomainError("weights do not form a composition of k");
  std::uint64_t split = 0;
  for (std::size_t i = 0; i < comp.size(); ++i) split = split * (comp[i] + 1) + weights[i].u;
  return offsets_[static_cast<std::size_t>(it - compositions_.begin())] + split;
}

LevelPair LevelPairEnumerator::unrank(std::uint64_t rank) const {
  if (rank >= count_) throw DomainError("pair rank " + std::to_string(rank) + " out of range");
  const auto support = unrank_combination(rank / per_support_, q_, level_);
  const auto weights = decode_weights(rank % per_support_);
  LevelPair pair;
  for (std::size_t i = 0; i < support.size(); ++i) pair.support.push_back({support[i], weights[i]});
  return pair;
}

std::uint64_t LevelPairEnumerator::rank(const LevelPair& pair) const {
  validate_pair(pair, k_);
  if (pair.level() != level_) throw DomainError("pair level does not match enumerator level");
  std::vector<std::uint64_t> support;
  std::vector<PairWeight> weights;
  for (const auto& e : pair.support) {
    if (e.point >= q_) throw DomainError("pair point outside ground set");
    support.push_back(e.point);
    weights.push_back(e.weight);
  }
  return rank_combination(support, q_) * per_support_ + encode_weights(weights);
}

void LevelPairEnumerator::for_each_pair_containing(std::uint64_t x,
                                                   const std::function<void(std::uint64_t, PairWeight)>& fn) const {
  if (x >= q_) throw DomainError("point outside ground set");
  const std::size_t others = level_ - 1;
  // Lexicographic walk over (level-1)-subsets of {0..q-2}, lifted past x.
  std::vector<std::uint64_t> idx(others);
  for (std::size_t i = 0; i < others; ++i) idx[i] = i;
  std::vector<std::uint64_t> support(level_);
  for (;;) {
    std::size_t pos = 0;
    std::size_t out = 0;
    bool placed = false;
    for (std::size_t i = 0; i < others; ++i) {
      const std::uint64_t y = idx[i] >= x ? idx[i] + 1 : idx[i];
      if (!placed && x < y) {
        pos = out;
        support[out++] = x;
        placed = true;
      }
      support[out++] = y;
    }
    if (!placed) {
      pos = out;
      support[out] = x;
    }
    const std::uint64_t base = rank_combination(support, q_) * per_support_;
    for (std::uint64_t w = 0; w < per_support_; ++w) fn(base + w, decode_weights(w)[pos]);

    // advance
    std::size_t i = others;
    while (i > 0 && idx[i - 1] == (q_ - 1) - (others - (i - 1))) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < others; ++j) idx[j] = idx[j - 1] + 1;
  }
}

void validate_pair(const LevelPair& pair, unsigned k) {
  if (pair.support.empty()) throw DomainError("pair has empty support");
  for (std::size_t i = 0; i < pair.support.size(); ++i) {
    if (pair.support[i].weight.total() == 0) throw DomainError("support entry with zero weight");
    if (i > 0 && pair.support[i - 1].point >= pair.support[i].point) {
      throw DomainError("pair support not strictly increasing");
    }
  }
  if (pair.weight() != k) {
    throw DomainError("pair weight " + std::to_string(pair.weight()) + " != k = " + std::to_string(k));
  }
}

}  // namespace diffsum
