#include "doctest.h"

#include "diffsum/errors.hpp"
#include "diffsum/level_pairs.hpp"
#include "diffsum/rng.hpp"

#include <algorithm>
#include <tuple>

using namespace diffsum;

namespace {

using Key = std::tuple<std::vector<std::uint64_t>, std::vector<unsigned>, std::vector<unsigned>>;

// Brute force: every (u, v) function on {0..q-1} of total weight k, keyed by
// the documented canonical order.
std::vector<Key> brute_pairs(std::uint64_t q, unsigned k, unsigned level) {
  std::vector<Key> out;
  std::vector<unsigned> u(q, 0), v(q, 0);
  std::function<void(std::uint64_t, unsigned)> rec = [&](std::uint64_t x, unsigned left) {
    if (x == q) {
      if (left != 0) return;
      Key key;
      for (std::uint64_t i = 0; i < q; ++i) {
        if (u[i] + v[i] == 0) continue;
        std::get<0>(key).push_back(i);
        std::get<1>(key).push_back(u[i] + v[i]);
        std::get<2>(key).push_back(u[i]);
      }
      if (std::get<0>(key).size() == level) out.push_back(key);
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      for (unsigned b = 0; a + b <= left; ++b) {
        u[x] = a;
        v[x] = b;
        rec(x + 1, left - a - b);
      }
    }
    u[x] = v[x] = 0;
  };
  rec(0, k);
  std::sort(out.begin(), out.end());
  return out;
}

Key key_of(const LevelPair& p) {
  Key key;
  for (const auto& e : p.support) {
    std::get<0>(key).push_back(e.point);
    std::get<1>(key).push_back(e.weight.total());
    std::get<2>(key).push_back(e.weight.u);
  }
  return key;
}

}  // namespace

TEST_CASE("enumeration matches brute force in canonical order") {
  for (std::uint64_t q : {1ULL, 2ULL, 3ULL, 5ULL}) {
    for (unsigned k = 1; k <= 4; ++k) {
      for (unsigned level = 1; level <= std::min<std::uint64_t>(k, q); ++level) {
        const auto brute = brute_pairs(q, k, level);
        const LevelPairEnumerator e(q, k, level);
        REQUIRE(e.count() == brute.size());
        for (std::uint64_t i = 0; i < e.count(); ++i) {
          const LevelPair p = e.unrank(i);
          CHECK(key_of(p) == brute[i]);
          CHECK(e.rank(p) == i);
        }
      }
    }
  }
}

TEST_CASE("pair counts") {
  CHECK(LevelPairEnumerator(385, 2, 2).count() == 295680);
  for (std::uint64_t q : {2ULL, 7ULL, 385ULL, 1001ULL}) CHECK(LevelPairEnumerator(q, 2, 1).count() == 3 * q);
  CHECK_THROWS_AS(LevelPairEnumerator(10, 2, 3), DomainError);
  CHECK_THROWS_AS(LevelPairEnumerator(10, 2, 0), DomainError);
}

TEST_CASE("rank(unrank(i)) = i on sampled ranks of a large enumeration") {
  const LevelPairEnumerator e(46189, 3, 2);
  CounterRng rng(1, 2);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t r = rng.below(e.count());
    CHECK(e.rank(e.unrank(r)) == r);
  }
  CHECK(e.rank(e.unrank(e.count() - 1)) == e.count() - 1);
}

TEST_CASE("combination ranking is lexicographic") {
  std::uint64_t expect = 0;
  for (std::uint64_t a = 0; a < 6; ++a) {
    for (std::uint64_t b = a + 1; b < 6; ++b) {
      for (std::uint64_t c = b + 1; c < 6; ++c) {
        CHECK(rank_combination({a, b, c}, 6) == expect);
        CHECK(unrank_combination(expect, 6, 3) == std::vector<std::uint64_t>{a, b, c});
        ++expect;
      }
    }
  }
}

TEST_CASE("for_each_pair_containing visits exactly the pairs through x") {
  const LevelPairEnumerator e(9, 3, 2);
  for (std::uint64_t x : {0ULL, 4ULL, 8ULL}) {
    std::vector<std::uint64_t> seen;
    e.for_each_pair_containing(x, [&](std::uint64_t rank, PairWeight w) {
      const LevelPair p = e.unrank(rank);
      bool found = false;
      for (const auto& s : p.support) {
        if (s.point == x) {
          found = true;
          CHECK(s.weight == w);
        }
      }
      CHECK(found);
      seen.push_back(rank);
    });
    std::uint64_t expect = 0;
    for (std::uint64_t r = 0; r < e.count(); ++r) {
      for (const auto& s : e.unrank(r).support) expect += s.point == x;
    }
    CHECK(seen.size() == expect);
  }
}

TEST_CASE("validate_pair rejects broken invariants") {
  CHECK_THROWS_AS(validate_pair(LevelPair{{{1, {1, 0}}, {0, {1, 0}}}}, 2), DomainError);
  CHECK_THROWS_AS(validate_pair(LevelPair{{{1, {0, 0}}, {2, {2, 0}}}}, 2), DomainError);
  CHECK_THROWS_AS(validate_pair(LevelPair{{{1, {1, 0}}}}, 2), DomainError);
  CHECK_NOTHROW(validate_pair(LevelPair{{{1, {1, 0}}, {3, {0, 1}}}}, 2));
}
