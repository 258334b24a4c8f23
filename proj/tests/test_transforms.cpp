#include "doctest.h"

#include "diffsum/errors.hpp"
#include "diffsum/oracles.hpp"
#include "diffsum/rational.hpp"
#include "diffsum/rng.hpp"
#include "diffsum/transforms.hpp"

#include <cmath>
#include <set>

using namespace diffsum;

namespace {

// floor(q * frac(a n / 2^64)) through GMP, independent of the 128-bit path.
std::uint64_t pi_gmp(std::uint64_t a, std::uint64_t q, std::int64_t n) {
  const mpz_class two64 = mpz_class(1) << 64;
  mpz_class prod = mpz_class(std::to_string(a)) * mpz_class(std::to_string(n));
  mpz_class frac;
  mpz_fdiv_r(frac.get_mpz_t(), prod.get_mpz_t(), two64.get_mpz_t());
  mpz_class r = frac * mpz_class(std::to_string(q));
  mpz_fdiv_q_2exp(r.get_mpz_t(), r.get_mpz_t(), 64);
  return std::stoull(r.get_str());
}

}  // namespace

TEST_CASE("project_pi exact values") {
  CounterRng rng(5, 1);
  for (int i = 0; i < 50; ++i) CHECK(project_pi({rng.next() | 1, static_cast<std::uint64_t>(rng.between(1, 1000))}, 0) == 0);
  CHECK(project_pi({1ULL << 63, 10}, 3) == 5);
  CHECK(project_pi({1ULL << 62, 8}, 1) == 2);
  CHECK(project_pi({1ULL << 62, 8}, -1) == 6);  // frac(-1/4) = 3/4
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t a = rng.next();
    const auto q = static_cast<std::uint64_t>(rng.between(1, 1 << 20));
    const std::int64_t n = rng.between(-(1LL << 40), 1LL << 40);
    CHECK(project_pi({a, q}, n) == pi_gmp(a, q, n));
  }
}

TEST_CASE("quasi-additivity residue over 1e5 random tuples") {
  CounterRng rng(11, 2);
  std::set<std::int64_t> seen;
  bool ok = true;
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t a = rng.next() | 1;
    const auto q = static_cast<std::uint64_t>(rng.between(2, 100000));
    const std::int64_t x = rng.between(-(1LL << 40), 1LL << 40);
    const std::int64_t y = rng.between(-(1LL << 40), 1LL << 40);
    const ProjectionParam p{a, q};
    const auto r = static_cast<std::int64_t>(project_pi(p, x + y)) - static_cast<std::int64_t>(project_pi(p, x)) -
                   static_cast<std::int64_t>(project_pi(p, y));
    const auto qi = static_cast<std::int64_t>(q);
    if (r != 0 && r != 1 && r != -qi && r != 1 - qi) ok = false;
    seen.insert(r == -qi ? -1000000 : r == 1 - qi ? -999999 : r);
  }
  CHECK(ok);
  CHECK(seen.size() == 4);  // all four residue classes occur
}

TEST_CASE("find_good_t") {
  const std::uint64_t q = 50;
  std::vector<std::int64_t> spaced, interval;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(q); ++i) {
    spaced.push_back(i * 1000000007LL);
    interval.push_back(i);
  }
  for (const IntegerSet s : {IntegerSet(spaced), IntegerSet(interval)}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const GoodT g = find_good_t(s, seed);
      CHECK(g.param.a != 0);
      CHECK(g.param.q == q);
      CHECK(project_set(g.param, s).size() == g.image_size);
      CHECK(3 * g.image_size > q);
      const GoodT h = find_good_t(s, seed);
      CHECK(h.param.a == g.param.a);
    }
  }
  CHECK_THROWS_AS(find_good_t(IntegerSet{5}, 1), PreconditionError);
}

TEST_CASE("lorentz_cover") {
  SUBCASE("full group") {
    const CoverResult r = lorentz_cover(CyclicSet::full(17), 3, 1);
    REQUIRE(r.sets.size() == 3);
    for (const auto& b : r.sets) CHECK(b == CyclicSet(17, {0}));
    CHECK(r.per_set_bound >= 1);
    CHECK(!r.bound_exceeded);
  }
  SUBCASE("q = 4, A = {0,1}, k = 1") {
    const CyclicSet a(4, {0, 1});
    CHECK(lorentz_bound(4, 2, 1) == 3);
    // enumerate all covers: the smallest has size 2
    std::uint64_t smallest = 5;
    for (unsigned m = 1; m < 16; ++m) {
      CyclicSet b(4);
      for (unsigned i = 0; i < 4; ++i) {
        if (m >> i & 1U) b.insert(i);
      }
      if (sumset(a, b).is_full()) smallest = std::min<std::uint64_t>(smallest, b.size());
    }
    CHECK(smallest == 2);
    CHECK(sumset(a, CyclicSet(4, {0, 2})).is_full());
    const CoverResult r = lorentz_cover(a, 1, 3);
    CHECK(r.sets[0].size() <= 3);
    CHECK(sumset(a, r.sets[0]).is_full());
  }
  SUBCASE("random sets, k = 1..3") {
    CounterRng rng(8, 8);
    for (int trial = 0; trial < 60; ++trial) {
      const auto q = static_cast<std::uint64_t>(rng.between(2, 300));
      CyclicSet a(q);
      const std::uint64_t size = rng.between(1, static_cast<std::int64_t>(q));
      while (a.size() < size) a.insert(rng.below(q));
      const unsigned k = static_cast<unsigned>(rng.between(1, 3));
      const CoverResult r = lorentz_cover(a, k, trial);
      REQUIRE(r.sets.size() == k);
      CyclicSet total = a;
      for (const auto& b : r.sets) total = sumset(total, b);
      CHECK(total.is_full());
      if (!r.bound_exceeded) {
        for (const auto& b : r.sets) CHECK(b.size() <= r.per_set_bound);
      }
    }
  }
  SUBCASE("greedy repair when the attempt budget is zero") {
    const CyclicSet a(30, {0, 1, 2});
    const CoverResult r = lorentz_cover(a, 2, 1, CoverOptions{0});
    CHECK(r.bound_exceeded);
    CHECK(sumset(sumset(a, r.sets[0]), r.sets[1]).is_full());
  }
  CHECK_THROWS_AS(lorentz_cover(CyclicSet(5), 1, 1), EmptySetError);
}

TEST_CASE("lift_doubling") {
  const CyclicSet a(7, {0, 1, 3});
  const IntegerSet lift = lift_doubling(a);
  CHECK(lift == IntegerSet{-6, -4, 0, 1, 3, 7});
  const IntegerSet d = difference_set(lift);
  for (std::int64_t x = -7; x <= 7; ++x) CHECK(d.contains(x));
  CHECK(kfold_sum(lift, 2).size() <= 4 * kfold_sum(a, 2).size());

  CounterRng rng(3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = static_cast<std::uint64_t>(rng.between(2, 60));
    CyclicSet b(q);
    b.insert(rng.below(q));
    for (std::uint64_t i = 0; i < q; ++i) {
      if (rng.below(4) == 0) b.insert(i);
    }
    const IntegerSet l = lift_doubling(b);
    CHECK(l.size() == 2 * b.size());
    CHECK(l.min() > -static_cast<std::int64_t>(q));
    CHECK(l.max() <= static_cast<std::int64_t>(q));
    CHECK(reduce_mod(l, q) == b);
  }
}

TEST_CASE("lift of every F witness: run >= 2q+1 and |kA'| <= 2k F_k(q)") {
  for (unsigned k = 1; k <= 3; ++k) {
    for (std::uint64_t q = 2; q <= 16; ++q) {
      const auto r = oracle_F(k, q);
      const IntegerSet lift = lift_doubling(std::get<CyclicSet>(r.witness));
      CHECK(longest_consecutive_run(difference_set(lift)).run_length >= 2 * q + 1);
      CHECK(kfold_sum(lift, k).size() <= 2 * k * r.value);
    }
  }
}

TEST_CASE("witness constructions") {
  const CyclicSet prod = witness_product(CyclicSet(7, {0, 1, 3}), CyclicSet(2, {0, 1}));
  CHECK(prod.modulus() == 14);
  CHECK(prod.size() == 6);
  CHECK(difference_set(prod).is_full());
  // CRT oracle: x mod 7 in A1 and x mod 2 in A2
  for (std::uint64_t x = 0; x < 14; ++x) {
    const bool in1 = x % 7 == 0 || x % 7 == 1 || x % 7 == 3;
    CHECK(prod.contains(x) == in1);
  }
  CHECK_THROWS_AS(witness_product(CyclicSet(4, {0}), CyclicSet(6, {0})), PreconditionError);

  const IntegerSet base = witness_base_q(IntegerSet{0, 1}, 2, IntegerSet{0, 1});
  CHECK(base == IntegerSet{0, 1, 2, 3});
  CHECK(longest_consecutive_run(difference_set(base)).run_length >= 4);

  const IntegerSet sidon{0, 1, 3};
  CHECK(spread_factor(sidon, 2) == 7);
  const IntegerSet sp = witness_spread(sidon, sidon, 2);
  CHECK(kfold_sum(sp, 2).size() == 36);
  CHECK(difference_set(sp).size() == 49);
  // k = 1 still separates differences
  const IntegerSet sp1 = witness_spread(IntegerSet{0, 1}, IntegerSet{0, 1}, 1);
  CHECK(difference_set(sp1).size() == 9);
}

TEST_CASE("submultiplicativity on oracle values") {
  for (unsigned k = 1; k <= 2; ++k) {
    for (std::uint64_t q1 = 2; q1 <= 13; ++q1) {
      for (std::uint64_t q2 = q1 + 1; q1 * q2 <= 26; ++q2) {
        if (gcd_u64(q1, q2) != 1) continue;
        const auto r1 = oracle_F(k, q1);
        const auto r2 = oracle_F(k, q2);
        const auto r12 = oracle_F(k, q1 * q2);
        CHECK(r12.value <= r1.value * r2.value);
        const CyclicSet w = witness_product(std::get<CyclicSet>(r1.witness), std::get<CyclicSet>(r2.witness));
        CHECK(difference_set(w).is_full());
        CHECK(kfold_sum(w, k).size() == r1.value * r2.value);
      }
    }
    for (std::uint64_t q1 = 2; q1 <= 6; ++q1) {
      for (std::uint64_t q2 = 2; q2 <= 6; ++q2) {
        const std::uint64_t d = 12;
        const auto g1 = oracle_G(k, q1, d), g2 = oracle_G(k, q2, d);
        const IntegerSet gw = witness_base_q(std::get<IntegerSet>(g1.witness), q1, std::get<IntegerSet>(g2.witness));
        CHECK(longest_consecutive_run(difference_set(gw)).run_length >= q1 * q2);
        CHECK(kfold_sum(gw, k).size() <= g1.value * g2.value);
        const auto h1 = oracle_H(k, q1, d), h2 = oracle_H(k, q2, d);
        const IntegerSet hw = witness_spread(std::get<IntegerSet>(h1.witness), std::get<IntegerSet>(h2.witness), k);
        CHECK(difference_set(hw).size() >= q1 * q2);
        CHECK(kfold_sum(hw, k).size() == h1.value * h2.value);
        if (q1 * q2 <= 20) {
          CHECK(oracle_G(k, q1 * q2, 20).value <= g1.value * g2.value);
          CHECK(oracle_H(k, q1 * q2, 20).value <= h1.value * h2.value);
        }
      }
    }
  }
}

TEST_CASE("fh_pipeline on a greedy Sidon set") {
  const IntegerSet a = greedy_bk_set(2, 11);
  REQUIRE(difference_set(a).size() >= 101);
  const PipelineResult r = fh_pipeline(a, 101, 2, 1);
  CHECK(r.a3.modulus() == 101);
  CHECK(difference_set(r.a3).is_full());
  CHECK(r.trace.a3_difference_full);
  CHECK(6 * r.trace.a2_difference_size > 101);
  const auto bound = 2 * static_cast<std::uint64_t>(std::ceil(std::sqrt(6 * std::log(101.0))));
  CHECK(bound == 12);
  CHECK(r.trace.b_union_size <= bound);
  CHECK(r.trace.a2_kfold_size <= 2 * r.trace.input_kfold_size);
  CyclicSet b = r.b1;
  b.insert_all(negate(r.b2));
  CHECK(b.size() == r.trace.b_union_size);
  CHECK(sumset(r.a2, b) == r.a3);
  CHECK(r.trace.a3_kfold_size <= r.trace.a2_kfold_size * kfold_sum(b, 2).size());
  CHECK(sumset(sumset(difference_set(r.a2), r.b1), r.b2).is_full());
  // same seed, same output
  const PipelineResult again = fh_pipeline(a, 101, 2, 1);
  CHECK(again.a3 == r.a3);
  CHECK(again.trace.t_numerator == r.trace.t_numerator);

  for (std::uint64_t seed = 2; seed < 12; ++seed) {
    const PipelineResult s = fh_pipeline(a, 101, 2, seed);
    CHECK(difference_set(s.a3).is_full());
  }
  CHECK_THROWS_AS(fh_pipeline(IntegerSet{0, 1, 3}, 101, 2, 1), PreconditionError);
}

TEST_CASE("fh_pipeline on a dense set") {
  // A = [0, q) gives A2 = pi_t(A); when A2 - A2 is already Z_q the cover is {0}, {0}
  std::vector<std::int64_t> v;
  for (std::int64_t i = 0; i < 31; ++i) v.push_back(i);
  bool saw_full = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PipelineResult r = fh_pipeline(IntegerSet(v), 31, 2, seed);
    CHECK(difference_set(r.a3).is_full());
    if (r.trace.a2_difference_size == 31) {
      saw_full = true;
      CHECK(r.trace.b_union_size == 1);
      CHECK(r.a3.size() == r.trace.a2_size);
    }
  }
  CHECK(saw_full);
}
