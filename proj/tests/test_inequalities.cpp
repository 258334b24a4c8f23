#include "doctest.h"

#include "diffsum/errors.hpp"
#include "diffsum/inequalities.hpp"
#include "diffsum/oracles.hpp"

#include <omp.h>

#include <cmath>
#include <sstream>

using namespace diffsum;

namespace {

AnySet ints(std::initializer_list<std::int64_t> v) { return IntegerSet(v); }

AnySet progression(std::int64_t n) {
  std::vector<std::int64_t> v;
  for (std::int64_t i = 0; i < n; ++i) v.push_back(3 + 7 * i);
  return IntegerSet(v);
}

}  // namespace

TEST_CASE("triangle lower bound examples") {
  auto r = check_triangle_lower(ints({0, 1, 3}), 2);
  CHECK(r.holds);
  CHECK(r.slack == doctest::Approx(6 - std::pow(7.0, 0.75)));
  r = check_triangle_lower(ints({5}), 3);
  CHECK(r.holds);
  CHECK(r.slack == doctest::Approx(0));
  r = check_triangle_lower(ints({0, 1}), 1);
  CHECK(r.holds);
  CHECK(r.slack == doctest::Approx(2 - std::sqrt(3.0)));
  CHECK_THROWS_AS(check_triangle_lower(ints({0}), 21), PreconditionError);
  CHECK_THROWS_AS(check_triangle_lower(IntegerSet{}, 2), EmptySetError);
}

TEST_CASE("plunnecke examples") {
  auto r = check_plunnecke(ints({0, 1, 3}), 2);
  CHECK(r.holds);
  CHECK(r.slack == doctest::Approx(49.0 / 3 - 6));
  for (std::int64_t n = 1; n <= 20; ++n) {
    for (unsigned k = 1; k <= 5; ++k) {
      // t = (2n-1)/n, |kA| = kn - k + 1
      const AnySet ap = progression(n);
      const auto res = check_plunnecke(ap, k);
      CHECK(res.holds);
      const double expect = std::pow((2.0 * n - 1) / n, k) * n - (k * n - k + 1.0);
      CHECK(res.slack == doctest::Approx(expect));
    }
  }
  r = check_plunnecke(ints({4}), 3);
  CHECK(r.holds);
  CHECK(r.slack == doctest::Approx(0));
}

TEST_CASE("combined beta examples") {
  CHECK(check_combined_beta(ints({0, 1, 3}), 2).holds);  // 216 <= 2401
  CHECK(check_combined_beta(ints({0, 1, 3}), 2).slack == doctest::Approx(4 * std::log(7.0) - 3 * std::log(6.0)));
  CHECK(check_combined_beta(ints({0, 2, 9, 11}), 1).holds);
  const AnySet b2 = greedy_bk_set(2, 5);
  CHECK(kfold_sum(std::get<IntegerSet>(b2), 2).size() == 15);
  CHECK(difference_set(std::get<IntegerSet>(b2)).size() == 21);
  CHECK(check_combined_beta(b2, 2).holds);
}

TEST_CASE("freiman-pigaev examples") {
  auto r = check_freiman_pigaev(ints({0, 1, 3}));
  CHECK(r.holds());
  CHECK(r.lower.slack == doctest::Approx(7 - std::pow(6.0, 0.75)));
  CHECK(r.upper.slack == doctest::Approx(std::pow(6.0, 4.0 / 3) - 7));
  r = check_freiman_pigaev(ints({9}));
  CHECK(r.holds());
  CHECK(r.lower.slack == doctest::Approx(0));
  r = check_freiman_pigaev(progression(10));
  CHECK(r.holds());
  CHECK(r.lower.slack == doctest::Approx(19 - std::pow(19.0, 0.75)));
}

TEST_CASE("power mean examples") {
  const AnySet a = ints({0, 1, 3});
  CHECK(kfold_sum(std::get<IntegerSet>(a), 3).size() == 9);  // {0..9} minus {8}
  const auto r = check_power_mean(a, 3);
  REQUIRE(r.size() == 2);
  CHECK(r[0].holds);  // 6 <= 9
  CHECK(r[1].holds);  // 81 <= 216
  CHECK(r[0].slack == doctest::Approx(std::log(3.0) - std::log(6.0) / 2));
  for (const auto& s : check_power_mean(ints({2}), 6)) {
    CHECK(s.holds);
    CHECK(s.slack == doctest::Approx(0));
  }
  CHECK(check_power_mean(a, 1).empty());
}

TEST_CASE("difference triangle in standard form") {
  const AnySet a = ints({0, 1, 3});
  for (unsigned k = 1; k <= 4; ++k) {
    const AnySet x = negate(kfold_sum(std::get<IntegerSet>(a), k));
    CHECK(check_difference_triangle(x, a, a).holds);
  }
  CHECK(check_difference_triangle(CyclicSet(7, {0, 1}), CyclicSet(7, {0, 2}), CyclicSet(7, {3})).holds);
  CHECK_THROWS_AS(check_difference_triangle(CyclicSet(7, {0}), ints({0}), ints({0})), DomainError);
}

TEST_CASE("exact verdicts agree with floating point away from the boundary") {
  for (Generator g : all_generators()) {
    for (std::uint64_t key = 0; key < 200; ++key) {
      const AnySet a = generate_set(g, key * 7919 + 1);
      for (unsigned k = 1; k <= 4; ++k) {
        const auto t = check_triangle_lower(a, k);
        if (std::abs(t.slack) > 1e-6) CHECK(t.holds == (t.slack > 0));
        const auto p = check_plunnecke(a, k);
        if (std::abs(p.slack) > 1e-6) CHECK(p.holds == (p.slack > 0));
      }
    }
  }
}

TEST_CASE("generators are deterministic and land in their groups") {
  for (Generator g : all_generators()) {
    CHECK(parse_generator(generator_name(g)) == g);
    for (std::uint64_t key = 0; key < 50; ++key) {
      const AnySet a = generate_set(g, key);
      CHECK(a == generate_set(g, key));
      const bool cyclic = g == Generator::cyclic_subset || g == Generator::crt_composite;
      CHECK(std::holds_alternative<CyclicSet>(a) == cyclic);
      CHECK(std::visit([](const auto& s) { return !s.empty(); }, a));
    }
  }
  // bk_set draws are B_2 or B_3 up to an affine map
  for (std::uint64_t key = 0; key < 50; ++key) {
    const IntegerSet s = std::get<IntegerSet>(generate_set(Generator::bk_set, key));
    const std::uint64_t n = s.size();
    const bool b2 = kfold_sum(s, 2).size() == n * (n + 1) / 2;
    const bool b3 = kfold_sum(s, 3).size() == n * (n + 1) * (n + 2) / 6;
    CHECK((b2 || b3));
  }
  CHECK_THROWS_AS(parse_generator("nope"), DomainError);
}

TEST_CASE("run_suite") {
  CHECK(run_suite({}, 100, 1).empty());
  const auto out = run_suite(all_generators(), 1200, 1);
  CHECK(out.size() == all_generators().size() * suite_properties().size());
  for (const auto& o : out) {
    CAPTURE(o.property);
    CAPTURE(o.generator);
    CHECK(o.violations == 0);
    CHECK(o.trials == 200);
    CHECK(o.worst_margin >= 0);
  }
  SuiteOptions only;
  only.properties = {"plunnecke"};
  CHECK(run_suite({Generator::progression}, 10, 1, only).size() == 1);
  only.properties = {"bogus"};
  CHECK_THROWS_AS(run_suite({Generator::progression}, 10, 1, only), DomainError);
}

TEST_CASE("run_suite output is independent of the thread count") {
  const int saved = omp_get_max_threads();
  std::ostringstream a, b;
  omp_set_num_threads(1);
  write_outcomes_csv(a, run_suite(all_generators(), 600, 42));
  omp_set_num_threads(8);
  write_outcomes_csv(b, run_suite(all_generators(), 600, 42));
  omp_set_num_threads(saved);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("property,trials,violations,worst_margin,generator,seed\n", 0) == 0);
}
