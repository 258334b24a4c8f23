#include "diffsum/inequalities.hpp"

#include "diffsum/errors.hpp"
#include "diffsum/oracles.hpp"
#include "diffsum/rational.hpp"
#include "diffsum/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace diffsum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t size_of(const AnySet& a) {
  return std::visit([](const auto& s) -> std::uint64_t { return s.size(); }, a);
}

std::uint64_t diff_size(const AnySet& a) {
  return std::visit([](const auto& s) -> std::uint64_t { return difference_set(s).size(); }, a);
}

AnySet kfold(const AnySet& a, unsigned k) {
  return std::visit([k](const auto& s) -> AnySet { return kfold_sum(s, k); }, a);
}

AnySet neg(const AnySet& a) {
  return std::visit([](const auto& s) -> AnySet { return negate(s); }, a);
}

std::uint64_t kfold_size(const AnySet& a, unsigned k) { return size_of(kfold(a, k)); }

void require_nonempty(const AnySet& a, const char* op) {
  if (size_of(a) == 0) throw EmptySetError(op);
}

// a^p <= b^r
bool pow_le(std::uint64_t a, unsigned long p, std::uint64_t b, unsigned long r) {
  return ipow(mpz_class(a), p) <= ipow(mpz_class(b), r);
}

// a * b <= c * d
bool prod_le(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  return static_cast<unsigned __int128>(a) * b <= static_cast<unsigned __int128>(c) * d;
}

double dbl(std::uint64_t v) { return static_cast<double>(v); }

AnySet difference(const AnySet& x, const AnySet& y) {
  if (x.index() != y.index()) throw DomainError("difference_triangle: operands live in different groups");
  if (const auto* cx = std::get_if<CyclicSet>(&x)) return sumset(*cx, negate(std::get<CyclicSet>(y)));
  return sumset(std::get<IntegerSet>(x), negate(std::get<IntegerSet>(y)));
}

CyclicSet random_cyclic(std::uint64_t q, CounterRng& rng) {
  CyclicSet s(q);
  const std::uint64_t density = rng.between(1, 100);
  for (std::uint64_t i = 0; i < q; ++i) {
    if (rng.below(100) < density) s.insert(i);
  }
  if (s.empty()) s.insert(rng.below(q));
  return s;
}

IntegerSet random_interval_subset(std::int64_t lo, std::int64_t hi, CounterRng& rng) {
  std::vector<std::int64_t> v;
  const std::uint64_t density = rng.between(1, 100);
  for (std::int64_t x = lo; x <= hi; ++x) {
    if (rng.below(100) < density) v.push_back(x);
  }
  if (v.empty()) v.push_back(rng.between(lo, hi));
  return IntegerSet(std::move(v));
}

IntegerSet random_progression(CounterRng& rng) {
  const std::int64_t a = rng.between(-100, 100);
  const std::int64_t d = rng.between(1, 25);
  const std::int64_t n = rng.between(1, 30);
  std::vector<std::int64_t> v;
  for (std::int64_t i = 0; i < n; ++i) v.push_back(a + i * d);
  return IntegerSet(std::move(v));
}

const std::vector<IntegerSet>& bk_table(unsigned k) {
  static const std::vector<IntegerSet> b2 = [] {
    std::vector<IntegerSet> t;
    for (std::size_t n = 1; n <= 9; ++n) t.push_back(greedy_bk_set(2, n));
    return t;
  }();
  static const std::vector<IntegerSet> b3 = [] {
    std::vector<IntegerSet> t;
    for (std::size_t n = 1; n <= 7; ++n) t.push_back(greedy_bk_set(3, n));
    return t;
  }();
  return k == 2 ? b2 : b3;
}

// Another set in the same group as a.
AnySet companion(const AnySet& a, CounterRng& rng) {
  if (const auto* c = std::get_if<CyclicSet>(&a)) return random_cyclic(c->modulus(), rng);
  const auto& s = std::get<IntegerSet>(a);
  return random_interval_subset(s.min() - 5, s.max() + 5, rng);
}

struct Tally {
  bool violated = false;
  double margin = kInf;
  void add(const CheckResult& r) {
    violated = violated || !r.holds;
    margin = std::min(margin, r.slack);
  }
};

}  // namespace

CheckResult check_triangle_lower(const AnySet& a, unsigned k) {
  require_nonempty(a, "check_triangle_lower");
  if (k == 0 || k > 20) throw PreconditionError("check_triangle_lower: need 1 <= k <= 20");
  const std::uint64_t s = kfold_size(a, k), d = diff_size(a);
  const unsigned long e = 1UL << k;
  // |kA|^(2^k) >= |A-A|^(2^k - 1)
  return {pow_le(d, e - 1, s, e), dbl(s) - std::pow(dbl(d), 1.0 - 1.0 / dbl(e))};
}

CheckResult check_plunnecke(const AnySet& a, unsigned k) {
  require_nonempty(a, "check_plunnecke");
  if (k == 0) throw PreconditionError("check_plunnecke: k must be positive");
  const std::uint64_t n = size_of(a), d = diff_size(a), s = kfold_size(a, k);
  // |kA| n^(k-1) <= d^k
  const bool ok = mpz_class(s) * ipow(mpz_class(n), k - 1) <= ipow(mpz_class(d), k);
  return {ok, std::pow(dbl(d) / dbl(n), k) * dbl(n) - dbl(s)};
}

CheckResult check_combined_beta(const AnySet& a, unsigned k) {
  require_nonempty(a, "check_combined_beta");
  if (k == 0) throw PreconditionError("check_combined_beta: k must be positive");
  const std::uint64_t d = diff_size(a), s = kfold_size(a, k);
  // slack in log units: k^2 ln|A-A| - (2k-1) ln|kA|
  return {pow_le(s, 2 * k - 1, d, static_cast<unsigned long>(k) * k),
          dbl(k) * k * std::log(dbl(d)) - (2.0 * k - 1) * std::log(dbl(s))};
}

CheckResult check_trivial_bound(const AnySet& a, unsigned k) {
  require_nonempty(a, "check_trivial_bound");
  if (k == 0) throw PreconditionError("check_trivial_bound: k must be positive");
  const std::uint64_t n = size_of(a), s = kfold_size(a, k);
  return {pow_le(s, 1, n, k), std::pow(dbl(n), k) - dbl(s)};
}

FreimanPigaev check_freiman_pigaev(const AnySet& a) {
  require_nonempty(a, "check_freiman_pigaev");
  const std::uint64_t s = kfold_size(a, 2), d = diff_size(a);
  FreimanPigaev r;
  r.lower = {pow_le(s, 3, d, 4), dbl(d) - std::pow(dbl(s), 0.75)};
  r.upper = {pow_le(d, 3, s, 4), std::pow(dbl(s), 4.0 / 3.0) - dbl(d)};
  return r;
}

std::vector<CheckResult> check_power_mean(const AnySet& a, unsigned k_max) {
  require_nonempty(a, "check_power_mean");
  std::vector<CheckResult> out;
  if (k_max < 2) return out;
  std::vector<std::uint64_t> sizes{0};
  AnySet cur = a;
  sizes.push_back(size_of(cur));
  for (unsigned k = 2; k <= k_max; ++k) {
    cur = std::visit(
        [&a](const auto& c) -> AnySet {
          using T = std::decay_t<decltype(c)>;
          return sumset(c, std::get<T>(a));
        },
        cur);
    sizes.push_back(size_of(cur));
  }
  for (unsigned k = 1; k < k_max; ++k) {
    // slack in log units: ln|kA|/k - ln|(k+1)A|/(k+1)
    out.push_back({pow_le(sizes[k + 1], k, sizes[k], k + 1),
                   std::log(dbl(sizes[k])) / k - std::log(dbl(sizes[k + 1])) / (k + 1)});
  }
  return out;
}

CheckResult check_difference_triangle(const AnySet& x, const AnySet& y, const AnySet& z) {
  require_nonempty(x, "check_difference_triangle");
  require_nonempty(y, "check_difference_triangle");
  require_nonempty(z, "check_difference_triangle");
  const std::uint64_t lhs_a = size_of(x), lhs_b = size_of(difference(y, z));
  const std::uint64_t rhs_a = size_of(difference(x, y)), rhs_b = size_of(difference(x, z));
  return {prod_le(lhs_a, lhs_b, rhs_a, rhs_b), dbl(rhs_a) * dbl(rhs_b) - dbl(lhs_a) * dbl(lhs_b)};
}

std::string generator_name(Generator g) {
  switch (g) {
    case Generator::interval_subset: return "interval_subset";
    case Generator::cyclic_subset: return "cyclic_subset";
    case Generator::progression: return "progression";
    case Generator::bk_set: return "bk_set";
    case Generator::two_progressions: return "two_progressions";
    case Generator::crt_composite: return "crt_composite";
  }
  return "?";
}

std::vector<Generator> all_generators() {
  return {Generator::interval_subset, Generator::cyclic_subset,    Generator::progression,
          Generator::bk_set,          Generator::two_progressions, Generator::crt_composite};
}

Generator parse_generator(const std::string& name) {
  for (Generator g : all_generators()) {
    if (generator_name(g) == name) return g;
  }
  throw DomainError("unknown generator '" + name + "'");
}

AnySet generate_set(Generator g, std::uint64_t key) {
  CounterRng rng(key);
  switch (g) {
    case Generator::interval_subset: {
      const std::int64_t shift = rng.between(-1000, 1000);
      return random_interval_subset(shift, shift + rng.between(0, 60), rng);
    }
    case Generator::cyclic_subset:
      return random_cyclic(rng.between(2, 150), rng);
    case Generator::progression:
      return random_progression(rng);
    case Generator::bk_set: {
      const unsigned k = rng.below(2) == 0 ? 2 : 3;
      const auto& table = bk_table(k);
      const IntegerSet& base = table[rng.below(table.size())];
      return translate(dilate(base, rng.between(1, 5)), rng.between(-50, 50));
    }
    case Generator::two_progressions: {
      std::vector<std::int64_t> v = random_progression(rng).members();
      const auto w = random_progression(rng).members();
      v.insert(v.end(), w.begin(), w.end());
      return IntegerSet(std::move(v));
    }
    case Generator::crt_composite: {
      std::uint64_t q1, q2;
      do {
        q1 = rng.between(2, 15);
        q2 = rng.between(2, 15);
      } while (gcd_u64(q1, q2) != 1);
      const CyclicSet c = crt_compose(random_cyclic(q1, rng), random_cyclic(q2, rng));
      std::int64_t m;
      do {
        m = rng.between(1, static_cast<std::int64_t>(q1 * q2));
      } while (gcd_u64(static_cast<std::uint64_t>(m), q1 * q2) != 1);
      return dilate(c, m);
    }
  }
  throw DomainError("unknown generator");
}

std::vector<std::string> suite_properties() {
  return {"triangle_lower", "plunnecke",   "combined_beta",  "combined_beta_implied",
          "freiman_pigaev", "power_mean", "difference_triangle"};
}

std::vector<CheckOutcome> run_suite(const std::vector<Generator>& generators, std::uint64_t trials,
                                    std::uint64_t seed, const SuiteOptions& options) {
  if (generators.empty()) return {};
  if (options.k_max == 0) throw PreconditionError("run_suite: k_max must be positive");
  std::vector<std::string> props = options.properties.empty() ? suite_properties() : options.properties;
  const auto known = suite_properties();
  for (const auto& p : props) {
    if (std::find(known.begin(), known.end(), p) == known.end()) throw DomainError("unknown property '" + p + "'");
  }
  const std::size_t np = known.size();
  const unsigned kmax = options.k_max;

  std::vector<Tally> per_trial(trials * np);
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto iu = static_cast<std::uint64_t>(i);
    const std::uint64_t key = derive_key(seed, iu);
    const AnySet a = generate_set(generators[iu % generators.size()], key);
    Tally* t = &per_trial[iu * np];
    for (unsigned k = 1; k <= kmax; ++k) {
      t[0].add(check_triangle_lower(a, k));
      const CheckResult plu = check_plunnecke(a, k);
      const CheckResult comb = check_combined_beta(a, k);
      t[1].add(plu);
      t[2].add(comb);
      // combined follows from plunnecke and the trivial bound
      const bool implied = !(plu.holds && check_trivial_bound(a, k).holds) || comb.holds;
      t[3].add({implied, comb.slack});
      const AnySet x = neg(kfold(a, k));
      t[6].add(check_difference_triangle(x, a, a));
    }
    const FreimanPigaev fp = check_freiman_pigaev(a);
    t[4].add(fp.lower);
    t[4].add(fp.upper);
    for (const auto& r : check_power_mean(a, kmax + 1)) t[5].add(r);
    CounterRng crng(derive_key(key, 1));
    const AnySet y = companion(a, crng);
    const AnySet z = companion(a, crng);
    t[6].add(check_difference_triangle(a, y, z));
  }

  std::vector<CheckOutcome> out;
  for (std::size_t g = 0; g < generators.size(); ++g) {
    for (const auto& p : props) {
      const std::size_t pi = static_cast<std::size_t>(std::find(known.begin(), known.end(), p) - known.begin());
      CheckOutcome o;
      o.property = p;
      o.generator = generator_name(generators[g]);
      o.seed = seed;
      o.worst_margin = kInf;
      for (std::uint64_t i = g; i < trials; i += generators.size()) {
        const Tally& t = per_trial[i * np + pi];
        ++o.trials;
        o.violations += t.violated ? 1 : 0;
        o.worst_margin = std::min(o.worst_margin, t.margin);
      }
      out.push_back(o);
    }
  }
  return out;
}

std::string format_margin(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_outcomes_csv(std::ostream& out, const std::vector<CheckOutcome>& outcomes) {
  out << "property,trials,violations,worst_margin,generator,seed\n";
  for (const auto& o : outcomes) {
    out << o.property << ',' << o.trials << ',' << o.violations << ',' << format_margin(o.worst_margin) << ','
        << o.generator << ',' << o.seed << '\n';
  }
}

}  // namespace diffsum
