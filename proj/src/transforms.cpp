#include "diffsum/transforms.hpp"

#include "diffsum/errors.hpp"
#include "diffsum/rational.hpp"
#include "diffsum/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace diffsum {

namespace {

// Uniform m-subset of Z_q by partial Fisher-Yates.
CyclicSet random_subset(std::uint64_t q, std::uint64_t m, CounterRng& rng) {
  std::vector<std::uint64_t> pool(q);
  std::iota(pool.begin(), pool.end(), 0);
  CyclicSet out(q);
  for (std::uint64_t i = 0; i < m; ++i) {
    const std::uint64_t j = i + rng.below(q - i);
    std::swap(pool[i], pool[j]);
    out.insert(pool[i]);
  }
  return out;
}

// U_i < q (U_prev / q)^m  <=>  U_i q^(m-1) < U_prev^m
bool meets_target(std::uint64_t uncovered, std::uint64_t prev, std::uint64_t q, std::uint64_t m) {
  return mpz_class(uncovered) * ipow(mpz_class(q), m - 1) < ipow(mpz_class(prev), m);
}

CyclicSet singleton_zero(std::uint64_t q) { return CyclicSet(q, {0}); }

}  // namespace

std::uint64_t project_pi(const ProjectionParam& p, std::int64_t n) {
  const std::uint64_t frac = p.a * static_cast<std::uint64_t>(n);  // a n mod 2^64
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(p.q) * frac) >> 64);
}

CyclicSet project_set(const ProjectionParam& p, const IntegerSet& a) {
  CyclicSet out(p.q);
  for (std::int64_t x : a.members()) out.insert(project_pi(p, x));
  return out;
}

GoodT find_good_t(const IntegerSet& s, std::uint64_t seed, std::uint64_t max_attempts) {
  const std::uint64_t q = s.size();
  if (q < 2) throw PreconditionError("find_good_t: need |S| >= 2");
  CounterRng rng(seed, 0);
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    std::uint64_t a;
    do {
      a = rng.next();
    } while (a == 0);
    const ProjectionParam p{a, q};
    const std::uint64_t img = project_set(p, s).size();
    if (3 * img > q) return {p, img, attempt};
  }
  throw SearchFailure("find_good_t: no t with |pi_t(S)| > q/3 after " + std::to_string(max_attempts) + " draws");
}

std::uint64_t lorentz_bound(std::uint64_t q, std::uint64_t size, unsigned k) {
  if (k == 0) throw PreconditionError("lorentz_cover: k must be positive");
  if (size == 0) throw EmptySetError("lorentz_cover");
  const double t = static_cast<double>(size) / static_cast<double>(q);
  const double m = std::ceil(std::pow(std::log(static_cast<double>(q)) / t, 1.0 / k));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(m));
}

CoverResult lorentz_cover(const CyclicSet& a, unsigned k, std::uint64_t seed, const CoverOptions& options) {
  const std::uint64_t q = a.modulus();
  CoverResult r;
  r.per_set_bound = lorentz_bound(q, a.size(), k);
  const std::uint64_t m = std::min(r.per_set_bound, q);

  CyclicSet covered = a;
  for (unsigned i = 0; i < k; ++i) {
    const std::uint64_t prev = q - covered.size();
    if (prev == 0) {
      r.sets.push_back(singleton_zero(q));
      continue;
    }
    CounterRng rng(seed, i);
    CyclicSet best_b = singleton_zero(q);
    std::uint64_t best_u = prev;
    bool hit = false;
    for (std::uint64_t attempt = 0; attempt < options.max_attempts_per_round; ++attempt) {
      ++r.attempts;
      CyclicSet b = random_subset(q, m, rng);
      const std::uint64_t u = q - sumset(covered, b).size();
      if (u < best_u || attempt == 0) {
        best_u = u;
        best_b = b;
      }
      if (meets_target(u, prev, q, m)) {
        hit = true;
        break;
      }
    }
    if (!hit) r.bound_exceeded = true;
    covered = sumset(covered, best_b);
    r.sets.push_back(std::move(best_b));
  }

  if (!covered.is_full()) {
    // greedy repair on B_k: covered = C + B_k, C the cover before round k
    r.bound_exceeded = true;
    CyclicSet base = a;
    for (unsigned i = 0; i + 1 < k; ++i) base = sumset(base, r.sets[i]);
    CyclicSet& bk = r.sets.back();
    const auto base_members = base.members();
    while (!covered.is_full()) {
      std::uint64_t best_shift = 0, best_gain = 0;
      for (std::uint64_t b = 0; b < q; ++b) {
        std::uint64_t gain = 0;
        for (std::uint64_t c : base_members) gain += covered.contains((c + b) % q) ? 0 : 1;
        if (gain > best_gain) {
          best_gain = gain;
          best_shift = b;
        }
      }
      bk.insert(best_shift);
      covered = sumset(base, bk);
    }
  }
  return r;
}

IntegerSet lift_doubling(const CyclicSet& a) {
  if (a.empty()) throw EmptySetError("lift_doubling");
  const auto q = static_cast<std::int64_t>(a.modulus());
  std::vector<std::int64_t> out;
  for (std::uint64_t r : a.members()) {
    const auto x = static_cast<std::int64_t>(r);
    // the two representatives of x in (-q, q]
    out.push_back(x == 0 ? q : x - q);
    out.push_back(x);
  }
  return IntegerSet(std::move(out));
}

CyclicSet witness_product(const CyclicSet& a1, const CyclicSet& a2) { return crt_compose(a1, a2); }

IntegerSet witness_base_q(const IntegerSet& a1, std::uint64_t q1, const IntegerSet& a2) {
  if (q1 == 0) throw PreconditionError("witness_base_q: q1 must be positive");
  return sumset(a1, dilate(a2, static_cast<std::int64_t>(q1)));
}

std::int64_t spread_factor(const IntegerSet& a1, unsigned k) {
  if (a1.empty()) throw EmptySetError("witness_spread");
  const __int128 m = static_cast<__int128>(std::max(k, 2U)) * a1.diameter() + 1;
  if (m > INT64_MAX) throw OverflowError("witness_spread: spread factor overflows");
  return static_cast<std::int64_t>(m);
}

IntegerSet witness_spread(const IntegerSet& a1, const IntegerSet& a2, unsigned k) {
  if (k == 0) throw PreconditionError("witness_spread: k must be positive");
  return sumset(a1, dilate(a2, spread_factor(a1, k)));
}

PipelineResult fh_pipeline(const IntegerSet& a, std::uint64_t q, unsigned k, std::uint64_t seed,
                           const PipelineOptions& options) {
  if (q < 2) throw PreconditionError("fh_pipeline: q must be at least 2");
  if (k == 0) throw PreconditionError("fh_pipeline: k must be positive");
  const IntegerSet diff = difference_set(a);
  if (diff.size() < q) {
    throw PreconditionError("fh_pipeline: |A-A| = " + std::to_string(diff.size()) + " < q = " + std::to_string(q));
  }
  // S: the q smallest differences
  const IntegerSet s(std::vector<std::int64_t>(diff.members().begin(),
                                               diff.members().begin() + static_cast<std::ptrdiff_t>(q)));

  PipelineResult out;
  PipelineTrace& tr = out.trace;
  tr.q = q;
  tr.k = k;
  tr.seed = seed;
  tr.input_size = a.size();
  tr.input_difference_size = diff.size();
  tr.input_kfold_size = kfold_sum(a, k).size();

  for (std::uint64_t retry = 0; retry < options.max_retries; ++retry) {
    const GoodT t = find_good_t(s, derive_key(seed, 2 * retry), options.max_t_attempts);
    const CyclicSet a2 = project_set({t.param.a, q}, a);
    const CyclicSet d2 = difference_set(a2);
    if (6 * d2.size() <= q) continue;
    const CoverResult cover = lorentz_cover(d2, 2, derive_key(seed, 2 * retry + 1), options.cover);
    if (cover.bound_exceeded) continue;

    CyclicSet b = cover.sets[0];
    b.insert_all(negate(cover.sets[1]));
    out.a3 = sumset(a2, b);
    out.a2 = a2;
    out.b1 = cover.sets[0];
    out.b2 = cover.sets[1];

    tr.retries = retry;
    tr.t_numerator = t.param.a;
    tr.t_attempts = t.attempts;
    tr.image_size = t.image_size;
    tr.a2_size = a2.size();
    tr.a2_difference_size = d2.size();
    tr.a2_kfold_size = kfold_sum(a2, k).size();
    tr.cover_bound = cover.per_set_bound;
    tr.cover_attempts = cover.attempts;
    tr.b1_size = cover.sets[0].size();
    tr.b2_size = cover.sets[1].size();
    tr.b_union_size = b.size();
    tr.a3_size = out.a3.size();
    tr.a3_kfold_size = kfold_sum(out.a3, k).size();
    tr.a3_difference_full = difference_set(out.a3).is_full();
    if (!tr.a3_difference_full) throw Error("fh_pipeline: internal error, A3 - A3 != Z_q");
    return out;
  }
  throw SearchFailure("fh_pipeline: no admissible t and cover after " + std::to_string(options.max_retries) +
                      " retries");
}

}  // namespace diffsum
