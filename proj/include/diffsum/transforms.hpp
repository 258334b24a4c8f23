#pragma once
// Bridges between the extremal quantities: submultiplicative witnesses,
// the doubling lift, the pi_t projection, randomized covering, and the
// H -> F pipeline.
#include "diffsum/setcore.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diffsum {

// t = a / 2^64 with a != 0.
struct ProjectionParam {
  std::uint64_t a = 1;
  std::uint64_t q = 1;
};

// floor(q * frac(t n)), exact in 128-bit arithmetic.
std::uint64_t project_pi(const ProjectionParam& p, std::int64_t n);
// Image of A under pi_t, as residues.
CyclicSet project_set(const ProjectionParam& p, const IntegerSet& a);

struct GoodT {
  ProjectionParam param;
  std::uint64_t image_size = 0;
  std::uint64_t attempts = 0;
};

// Draws t until |pi_t(S)| > q/3, q = |S|. SearchFailure past the cap.
GoodT find_good_t(const IntegerSet& s, std::uint64_t seed, std::uint64_t max_attempts = 1000);

struct CoverOptions {
  std::uint64_t max_attempts_per_round = 1000;
};

struct CoverResult {
  std::vector<CyclicSet> sets;
  std::uint64_t per_set_bound = 0;  // m
  std::uint64_t attempts = 0;
  // Some round missed its target; B_k was completed by greedy repair and
  // may exceed m. Retrying with another seed is recommended.
  bool bound_exceeded = false;
};

// m = ceil((ln q / t)^(1/k)), t = |A|/q. Round i samples m-subsets until the
// uncovered count U_i satisfies U_i < q (U_{i-1}/q)^m.
CoverResult lorentz_cover(const CyclicSet& a, unsigned k, std::uint64_t seed, const CoverOptions& options = {});
std::uint64_t lorentz_bound(std::uint64_t q, std::uint64_t size, unsigned k);

// {n : -q < n <= q, n mod q in A}.
IntegerSet lift_doubling(const CyclicSet& a);

// A1 x A2 in Z_{q1 q2} via CRT.
CyclicSet witness_product(const CyclicSet& a1, const CyclicSet& a2);
// A1 + q1 * A2.
IntegerSet witness_base_q(const IntegerSet& a1, std::uint64_t q1, const IntegerSet& a2);
// A1 + m * A2 with m = max(k, 2) * diam(A1) + 1, which separates all k-fold
// sums and all differences.
IntegerSet witness_spread(const IntegerSet& a1, const IntegerSet& a2, unsigned k);
std::int64_t spread_factor(const IntegerSet& a1, unsigned k);

struct PipelineOptions {
  std::uint64_t max_retries = 64;
  std::uint64_t max_t_attempts = 1000;
  CoverOptions cover;
};

struct PipelineTrace {
  std::uint64_t q = 0;
  unsigned k = 0;
  std::uint64_t seed = 0;
  std::uint64_t input_size = 0;
  std::uint64_t input_difference_size = 0;
  std::uint64_t input_kfold_size = 0;
  std::uint64_t retries = 0;
  std::uint64_t t_numerator = 0;
  std::uint64_t t_attempts = 0;
  std::uint64_t image_size = 0;  // |pi_t(S)|
  std::uint64_t a2_size = 0;
  std::uint64_t a2_difference_size = 0;
  std::uint64_t a2_kfold_size = 0;
  std::uint64_t cover_bound = 0;
  std::uint64_t cover_attempts = 0;
  std::uint64_t b1_size = 0;
  std::uint64_t b2_size = 0;
  std::uint64_t b_union_size = 0;
  std::uint64_t a3_size = 0;
  std::uint64_t a3_kfold_size = 0;
  bool a3_difference_full = false;
};

struct PipelineResult {
  CyclicSet a2{1};
  CyclicSet b1{1};
  CyclicSet b2{1};
  CyclicSet a3{1};
  PipelineTrace trace;
};

// Transfers an integer set with |A-A| >= q to A3 in Z_q with A3 - A3 = Z_q.
PipelineResult fh_pipeline(const IntegerSet& a, std::uint64_t q, unsigned k, std::uint64_t seed,
                           const PipelineOptions& options = {});

}  // namespace diffsum
